#pragma once

// Fixed-width bitset sized at runtime. Used wherever a set is represented as
// membership flags over an indexed domain: environment elements during
// search, or grid cells for support regions.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <vector>

namespace metamodel {

class IndexSet {
public:
    using Word = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    IndexSet() = default;
    explicit IndexSet(std::size_t bits) : bits_(bits), words_(word_count(bits)) {
        if (words_ > kInline) heap_.assign(words_, 0);
    }

    static IndexSet full(std::size_t bits) {
        IndexSet s(bits);
        Word* w = s.data();
        std::fill(w, w + s.words_, ~Word{0});
        s.trim();
        return s;
    }

    std::size_t size() const { return bits_; }

    bool test(std::size_t i) const { return (data()[i / kWordBits] >> (i % kWordBits)) & 1U; }
    void set(std::size_t i, bool on = true) {
        Word mask = Word{1} << (i % kWordBits);
        if (on) data()[i / kWordBits] |= mask;
        else data()[i / kWordBits] &= ~mask;
    }

    std::size_t count() const {
        std::size_t n = 0;
        const Word* w = data();
        for (std::size_t k = 0; k < words_; ++k) n += static_cast<std::size_t>(std::popcount(w[k]));
        return n;
    }

    bool none() const {
        const Word* w = data();
        return std::all_of(w, w + words_, [](Word x) { return x == 0; });
    }

    template <class F>
    void for_each(F&& f) const {
        const Word* w = data();
        for (std::size_t k = 0; k < words_; ++k) {
            Word x = w[k];
            while (x) {
                auto bit = static_cast<std::size_t>(std::countr_zero(x));
                f(k * kWordBits + bit);
                x &= x - 1;
            }
        }
    }

    IndexSet complement() const {
        IndexSet r = *this;
        Word* w = r.data();
        for (std::size_t k = 0; k < words_; ++k) w[k] = ~w[k];
        r.trim();
        return r;
    }

    /// Applies a two-input truth table (bit 3-(2x+y) of `code`) wordwise.
    static IndexSet apply(unsigned code, const IndexSet& x, const IndexSet& y) {
        IndexSet r(x.bits_);
        const Word* a = x.data();
        const Word* b = y.data();
        Word* out = r.data();
        for (std::size_t k = 0; k < x.words_; ++k) {
            Word v = 0;
            if (code & 8U) v |= ~a[k] & ~b[k];
            if (code & 4U) v |= ~a[k] & b[k];
            if (code & 2U) v |= a[k] & ~b[k];
            if (code & 1U) v |= a[k] & b[k];
            out[k] = v;
        }
        r.trim();
        return r;
    }

    friend IndexSet operator&(const IndexSet& a, const IndexSet& b) { return apply(1, a, b); }
    friend IndexSet operator|(const IndexSet& a, const IndexSet& b) { return apply(7, a, b); }
    friend IndexSet operator^(const IndexSet& a, const IndexSet& b) { return apply(6, a, b); }
    friend IndexSet operator-(const IndexSet& a, const IndexSet& b) { return apply(2, a, b); }

    static std::size_t intersection_count(const IndexSet& a, const IndexSet& b) {
        std::size_t n = 0;
        for (std::size_t k = 0; k < a.words_; ++k)
            n += static_cast<std::size_t>(std::popcount(a.data()[k] & b.data()[k]));
        return n;
    }
    static std::size_t union_count(const IndexSet& a, const IndexSet& b) {
        std::size_t n = 0;
        for (std::size_t k = 0; k < a.words_; ++k)
            n += static_cast<std::size_t>(std::popcount(a.data()[k] | b.data()[k]));
        return n;
    }

    friend bool operator==(const IndexSet& a, const IndexSet& b) {
        return a.bits_ == b.bits_ && std::equal(a.data(), a.data() + a.words_, b.data());
    }

    bool is_subset_of(const IndexSet& other) const {
        for (std::size_t k = 0; k < words_; ++k)
            if (data()[k] & ~other.data()[k]) return false;
        return true;
    }

private:
    static constexpr std::size_t kInline = 2;
    static std::size_t word_count(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

    Word* data() { return words_ > kInline ? heap_.data() : inline_.data(); }
    const Word* data() const { return words_ > kInline ? heap_.data() : inline_.data(); }

    void trim() {
        if (bits_ % kWordBits && words_) data()[words_ - 1] &= (Word{1} << (bits_ % kWordBits)) - 1;
    }

    std::size_t bits_ = 0;
    std::size_t words_ = 0;
    std::array<Word, kInline> inline_{};
    std::vector<Word> heap_;
};

}  // namespace metamodel
