#pragma once

// Finite-set primitives: element identity, datasets over a shared universe,
// the set algebra relative to a covering set, and the discrete Jaccard index.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <memory>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace metamodel {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UniverseMismatch : public Error {
public:
    UniverseMismatch(const std::string& a, const std::string& b)
        : Error("datasets '" + a + "' and '" + b + "' are drawn from different universes"),
          first(a), second(b) {}
    std::string first, second;
};

struct ElementId {
    std::int64_t value = 0;

    constexpr ElementId() = default;
    constexpr explicit ElementId(std::int64_t v) : value(v) {}

    friend constexpr auto operator<=>(ElementId, ElementId) = default;
};

inline std::ostream& operator<<(std::ostream& os, ElementId x) { return os << x.value; }
inline std::string to_string(ElementId x) { return std::to_string(x.value); }

inline std::vector<ElementId> ids(std::initializer_list<std::int64_t> values) {
    std::vector<ElementId> out;
    out.reserve(values.size());
    for (auto v : values) out.emplace_back(v);
    return out;
}

inline std::vector<ElementId> id_range(std::int64_t lo, std::int64_t hi) {
    std::vector<ElementId> out;
    for (auto v = lo; v <= hi; ++v) out.emplace_back(v);
    return out;
}

class NotSubset : public Error {
public:
    NotSubset(const std::string& what, std::vector<ElementId> stray)
        : Error(what), stray_elements(std::move(stray)) {}
    std::vector<ElementId> stray_elements;
};

namespace detail {
inline std::string list_ids(std::span<const ElementId> xs, std::size_t limit = 16) {
    std::string s = "{";
    for (std::size_t i = 0; i < xs.size() && i < limit; ++i) {
        if (i) s += ",";
        s += to_string(xs[i]);
    }
    if (xs.size() > limit) s += ",...";
    return s + "}";
}

inline void normalize(std::vector<ElementId>& xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}
}  // namespace detail

/// The finite set of all possible elements of a domain (Omega).
class Universe {
public:
    Universe(std::string name, std::vector<ElementId> elements)
        : name_(std::move(name)), elements_(std::move(elements)) {
        detail::normalize(elements_);
    }

    const std::string& name() const { return name_; }
    std::span<const ElementId> elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }

    bool contains(ElementId x) const {
        return std::binary_search(elements_.begin(), elements_.end(), x);
    }

    friend bool operator==(const Universe& a, const Universe& b) {
        return a.name_ == b.name_ && a.elements_ == b.elements_;
    }

private:
    std::string name_;
    std::vector<ElementId> elements_;
};

using UniversePtr = std::shared_ptr<const Universe>;

inline UniversePtr make_universe(std::string name, std::vector<ElementId> elements) {
    return std::make_shared<const Universe>(std::move(name), std::move(elements));
}

inline bool same_universe(const UniversePtr& a, const UniversePtr& b) {
    return a == b || (a && b && *a == *b);
}

/// A labeled finite subset of a universe. Members are kept sorted ascending
/// and free of duplicates; the label plays no part in equality.
class Dataset {
public:
    Dataset() = default;

    Dataset(std::string id, UniversePtr universe, std::vector<ElementId> members)
        : id_(std::move(id)), universe_(std::move(universe)), members_(std::move(members)) {
        if (!universe_) throw Error("dataset '" + id_ + "' has no universe");
        detail::normalize(members_);
        std::vector<ElementId> stray;
        for (auto x : members_)
            if (!universe_->contains(x)) stray.push_back(x);
        if (!stray.empty()) {
            auto msg = "dataset '" + id_ + "' has elements outside universe '" + universe_->name() +
                       "': " + detail::list_ids(stray);
            throw NotSubset(msg, std::move(stray));
        }
    }

    static Dataset full(std::string id, UniversePtr universe) {
        auto members = std::vector<ElementId>(universe->elements().begin(), universe->elements().end());
        return Dataset(std::move(id), std::move(universe), std::move(members));
    }

    static Dataset empty_of(std::string id, UniversePtr universe) {
        return Dataset(std::move(id), std::move(universe), {});
    }

    const std::string& id() const { return id_; }
    const UniversePtr& universe() const { return universe_; }
    std::span<const ElementId> members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    bool contains(ElementId x) const {
        return std::binary_search(members_.begin(), members_.end(), x);
    }

    bool is_subset_of(const Dataset& other) const {
        return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                             members_.end());
    }

    Dataset renamed(std::string id) const {
        Dataset d = *this;
        d.id_ = std::move(id);
        return d;
    }

    friend bool operator==(const Dataset& a, const Dataset& b) {
        return same_universe(a.universe_, b.universe_) && a.members_ == b.members_;
    }

private:
    struct Trusted {};
    Dataset(Trusted, std::string id, UniversePtr universe, std::vector<ElementId> members)
        : id_(std::move(id)), universe_(std::move(universe)), members_(std::move(members)) {}

    std::string id_;
    UniversePtr universe_;
    std::vector<ElementId> members_;

    template <class Merge>
    friend Dataset combine(const Dataset& a, const Dataset& b, const std::string& label, Merge merge);
};

/// Exact non-negative rational, kept in lowest terms.
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    constexpr Ratio() = default;
    constexpr Ratio(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
        if (den == 0) throw Error("ratio with zero denominator");
        auto g = std::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend constexpr bool operator==(const Ratio& a, const Ratio& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend constexpr std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
        // 128-bit cross products keep the comparison exact.
        auto lhs = static_cast<unsigned __int128>(a.num) * b.den;
        auto rhs = static_cast<unsigned __int128>(b.num) * a.den;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
};

inline std::string to_string(const Ratio& r) {
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}
inline std::ostream& operator<<(std::ostream& os, const Ratio& r) { return os << to_string(r); }

template <class Merge>
Dataset combine(const Dataset& a, const Dataset& b, const std::string& label, Merge merge) {
    if (!same_universe(a.universe(), b.universe())) throw UniverseMismatch(a.id(), b.id());
    std::vector<ElementId> out;
    out.reserve(a.size() + b.size());
    merge(a.members_, b.members_, std::back_inserter(out));
    return Dataset(Dataset::Trusted{}, label, a.universe(), std::move(out));
}

inline Dataset set_union(const Dataset& a, const Dataset& b) {
    return combine(a, b, "(" + a.id() + " | " + b.id() + ")", [](auto& x, auto& y, auto out) {
        std::set_union(x.begin(), x.end(), y.begin(), y.end(), out);
    });
}

inline Dataset intersect(const Dataset& a, const Dataset& b) {
    return combine(a, b, "(" + a.id() + " & " + b.id() + ")", [](auto& x, auto& y, auto out) {
        std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), out);
    });
}

inline Dataset difference(const Dataset& a, const Dataset& b) {
    return combine(a, b, "(" + a.id() + " - " + b.id() + ")", [](auto& x, auto& y, auto out) {
        std::set_difference(x.begin(), x.end(), y.begin(), y.end(), out);
    });
}

inline Dataset sym_difference(const Dataset& a, const Dataset& b) {
    return combine(a, b, "(" + a.id() + " ^ " + b.id() + ")", [](auto& x, auto& y, auto out) {
        std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), out);
    });
}

/// relative_to \ a. Requires a to be contained in relative_to.
inline Dataset complement(const Dataset& a, const Dataset& relative_to) {
    if (!same_universe(a.universe(), relative_to.universe()))
        throw UniverseMismatch(a.id(), relative_to.id());
    std::vector<ElementId> stray;
    std::set_difference(a.members().begin(), a.members().end(), relative_to.members().begin(),
                        relative_to.members().end(), std::back_inserter(stray));
    if (!stray.empty()) {
        auto msg = "dataset '" + a.id() + "' is not contained in '" + relative_to.id() + "'; stray elements " +
                   detail::list_ids(stray);
        throw NotSubset(msg, std::move(stray));
    }
    return difference(relative_to, a).renamed("~" + a.id());
}

inline std::size_t intersection_size(const Dataset& a, const Dataset& b) {
    std::size_t n = 0;
    auto i = a.members().begin();
    auto j = b.members().begin();
    while (i != a.members().end() && j != b.members().end()) {
        if (*i < *j) ++i;
        else if (*j < *i) ++j;
        else { ++n; ++i; ++j; }
    }
    return n;
}

/// |A & B| / |A | B| as an exact ratio; two empty sets compare as identical (1).
inline Ratio jaccard(const Dataset& a, const Dataset& b) {
    if (!same_universe(a.universe(), b.universe())) throw UniverseMismatch(a.id(), b.id());
    const auto inter = intersection_size(a, b);
    const auto uni = a.size() + b.size() - inter;
    if (uni == 0) return Ratio(1, 1);
    return Ratio(inter, uni);
}

}  // namespace metamodel
