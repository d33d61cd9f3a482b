#pragma once

// The sixteen two-input boolean operations, numbered so that the code's bits
// read the output column top to bottom for inputs (0,0), (0,1), (1,0), (1,1).
// op1 = and, op6 = xor, op7 = or, op9 = xnor, op2 = x and not y.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace metamodel::ops {

inline constexpr unsigned kFalse = 0;
inline constexpr unsigned kAnd = 1;
inline constexpr unsigned kAndNot = 2;    // x & ~y, i.e. x - y
inline constexpr unsigned kLeft = 3;
inline constexpr unsigned kNotAnd = 4;    // ~x & y
inline constexpr unsigned kRight = 5;
inline constexpr unsigned kXor = 6;
inline constexpr unsigned kOr = 7;
inline constexpr unsigned kNor = 8;
inline constexpr unsigned kXnor = 9;
inline constexpr unsigned kNotRight = 10;
inline constexpr unsigned kOrNot = 11;    // x | ~y
inline constexpr unsigned kNotLeft = 12;
inline constexpr unsigned kNotOr = 13;    // ~x | y
inline constexpr unsigned kNand = 14;
inline constexpr unsigned kTrue = 15;

inline constexpr unsigned kCount = 16;

constexpr bool apply(unsigned code, bool x, bool y) {
    return (code >> (3U - (2U * x + y))) & 1U;
}

/// Truth table column for `code`, ordered (0,0), (0,1), (1,0), (1,1).
constexpr std::array<bool, 4> truth_table(unsigned code) {
    return {apply(code, false, false), apply(code, false, true), apply(code, true, false),
            apply(code, true, true)};
}

/// Constant and projection operations produce nothing new from two operands.
constexpr bool is_trivial(unsigned code) {
    return code == kFalse || code == kTrue || code == kLeft || code == kRight;
}

constexpr std::string_view name(unsigned code) {
    constexpr std::array<std::string_view, kCount> names = {
        "false", "and",  "and-not", "left",  "not-and", "right",  "xor",  "or",
        "nor",   "xnor", "not-right", "or-not", "not-left", "not-or", "nand", "true"};
    return names.at(code);
}

/// Number of distinct n-input boolean functions, 2^(2^n).
constexpr std::uint64_t function_count(unsigned n) {
    if (n > 5) throw std::out_of_range("function_count: arity above 5 overflows 64 bits");
    return std::uint64_t{1} << (std::uint64_t{1} << n);
}

/// Left-associative fold of a binary op over more than two operands.
template <class Range>
bool fold(unsigned code, const Range& values) {
    auto it = std::begin(values);
    auto end = std::end(values);
    if (it == end) throw std::invalid_argument("fold over an empty operand list");
    bool acc = *it++;
    for (; it != end; ++it) acc = apply(code, acc, *it);
    return acc;
}

}  // namespace metamodel::ops
