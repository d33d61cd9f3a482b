#pragma once

// Recursive-descent parser for the expression DSL.
//
//   equation := expr '==' expr
//   expr     := term (('|' | '^' | '-') term)*
//   term     := factor ('&' factor)*
//   factor   := '~' factor | '(' expr ')' | ident | '?' ident
//             | 'op' digits '(' expr ',' expr ')'
//
// '&' binds tighter than '|', '^' and '-', which share one left-associative
// level. The opK(a, b) form reaches any of the sixteen binary operations.

#include <cctype>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "metamodel/expr.hpp"

namespace metamodel {

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t pos)
        : Error("parse error at " + std::to_string(pos) + ": " + message), position(pos) {}
    std::size_t position;
};

enum class DomainTag { Set, Model };

inline std::string_view to_string(DomainTag t) { return t == DomainTag::Set ? "set" : "model"; }

/// Classifies identifiers; nullopt means the identifier is unknown.
using SymbolTable = std::function<std::optional<DomainTag>(std::string_view)>;

struct QueryEquation {
    SetExpr left;
    SetExpr right;
    DomainTag left_domain = DomainTag::Set;
    DomainTag right_domain = DomainTag::Set;

    std::set<std::string> unknowns() const {
        auto u = unknown_names(left);
        auto r = unknown_names(right);
        u.insert(r.begin(), r.end());
        return u;
    }
};

inline std::string unparse(const QueryEquation& eq) {
    return unparse(eq.left) + " == " + unparse(eq.right);
}

using Parsed = std::variant<SetExpr, ModelExpr, QueryEquation>;

namespace detail {

class Parser {
public:
    Parser(std::string_view text, const SymbolTable* symbols) : text_(text), symbols_(symbols) {}

    NodePtr expression() {
        NodePtr lhs = term();
        for (;;) {
            skip_space();
            char c = peek();
            unsigned op;
            if (c == '|') op = ops::kOr;
            else if (c == '^') op = ops::kXor;
            else if (c == '-') op = ops::kAndNot;
            else return lhs;
            ++pos_;
            lhs = make_binary(op, lhs, term());
        }
    }

    bool at_equivalence() {
        skip_space();
        return text_.substr(pos_, 2) == "==";
    }
    void consume_equivalence() { pos_ += 2; }

    void expect_end() {
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    }

    std::set<std::string> seen_known;

private:
    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            skip_space();
            if (peek() != '&') return lhs;
            ++pos_;
            lhs = make_binary(ops::kAnd, lhs, factor());
        }
    }

    NodePtr factor() {
        skip_space();
        char c = peek();
        if (c == '~') {
            ++pos_;
            return make_negation(factor());
        }
        if (c == '(') {
            ++pos_;
            NodePtr inner = expression();
            expect(')');
            return inner;
        }
        if (c == '?') {
            ++pos_;
            std::size_t start = pos_;
            std::string name = identifier();
            if (name.empty()) fail("expected a name after '?'", start);
            return make_leaf(std::move(name), true);
        }
        std::size_t start = pos_;
        std::string name = identifier();
        if (name.empty()) {
            if (pos_ >= text_.size()) fail("unexpected end of input");
            fail("unexpected '" + std::string(1, c) + "'");
        }
        if (auto code = op_code(name)) {
            skip_space();
            if (peek() == '(') {
                ++pos_;
                NodePtr a = expression();
                expect(',');
                NodePtr b = expression();
                expect(')');
                return make_binary(*code, a, b);
            }
        }
        if (symbols_ && !(*symbols_)(name)) fail("unknown identifier '" + name + "'", start);
        seen_known.insert(name);
        return make_leaf(std::move(name), false);
    }

    static std::optional<unsigned> op_code(const std::string& name) {
        if (name.size() < 3 || name.size() > 4 || name.compare(0, 2, "op") != 0) return std::nullopt;
        unsigned v = 0;
        for (std::size_t i = 2; i < name.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
            v = v * 10 + static_cast<unsigned>(name[i] - '0');
        }
        if (v >= ops::kCount) return std::nullopt;
        return v;
    }

    std::string identifier() {
        std::size_t start = pos_;
        if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                           text_[pos_] == '_' || text_[pos_] == '.'))
                ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    void expect(char c) {
        skip_space();
        if (peek() != c) {
            if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' before end of input");
            fail(std::string("expected '") + c + "', found '" + text_[pos_] + "'");
        }
        ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
    [[noreturn]] void fail(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

    std::string_view text_;
    const SymbolTable* symbols_;
    std::size_t pos_ = 0;
};

inline DomainTag classify_side(const std::set<std::string>& names, const SymbolTable* symbols) {
    if (!symbols || names.empty()) return DomainTag::Set;
    for (const auto& n : names)
        if ((*symbols)(n) != DomainTag::Model) return DomainTag::Set;
    return DomainTag::Model;
}

}  // namespace detail

inline SetExpr parse_set(std::string_view text, const SymbolTable* symbols = nullptr) {
    detail::Parser p(text, symbols);
    auto node = p.expression();
    p.expect_end();
    return SetExpr(node);
}

inline ModelExpr parse_model(std::string_view text, const SymbolTable* symbols = nullptr) {
    return dualize(parse_set(text, symbols));
}

/// Parses an expression or an equation. With a symbol table, identifiers are
/// checked and a side made only of model identifiers is tagged as a model side.
inline Parsed parse(std::string_view text, const SymbolTable* symbols = nullptr) {
    detail::Parser p(text, symbols);
    auto lhs = p.expression();
    auto left_names = p.seen_known;
    if (p.at_equivalence()) {
        p.consume_equivalence();
        p.seen_known.clear();
        auto rhs = p.expression();
        p.expect_end();
        QueryEquation eq;
        eq.left = SetExpr(lhs);
        eq.right = SetExpr(rhs);
        eq.left_domain = detail::classify_side(left_names, symbols);
        eq.right_domain = detail::classify_side(p.seen_known, symbols);
        return eq;
    }
    p.expect_end();
    if (detail::classify_side(left_names, symbols) == DomainTag::Model) return ModelExpr(lhs);
    return SetExpr(lhs);
}

inline QueryEquation parse_equation(std::string_view text, const SymbolTable* symbols = nullptr) {
    auto parsed = parse(text, symbols);
    if (auto* eq = std::get_if<QueryEquation>(&parsed)) return *eq;
    throw ParseError("expected an equation of the form 'expr == expr'", text.size());
}

}  // namespace metamodel
