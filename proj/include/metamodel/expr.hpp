#pragma once

// Expression trees over pairings. A set expression and its model expression
// share one immutable node graph; the domain tag only decides how leaves and
// negation are read (dataset/complement versus model/not). Dualization is
// therefore a retagging and is structure-preserving by construction.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metamodel/ops.hpp"
#include "metamodel/sets.hpp"

namespace metamodel {

namespace detail {

enum class NodeKind : std::uint8_t { Leaf, Negation, Binary };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind = NodeKind::Leaf;
    unsigned op = 0;
    bool unknown = false;
    std::string name;
    NodePtr left;   // child of a negation, or left operand
    NodePtr right;
};

inline NodePtr make_leaf(std::string name, bool unknown) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Leaf;
    n->name = std::move(name);
    n->unknown = unknown;
    return n;
}

inline NodePtr make_negation(NodePtr child) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Negation;
    n->left = std::move(child);
    return n;
}

inline NodePtr make_binary(unsigned op, NodePtr l, NodePtr r) {
    if (op >= ops::kCount) throw Error("operation code " + std::to_string(op) + " out of range 0..15");
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Binary;
    n->op = op;
    n->left = std::move(l);
    n->right = std::move(r);
    return n;
}

inline bool equal(const NodePtr& a, const NodePtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case NodeKind::Leaf: return a->name == b->name && a->unknown == b->unknown;
        case NodeKind::Negation: return equal(a->left, b->left);
        case NodeKind::Binary:
            return a->op == b->op && equal(a->left, b->left) && equal(a->right, b->right);
    }
    return false;
}

// Infix precedence used by the DSL; 0 means the node renders as an atom.
inline int precedence(const Node& n) {
    if (n.kind != NodeKind::Binary) return 0;
    switch (n.op) {
        case ops::kAnd: return 2;
        case ops::kOr:
        case ops::kXor:
        case ops::kAndNot: return 1;
        default: return 0;
    }
}

inline std::string_view infix_symbol(unsigned op) {
    switch (op) {
        case ops::kAnd: return "&";
        case ops::kOr: return "|";
        case ops::kXor: return "^";
        case ops::kAndNot: return "-";
        default: return {};
    }
}

template <class LeafName>
void unparse_into(const Node& n, std::string& out, const LeafName& leaf_name) {
    switch (n.kind) {
        case NodeKind::Leaf:
            if (n.unknown) out += '?';
            out += leaf_name(n);
            return;
        case NodeKind::Negation: {
            out += '~';
            bool paren = precedence(*n.left) > 0;
            if (paren) out += '(';
            unparse_into(*n.left, out, leaf_name);
            if (paren) out += ')';
            return;
        }
        case NodeKind::Binary: {
            int p = precedence(n);
            if (p == 0) {
                out += "op" + std::to_string(n.op) + "(";
                unparse_into(*n.left, out, leaf_name);
                out += ", ";
                unparse_into(*n.right, out, leaf_name);
                out += ')';
                return;
            }
            int lp = precedence(*n.left);
            int rp = precedence(*n.right);
            bool lparen = lp > 0 && lp < p;
            bool rparen = rp > 0 && rp <= p;
            if (lparen) out += '(';
            unparse_into(*n.left, out, leaf_name);
            if (lparen) out += ')';
            out += ' ';
            out += infix_symbol(n.op);
            out += ' ';
            if (rparen) out += '(';
            unparse_into(*n.right, out, leaf_name);
            if (rparen) out += ')';
            return;
        }
    }
}

}  // namespace detail

struct SetDomain {
    static constexpr std::string_view name = "set";
};
struct ModelDomain {
    static constexpr std::string_view name = "model";
};

template <class Domain>
class Expr {
public:
    using domain = Domain;

    Expr() = default;
    explicit Expr(detail::NodePtr node) : node_(std::move(node)) {}

    static Expr leaf(std::string id) { return Expr(detail::make_leaf(std::move(id), false)); }
    static Expr unknown(std::string name) { return Expr(detail::make_leaf(std::move(name), true)); }
    static Expr binary(unsigned op, const Expr& l, const Expr& r) {
        return Expr(detail::make_binary(op, l.node_, r.node_));
    }

    friend Expr operator~(const Expr& e) { return Expr(detail::make_negation(e.node_)); }
    friend Expr operator&(const Expr& a, const Expr& b) { return binary(ops::kAnd, a, b); }
    friend Expr operator|(const Expr& a, const Expr& b) { return binary(ops::kOr, a, b); }
    friend Expr operator^(const Expr& a, const Expr& b) { return binary(ops::kXor, a, b); }
    friend Expr operator-(const Expr& a, const Expr& b) { return binary(ops::kAndNot, a, b); }

    bool valid() const { return node_ != nullptr; }
    bool is_leaf() const { return node_->kind == detail::NodeKind::Leaf; }
    bool is_negation() const { return node_->kind == detail::NodeKind::Negation; }
    bool is_binary() const { return node_->kind == detail::NodeKind::Binary; }
    bool is_unknown() const { return is_leaf() && node_->unknown; }

    const std::string& name() const { return node_->name; }
    unsigned op() const { return node_->op; }
    Expr child() const { return Expr(node_->left); }
    Expr left() const { return Expr(node_->left); }
    Expr right() const { return Expr(node_->right); }

    const detail::NodePtr& node() const { return node_; }

    friend bool operator==(const Expr& a, const Expr& b) { return detail::equal(a.node_, b.node_); }

private:
    detail::NodePtr node_;
};

using SetExpr = Expr<SetDomain>;
using ModelExpr = Expr<ModelDomain>;

inline ModelExpr dualize(const SetExpr& e) { return ModelExpr(e.node()); }
inline SetExpr dualize_inverse(const ModelExpr& e) { return SetExpr(e.node()); }

/// Hierarchy level of the deepest node below the root; a leaf is 0.
template <class D>
int depth(const Expr<D>& e) {
    if (e.is_leaf()) return 0;
    if (e.is_negation()) return 1 + depth(e.child());
    return 1 + std::max(depth(e.left()), depth(e.right()));
}

template <class D>
std::size_t node_count(const Expr<D>& e) {
    if (e.is_leaf()) return 1;
    if (e.is_negation()) return 1 + node_count(e.child());
    return 1 + node_count(e.left()) + node_count(e.right());
}

/// DSL text with single spaces around infix operators and minimal parentheses.
template <class D>
std::string unparse(const Expr<D>& e) {
    std::string out;
    detail::unparse_into(*e.node(), out, [](const detail::Node& n) -> const std::string& { return n.name; });
    return out;
}

/// Same as unparse but with leaf names passed through `rename`.
template <class D, class Rename>
std::string unparse_with(const Expr<D>& e, Rename&& rename) {
    std::string out;
    detail::unparse_into(*e.node(), out, [&](const detail::Node& n) { return rename(n.name); });
    return out;
}

template <class D>
void collect_leaves(const Expr<D>& e, std::set<std::string>& known, std::set<std::string>& unknown) {
    if (e.is_leaf()) {
        (e.is_unknown() ? unknown : known).insert(e.name());
    } else if (e.is_negation()) {
        collect_leaves(e.child(), known, unknown);
    } else {
        collect_leaves(e.left(), known, unknown);
        collect_leaves(e.right(), known, unknown);
    }
}

template <class D>
std::set<std::string> leaf_names(const Expr<D>& e) {
    std::set<std::string> known, unknown;
    collect_leaves(e, known, unknown);
    return known;
}

template <class D>
std::set<std::string> unknown_names(const Expr<D>& e) {
    std::set<std::string> known, unknown;
    collect_leaves(e, known, unknown);
    return unknown;
}

/// Replaces unknown leaves (and, when `rename_known` is set, known leaves too)
/// according to `bindings`; names without a binding are left untouched.
template <class D>
Expr<D> substitute(const Expr<D>& e, const std::map<std::string, std::string>& bindings,
                   bool rename_known = false) {
    if (e.is_leaf()) {
        if (e.is_unknown() || rename_known) {
            auto it = bindings.find(e.name());
            if (it != bindings.end()) return Expr<D>::leaf(it->second);
        }
        return e;
    }
    if (e.is_negation()) return ~substitute(e.child(), bindings, rename_known);
    return Expr<D>::binary(e.op(), substitute(e.left(), bindings, rename_known),
                           substitute(e.right(), bindings, rename_known));
}

/// De Morgan rewriting: pushes negations onto leaves through and/or/nand/nor
/// and removes double negations. Other operations are kept as they are.
template <class D>
Expr<D> push_negations(const Expr<D>& e) {
    if (e.is_leaf()) return e;
    if (e.is_binary()) {
        switch (e.op()) {
            case ops::kNand: return push_negations(~e.left()) | push_negations(~e.right());
            case ops::kNor: return push_negations(~e.left()) & push_negations(~e.right());
            default: return Expr<D>::binary(e.op(), push_negations(e.left()), push_negations(e.right()));
        }
    }
    Expr<D> c = e.child();
    if (c.is_leaf()) return e;
    if (c.is_negation()) return push_negations(c.child());
    switch (c.op()) {
        case ops::kAnd: return push_negations(~c.left()) | push_negations(~c.right());
        case ops::kOr: return push_negations(~c.left()) & push_negations(~c.right());
        case ops::kNand: return push_negations(c.left()) & push_negations(c.right());
        case ops::kNor: return push_negations(c.left()) | push_negations(c.right());
        default: return ~Expr<D>::binary(c.op(), push_negations(c.left()), push_negations(c.right()));
    }
}

/// One node of an expression hierarchy, labeled in both domains.
struct HierarchyNode {
    int level = 0;
    std::string set_label;
    std::string model_label;
    std::vector<HierarchyNode> children;
};

}  // namespace metamodel
