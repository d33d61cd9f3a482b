#pragma once

// Query engine: enumerates combinations of paired datasets and ranks them by
// Jaccard similarity against a target. Exact solving is the special case of
// a best score of 1; approximate solving keeps everything above a threshold.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metamodel/framework.hpp"

namespace metamodel {

/// The twelve pairwise forms. Both spellings of each directed difference are
/// kept (~A & B next to B - A): duplicates by extension are reported rather
/// than filtered, so they count separately among co-optimal results.
enum class Form : std::uint8_t {
    And,        // A & B
    Nand,       // ~(A & B)
    NotAAndB,   // ~A & B
    BMinusA,    // B - A
    AAndNotB,   // A & ~B
    AMinusB,    // A - B
    Or,         // A | B
    Nor,        // ~(A | B)
    NotAOrB,    // ~A | B
    AOrNotB,    // A | ~B
    Xor,        // A ^ B
    Xnor,       // ~(A ^ B)
};

inline constexpr std::array<Form, 12> kCatalog = {
    Form::And,     Form::Nand,    Form::NotAAndB, Form::BMinusA, Form::AAndNotB, Form::AMinusB,
    Form::Or,      Form::Nor,     Form::NotAOrB,  Form::AOrNotB, Form::Xor,      Form::Xnor};

/// Truth table code of a form over (A, B).
constexpr unsigned form_code(Form f) {
    constexpr std::array<unsigned, 12> codes = {ops::kAnd, ops::kNand, ops::kNotAnd, ops::kNotAnd,
                                                ops::kAndNot, ops::kAndNot, ops::kOr, ops::kNor,
                                                ops::kNotOr, ops::kOrNot, ops::kXor, ops::kXnor};
    return codes[static_cast<std::size_t>(f)];
}

constexpr std::string_view form_name(Form f) {
    constexpr std::array<std::string_view, 12> names = {
        "and", "nand", "not-a-and-b", "b-minus-a", "a-and-not-b", "a-minus-b",
        "or",  "nor",  "not-a-or-b",  "a-or-not-b", "xor",        "xnor"};
    return names[static_cast<std::size_t>(f)];
}

inline std::optional<Form> form_from_name(std::string_view s) {
    for (auto f : kCatalog)
        if (form_name(f) == s) return f;
    return std::nullopt;
}

template <class D>
Expr<D> build_form(Form f, const Expr<D>& a, const Expr<D>& b) {
    switch (f) {
        case Form::And: return a & b;
        case Form::Nand: return ~(a & b);
        case Form::NotAAndB: return ~a & b;
        case Form::BMinusA: return b - a;
        case Form::AAndNotB: return a & ~b;
        case Form::AMinusB: return a - b;
        case Form::Or: return a | b;
        case Form::Nor: return ~(a | b);
        case Form::NotAOrB: return ~a | b;
        case Form::AOrNotB: return a | ~b;
        case Form::Xor: return a ^ b;
        case Form::Xnor: return ~(a ^ b);
    }
    return a;
}

struct SearchConfig {
    int max_depth = 1;
    std::vector<Form> op_set{kCatalog.begin(), kCatalog.end()};
    Ratio threshold{0, 1};
    std::size_t top_k = 10;
    bool include_unary = true;
    std::vector<std::string> dummy_whitelist;

    void validate() const {
        if (max_depth < 1) throw Error("search depth must be at least 1");
        if (op_set.empty()) throw Error("search operation set is empty");
        if (threshold.value() > 1.0) throw Error("search threshold must lie in [0, 1]");
    }
};

struct Operand {
    SetExpr expr;
    IndexSet value;
};

/// Enumerates the candidate space in its fixed order: unary forms per leaf,
/// pairwise forms over leaf pairs i < j, then for each further depth every
/// expression of the previous level combined with every leaf. `sink` receives
/// (expression, value); values are computed alongside, not re-evaluated.
template <class Sink>
void enumerate_candidates(const std::vector<Operand>& leaves, const SearchConfig& cfg, Sink&& sink) {
    cfg.validate();
    if (cfg.include_unary) {
        for (const auto& a : leaves) {
            sink(a.expr, a.value);
            sink(~a.expr, a.value.complement());
        }
    }
    std::vector<Operand> level;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        for (std::size_t j = i + 1; j < leaves.size(); ++j) {
            for (auto f : cfg.op_set) {
                Operand c{build_form(f, leaves[i].expr, leaves[j].expr),
                          IndexSet::apply(form_code(f), leaves[i].value, leaves[j].value)};
                sink(c.expr, c.value);
                if (cfg.max_depth > 1) level.push_back(std::move(c));
            }
        }
    }
    for (int d = 2; d <= cfg.max_depth; ++d) {
        std::vector<Operand> next;
        for (const auto& e : level) {
            for (const auto& leaf : leaves) {
                for (auto f : cfg.op_set) {
                    Operand c{build_form(f, e.expr, leaf.expr), IndexSet::apply(form_code(f), e.value, leaf.value)};
                    sink(c.expr, c.value);
                    if (d < cfg.max_depth) next.push_back(std::move(c));
                }
            }
        }
        level = std::move(next);
    }
}

struct MatchResult {
    SetExpr expr;
    ModelExpr dual;
    std::string text;       // set-domain form (for equations: the bound equation)
    std::string dual_text;  // model-domain form, pairing ids shown as model ids
    Ratio lambda;
    bool exact = false;
    std::map<std::string, std::string> bindings;
    std::size_t nodes = 0;
};

/// Ranking: lambda descending, node count ascending, then text.
inline bool ranks_before(const MatchResult& a, const MatchResult& b) {
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    if (a.nodes != b.nodes) return a.nodes < b.nodes;
    if (a.text != b.text) return a.text < b.text;
    return a.bindings < b.bindings;
}

struct SearchReport {
    std::vector<MatchResult> results;
    std::optional<Ratio> best;
    std::size_t co_optimal = 0;  // candidates scoring exactly `best`
    std::size_t evaluated = 0;
    std::vector<std::string> warnings;
    std::vector<ElementId> target;
    std::vector<std::pair<std::string, Ratio>> per_dataset;  // model-driven queries only
};

namespace detail {

/// Keeps every exact match plus the top_k approximate ones.
class ResultCollector {
public:
    ResultCollector(const SearchConfig& cfg, const Framework& fw) : cfg_(cfg), fw_(fw) {}

    void offer(const SetExpr& e, Ratio lambda, std::map<std::string, std::string> bindings = {},
               std::string text = {}, std::size_t nodes = 0) {
        ++evaluated_;
        if (!(lambda > cfg_.threshold)) return;
        if (!best_ || lambda > *best_) {
            best_ = lambda;
            co_optimal_ = 0;
        }
        if (lambda == *best_) ++co_optimal_;
        bool exact = lambda.num == lambda.den;
        if (!exact && approx_.size() >= cfg_.top_k && cutoff_ && lambda < *cutoff_) return;
        MatchResult r;
        r.expr = e;
        r.dual = dualize(e);
        r.text = text.empty() ? unparse(e) : std::move(text);
        r.dual_text = render_model(r.dual, fw_);
        r.lambda = lambda;
        r.exact = exact;
        r.bindings = std::move(bindings);
        r.nodes = nodes ? nodes : node_count(e);
        (exact ? exact_ : approx_).push_back(std::move(r));
        if (approx_.size() > 2 * cfg_.top_k + 64) prune();
    }

    SearchReport finish() {
        prune();
        SearchReport rep;
        std::sort(exact_.begin(), exact_.end(), ranks_before);
        rep.results = std::move(exact_);
        rep.results.insert(rep.results.end(), approx_.begin(), approx_.end());
        rep.best = best_;
        rep.co_optimal = co_optimal_;
        rep.evaluated = evaluated_;
        return rep;
    }

private:
    void prune() {
        std::sort(approx_.begin(), approx_.end(), ranks_before);
        if (approx_.size() > cfg_.top_k) approx_.resize(cfg_.top_k);
        if (approx_.size() == cfg_.top_k && !approx_.empty()) cutoff_ = approx_.back().lambda;
    }

    const SearchConfig& cfg_;
    const Framework& fw_;
    std::vector<MatchResult> exact_, approx_;
    std::optional<Ratio> best_, cutoff_;
    std::size_t co_optimal_ = 0;
    std::size_t evaluated_ = 0;
};

inline Ratio jaccard(const IndexSet& a, const IndexSet& b) {
    std::size_t u = IndexSet::union_count(a, b);
    if (u == 0) return Ratio{1, 1};
    return Ratio{IndexSet::intersection_count(a, b), u};
}

inline std::vector<const Pairing*> search_leaves(const Framework& fw, const SearchConfig& cfg) {
    std::vector<const Pairing*> out;
    for (const auto& p : fw.pairings()) {
        bool listed = std::find(cfg.dummy_whitelist.begin(), cfg.dummy_whitelist.end(), p.id) !=
                      cfg.dummy_whitelist.end();
        if (!p.dummy || listed) out.push_back(&p);
    }
    return out;
}

}  // namespace detail

/// The candidate stream for a framework, in enumeration order.
inline std::vector<SetExpr> candidates(const Framework& fw, const SearchConfig& cfg = {}) {
    Evaluator ev(fw);
    std::vector<Operand> leaves;
    for (const auto* p : detail::search_leaves(fw, cfg)) leaves.push_back({SetExpr::leaf(p->id), ev.set_leaf(p->id)});
    std::vector<SetExpr> out;
    enumerate_candidates(leaves, cfg, [&](const SetExpr& e, const IndexSet&) { out.push_back(e); });
    return out;
}

/// Explains a target dataset by combinations of existing pairings. Target
/// elements outside the universe are dropped with a warning; elements outside
/// the environment are first ingested into a working copy so that every
/// pairing has been checked against them.
inline SearchReport solve_data_driven(std::vector<ElementId> target, const Framework& fw,
                                      const SearchConfig& cfg = {}) {
    cfg.validate();
    if (detail::search_leaves(fw, cfg).empty()) throw Error("empty framework: no pairings to search");
    std::vector<std::string> warnings;
    std::size_t raw = target.size();
    std::vector<ElementId> dropped;
    std::erase_if(target, [&](ElementId x) {
        if (fw.universe()->contains(x)) return false;
        dropped.push_back(x);
        return true;
    });
    if (!dropped.empty()) {
        detail::normalize(dropped);
        warnings.push_back("dropped target elements outside the universe: " + detail::list_ids(dropped));
    }
    detail::normalize(target);
    if (target.size() + dropped.size() < raw)
        warnings.push_back("collapsed duplicate target elements (" + std::to_string(raw) + " listed, " +
                           std::to_string(target.size()) + " distinct)");

    std::optional<Framework> working;
    std::vector<ElementId> fresh;
    for (auto x : target)
        if (!fw.environment().contains(x)) fresh.push_back(x);
    if (!fresh.empty()) {
        working.emplace(fw);
        for (auto x : fresh) working->ingest_element(x);
        warnings.push_back("ingested " + std::to_string(fresh.size()) + " new element(s) before the search: " +
                           detail::list_ids(fresh));
    }
    const Framework& f = working ? *working : fw;

    Evaluator ev(f);
    std::vector<Operand> leaves;
    for (const auto* p : detail::search_leaves(f, cfg)) leaves.push_back({SetExpr::leaf(p->id), ev.set_leaf(p->id)});
    IndexSet goal = ev.to_index_set(Dataset("target", f.universe(), target));

    detail::ResultCollector collect(cfg, f);
    enumerate_candidates(leaves, cfg, [&](const SetExpr& e, const IndexSet& v) {
        if (v.none() && !goal.none()) {
            collect.offer(e, Ratio{0, 1});
            return;
        }
        collect.offer(e, detail::jaccard(v, goal));
    });
    SearchReport rep = collect.finish();
    rep.warnings = std::move(warnings);
    rep.target = std::move(target);
    return rep;
}

inline SearchReport solve_data_driven(const Dataset& target, const Framework& fw, const SearchConfig& cfg = {}) {
    if (!same_universe(target.universe(), fw.universe()))
        throw UniverseMismatch(target.id(), fw.universe()->name());
    return solve_data_driven(std::vector<ElementId>(target.members().begin(), target.members().end()), fw, cfg);
}

/// Explains the extension of a model statement; also scores it directly
/// against each paired dataset.
inline SearchReport solve_model_driven(const ModelExpr& target, const Framework& fw, const SearchConfig& cfg = {}) {
    Dataset ext = extension(target, fw);
    SearchReport rep = solve_data_driven(ext, fw, cfg);
    for (const auto* p : detail::search_leaves(fw, cfg))
        rep.per_dataset.emplace_back(p->id, jaccard(fw.dataset(p->id), ext));
    return rep;
}

/// Binds up to two unknowns to distinct pairings and scores the two sides of
/// the equation against each other. Model identifiers are read through their
/// pairings, which is the set-domain reading of the model side.
inline SearchReport solve_equation(const QueryEquation& eq, const Framework& fw, const SearchConfig& cfg = {}) {
    cfg.validate();
    auto unknowns = eq.unknowns();
    if (unknowns.empty()) throw Error("equation has no unknowns");
    if (unknowns.size() > 2) throw Error("unsupported: equations with more than 2 unknowns");
    auto pool = detail::search_leaves(fw, cfg);
    if (pool.empty()) throw Error("empty framework: no pairings to bind");

    std::vector<std::string> names(unknowns.begin(), unknowns.end());
    Evaluator ev(fw);
    detail::ResultCollector collect(cfg, fw);
    auto score = [&](const std::map<std::string, std::string>& b) {
        SetExpr l = substitute(eq.left, b);
        SetExpr r = substitute(eq.right, b);
        Ratio lambda = detail::jaccard(ev.eval_set(l), ev.eval_set(r));
        QueryEquation bound{l, r, eq.left_domain, eq.right_domain};
        collect.offer(l, lambda, b, unparse(bound), node_count(l) + node_count(r));
    };
    for (const auto* a : pool) {
        if (names.size() == 1) {
            score({{names[0], a->id}});
            continue;
        }
        for (const auto* b : pool)
            if (a != b) score({{names[0], a->id}, {names[1], b->id}});
    }
    return collect.finish();
}

inline SearchReport solve_equation(std::string_view text, const Framework& fw, const SearchConfig& cfg = {}) {
    auto symbols = fw.symbols();
    return solve_equation(parse_equation(text, &symbols), fw, cfg);
}

}  // namespace metamodel
