#pragma once

// Divisibility domain: the universe {lo..hi}, one numeric feature "value",
// base models "r divides x" and datasets w<r> of multiples of r.

#include <cstdio>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metamodel/framework.hpp"
#include "metamodel/search.hpp"

namespace metamodel::numbers {

inline void register_plugins(PluginRegistry& reg) {
    register_generic_plugins(reg);
    reg.add_predicate("numbers.divisible_by", [](std::string_view arg) -> Predicate {
        auto r = parse_int_list(arg);
        if (r.size() != 1 || r[0] <= 0) throw Error("numbers.divisible_by expects a positive radix");
        return [radix = r[0]](const FeatureVector& fv) {
            return static_cast<std::int64_t>(numeric_feature(fv, "value")) % radix == 0;
        };
    });
}

inline const PluginRegistry& registry() {
    static const PluginRegistry reg = [] {
        PluginRegistry r;
        register_plugins(r);
        return r;
    }();
    return reg;
}

inline Framework build_divisibility_framework(std::int64_t lo = 2, std::int64_t hi = 20) {
    if (lo < 2 || lo >= hi) throw Error("divisibility framework needs 2 <= lo < hi");
    const auto& reg = registry();
    Framework fw("numbers", id_range(lo, hi));
    fw.register_feature({"value", FeatureKind::Numeric, "generic.value", reg.extractor("generic.value"), false});
    for (auto r = lo; r <= hi; ++r) {
        std::vector<ElementId> multiples;
        for (auto x = r; x <= hi; x += r)
            if (x >= lo) multiples.push_back(ElementId{x});
        fw.add_dataset("w" + std::to_string(r), std::move(multiples));
    }
    for (auto r = lo; r <= hi; ++r) {
        std::string plugin = "numbers.divisible_by:" + std::to_string(r);
        fw.add_base_model({"m" + std::to_string(r), std::to_string(r) + " divides x", {"value"}, plugin, "",
                           reg.predicate(plugin)});
        fw.pair("w" + std::to_string(r), ModelExpr::leaf("m" + std::to_string(r)));
    }
    fw.set_metadata("domain", "numbers");
    fw.set_metadata("lo", std::to_string(lo));
    fw.set_metadata("hi", std::to_string(hi));
    return fw;
}

/// Independent depth-1 scan built from the plain set operations, used to
/// cross-check the engine's optimum.
struct OracleResult {
    Ratio best{0, 1};
    std::vector<std::string> co_optimal;  // in candidate order
    std::size_t evaluated = 0;
};

inline OracleResult depth1_oracle(const Framework& fw, const std::vector<ElementId>& target_ids) {
    std::vector<ElementId> target;
    for (auto x : target_ids)
        if (fw.universe()->contains(x)) target.push_back(x);
    Dataset goal("target", fw.universe(), target);
    const Dataset& env = fw.environment();
    std::vector<std::pair<std::string, Dataset>> leaves;
    for (const auto& p : fw.pairings())
        if (!p.dummy) leaves.emplace_back(p.id, fw.dataset(p.id));

    OracleResult out;
    bool any = false;
    auto consider = [&](const std::string& text, const Dataset& d) {
        ++out.evaluated;
        if (d.empty() && !goal.empty()) return;
        Ratio r = jaccard(d, goal);
        if (r.num == 0) return;
        if (!any || r > out.best) {
            out.best = r;
            out.co_optimal.clear();
            any = true;
        }
        if (r == out.best) out.co_optimal.push_back(text);
    };
    auto c = [&](const Dataset& d) { return complement(d, env); };
    for (const auto& [a, da] : leaves) {
        consider(a, da);
        consider("~" + a, c(da));
    }
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        for (std::size_t j = i + 1; j < leaves.size(); ++j) {
            const auto& [a, A] = leaves[i];
            const auto& [b, B] = leaves[j];
            consider(a + " & " + b, intersect(A, B));
            consider("~(" + a + " & " + b + ")", c(intersect(A, B)));
            consider("~" + a + " & " + b, intersect(c(A), B));
            consider(b + " - " + a, difference(B, A));
            consider(a + " & ~" + b, intersect(A, c(B)));
            consider(a + " - " + b, difference(A, B));
            consider(a + " | " + b, set_union(A, B));
            consider("~(" + a + " | " + b + ")", c(set_union(A, B)));
            consider("~" + a + " | " + b, set_union(c(A), B));
            consider(a + " | ~" + b, set_union(A, c(B)));
            consider(a + " ^ " + b, sym_difference(A, B));
            consider("~(" + a + " ^ " + b + ")", c(sym_difference(A, B)));
        }
    }
    return out;
}

struct CaseQuery {
    std::string name;
    std::vector<ElementId> target;  // as listed, before cleaning
    Ratio published_lambda;
    std::string published_text;               // the value as published
    std::vector<std::string> published_exprs;  // expressions named with it
};

inline std::vector<CaseQuery> case_queries() {
    std::vector<ElementId> q1 = ids({2, 4, 6, 8, 10, 12, 14, 3, 6, 9, 12, 15});
    return {
        {"multiples of 2 and 3", q1, Ratio{10, 13}, "0.769", {"w2 | w3"}},
        {"8, 10, 12, 14", ids({8, 10, 12, 14}), Ratio{1, 2}, "0.5", {"w12 | w14", "w4 ^ w10"}},
        {"odd numbers", ids({1, 3, 5, 7, 9, 11, 13, 15, 17, 19}), Ratio{1, 1}, "1", {"~w2"}},
        {"single 3", ids({3}), Ratio{1, 3}, "1/3 (5 combinations)", {}},
        {"multiples of 4", ids({4, 8, 12, 16, 20}), Ratio{1, 1}, "1", {"w4", "w2 & w4"}},
        {"primes", ids({2, 3, 5, 7, 11, 13, 17, 19}), Ratio{7, 8}, "0.875", {}},
    };
}

struct CaseRow {
    CaseQuery query;
    SearchReport report;
    OracleResult oracle;
    bool engine_matches_oracle = false;
    bool engine_matches_published = false;
    std::vector<std::string> missing_published_exprs;
};

inline std::vector<CaseRow> run_case_queries(const Framework& fw, SearchConfig cfg = {}) {
    cfg.top_k = std::max<std::size_t>(cfg.top_k, 64);
    std::vector<CaseRow> rows;
    for (auto& q : case_queries()) {
        CaseRow row;
        row.report = solve_data_driven(q.target, fw, cfg);
        row.oracle = depth1_oracle(fw, q.target);
        Ratio best = row.report.best.value_or(Ratio{0, 1});
        row.engine_matches_oracle = best == row.oracle.best && row.report.co_optimal == row.oracle.co_optimal.size();
        row.engine_matches_published = best == q.published_lambda;
        for (const auto& e : q.published_exprs) {
            bool found = std::any_of(row.report.results.begin(), row.report.results.end(),
                                     [&](const MatchResult& r) { return r.text == e && r.lambda == best; });
            if (!found) row.missing_published_exprs.push_back(e);
        }
        row.query = std::move(q);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string format_ratio(Ratio r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s (%.4f)", to_string(r).c_str(), r.value());
    return buf;
}

inline std::string format_case_table(const std::vector<CaseRow>& rows) {
    std::string out;
    char line[512];
    std::snprintf(line, sizeof line, "%-22s %-18s %-18s %-22s %-6s %s\n", "query", "engine", "oracle", "published",
                  "co-opt", "best expressions");
    out += line;
    for (const auto& r : rows) {
        Ratio best = r.report.best.value_or(Ratio{0, 1});
        std::string exprs;
        for (const auto& m : r.report.results) {
            if (m.lambda != best) break;
            if (!exprs.empty()) exprs += ", ";
            exprs += m.text;
        }
        std::snprintf(line, sizeof line, "%-22s %-18s %-18s %-22s %-6zu %s\n", r.query.name.c_str(),
                      format_ratio(best).c_str(), format_ratio(r.oracle.best).c_str(), r.query.published_text.c_str(),
                      r.report.co_optimal, exprs.c_str());
        out += line;
        for (const auto& w : r.report.warnings) out += "  warning: " + w + "\n";
        if (!r.engine_matches_published)
            out += "  discrepancy: published value " + r.query.published_text + " differs from the exhaustive optimum " +
                   to_string(r.oracle.best) + "\n";
        if (!r.engine_matches_oracle) out += "  ERROR: engine and oracle disagree\n";
    }
    return out;
}

}  // namespace metamodel::numbers
