// Command-line front end: framework lifecycle, queries, domain demos and exports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "metamodel/iris.hpp"
#include "metamodel/metamodel.hpp"

namespace fs = std::filesystem;
using namespace metamodel;

namespace {

struct Globals {
    std::string framework;
    std::string out;
    std::string format = "text";
    std::int64_t seed = 0;
};

// Numbers are printed the way the JSON writer prints them, so text and JSON
// outputs carry identical digits.
std::string num(double x) { return json(x).dump(); }

std::string ratio_text(Ratio r) { return to_string(r) + " = " + num(r.value()); }

class Output {
public:
    Output(std::string verb, const Globals& g) : verb_(std::move(verb)), g_(g) {
        meta_ = {{"tool", "metamodel"},
                 {"version", std::string(kVersion)},
                 {"verb", verb_},
                 {"format", g.format},
                 {"seed", g.seed},
                 {"threads", worker_count()}};
        if (!g.framework.empty()) meta_["framework"] = g.framework;
        if (!g.out.empty()) meta_["out"] = g.out;
    }

    void config(const std::string& key, json value) { meta_["config"][key] = std::move(value); }
    void line(const std::string& s) { text_ += s + "\n"; }
    json& result() { return result_; }

    void flush() const {
        if (g_.format == "json") {
            std::cout << json{{"meta", meta_}, {"result", result_}}.dump(2) << "\n";
            return;
        }
        std::cout << "# metamodel " << kVersion << " " << verb_ << "\n";
        std::cout << "# seed " << g_.seed << " (no randomness in this path), threads " << worker_count() << "\n";
        if (meta_.contains("config"))
            for (const auto& [k, v] : meta_["config"].items()) std::cout << "# " << k << " = " << v.dump() << "\n";
        std::cout << text_;
    }

private:
    std::string verb_;
    const Globals& g_;
    json meta_;
    json result_ = json::object();
    std::string text_;
};

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

std::vector<ElementId> parse_element_list(const std::string& text) {
    std::string s = text;
    for (char& c : s)
        if (c == '{' || c == '}' || c == ' ') c = ',';
    std::vector<ElementId> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        auto dots = item.find("..");
        try {
            if (dots != std::string::npos) {
                auto lo = std::stoll(item.substr(0, dots)), hi = std::stoll(item.substr(dots + 2));
                if (hi < lo) throw Error("empty range '" + item + "'");
                for (auto v = lo; v <= hi; ++v) out.push_back(ElementId{v});
            } else {
                std::size_t used = 0;
                out.push_back(ElementId{std::stoll(item, &used)});
                if (used != item.size()) throw std::invalid_argument(item);
            }
        } catch (const std::logic_error&) {
            throw Error("expected element ids like '1,2,5' or '1..20', got '" + item + "'");
        }
    }
    return out;
}

bool looks_like_element_list(const std::string& s) {
    static const std::regex re(R"(^\s*\{?[\s\d,.\-]*\}?\s*$)");
    return std::regex_match(s, re) && std::any_of(s.begin(), s.end(), ::isdigit);
}

Framework require_framework(const Globals& g) {
    if (g.framework.empty()) throw CLI::ValidationError("--framework", "this verb needs --framework PATH");
    return load_framework(g.framework);
}

json describe_framework(const Framework& fw) {
    json pairs = json::array();
    for (const auto& p : fw.pairings())
        pairs.push_back({{"id", p.id}, {"model", render_model(p.model, fw)}, {"size", fw.dataset(p.id).size()},
                         {"dummy", p.dummy}, {"unverified", p.unverified}});
    return {{"universe", fw.universe()->name()},
            {"universe_size", fw.n_universe()},
            {"environment_size", fw.environment().size()},
            {"datasets", fw.datasets().size()},
            {"base_models", fw.base_models().size()},
            {"pairings", pairs},
            {"bijectivity_sweep", "passed"}};
}

void print_framework_summary(Output& o, const json& d) {
    o.line("universe " + d["universe"].get<std::string>() + " (" + d["universe_size"].dump() + " elements), S_E has " +
           d["environment_size"].dump() + " elements");
    o.line(d["datasets"].dump() + " datasets, " + d["base_models"].dump() + " base models");
    for (const auto& p : d["pairings"]) {
        std::string flags = p["dummy"].get<bool>() ? " [dummy]" : (p["unverified"].get<bool>() ? " [unverified]" : "");
        o.line("  " + p["id"].get<std::string>() + " <-> " + p["model"].get<std::string>() + "  |" +
               p["size"].dump() + "|" + flags);
    }
    o.line("bijectivity sweep passed");
}

void print_results(Output& o, const SearchReport& rep) {
    for (const auto& w : rep.warnings) o.line("warning: " + w);
    o.line("evaluated " + std::to_string(rep.evaluated) + " candidates");
    if (rep.best) o.line("best " + ratio_text(*rep.best) + ", " + std::to_string(rep.co_optimal) + " co-optimal");
    else o.line("no result above the threshold");
    for (const auto& r : rep.results) {
        std::string b;
        for (const auto& [k, v] : r.bindings) b += (b.empty() ? "  [" : ", ") + k + "=" + v;
        if (!b.empty()) b += "]";
        o.line("  " + ratio_text(r.lambda) + (r.exact ? "  exact  " : "         ") + r.text + "  <->  " + r.dual_text + b);
    }
}

SearchConfig search_config(int depth, std::size_t top_k, const std::string& threshold, const std::string& ops) {
    SearchConfig cfg;
    cfg.max_depth = depth;
    cfg.top_k = top_k;
    if (!threshold.empty()) {
        auto slash = threshold.find('/');
        try {
            if (slash != std::string::npos)
                cfg.threshold = Ratio(std::stoull(threshold.substr(0, slash)), std::stoull(threshold.substr(slash + 1)));
            else if (threshold == "0")
                cfg.threshold = Ratio(0, 1);
            else
                throw Error("");
        } catch (const std::exception&) {
            throw CLI::ValidationError("--threshold", "expected a fraction like 1/2");
        }
    }
    if (!ops.empty()) {
        cfg.op_set.clear();
        std::string item;
        std::istringstream in(ops);
        while (std::getline(in, item, ',')) {
            auto f = form_from_name(item);
            if (!f) throw CLI::ValidationError("--ops", "unknown form '" + item + "'");
            cfg.op_set.push_back(*f);
        }
    }
    cfg.validate();
    return cfg;
}

std::vector<stochastic::PointSet> read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open points file '" + path + "'");
    std::vector<stochastic::PointSet> sets;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string c;
        std::istringstream ls(line);
        while (std::getline(ls, c, ',')) cells.push_back(c);
        if (cells.size() != 3) throw Error(path + ":" + std::to_string(lineno) + ": expected x,y,label");
        double x = 0, y = 0;
        try {
            x = std::stod(cells[0]);
            y = std::stod(cells[1]);
        } catch (const std::exception&) {
            if (lineno == 1) continue;
            throw Error(path + ":" + std::to_string(lineno) + ": non-numeric coordinate");
        }
        auto it = std::find_if(sets.begin(), sets.end(), [&](const auto& s) { return s.id == cells[2]; });
        if (it == sets.end()) {
            sets.push_back({cells[2], {}});
            it = sets.end() - 1;
        }
        it->points.push_back({x, y});
    }
    if (sets.empty()) throw Error("points file '" + path + "' has no rows");
    return sets;
}

struct KdeFlags {
    double bandwidth = 0;
    double chi = 0.97;
    std::size_t resolution = 256;

    stochastic::KdeConfig config() const {
        stochastic::KdeConfig c;
        if (bandwidth > 0) c.bandwidth = bandwidth;
        c.chi = chi;
        c.resolution = resolution;
        return c;
    }
    void add(CLI::App* app) {
        app->add_option("--bandwidth", bandwidth, "kernel sigma; 0 selects the default rule")->check(CLI::NonNegativeNumber);
        app->add_option("--chi", chi, "support-region mass fraction")->check(CLI::Range(0.0, 1.0));
        app->add_option("--resolution", resolution, "grid cells per axis")->check(CLI::Range(8, 4096));
    }
    void echo(Output& o) const {
        o.config("bandwidth", bandwidth > 0 ? json(bandwidth) : json("default (isotropic geometric mean of std*N^-1/6)"));
        o.config("chi", chi);
        o.config("resolution", resolution);
        o.config("margin_sigmas", 3);
        o.config("truncation_sigmas", 4);
    }
};

void report_stochastic(Output& o, const stochastic::StochasticFramework& sfw, const std::string& out_dir) {
    const auto& sets = sfw.datasets();
    json masses = json::array(), cells = json::array(), lam = json::array();
    o.line("bandwidth sigma " + num(sfw.bandwidth().sigma) + " (per-axis " + num(sfw.bandwidth().sigma_x) + ", " +
           num(sfw.bandwidth().sigma_y) + ")");
    o.line("grid " + std::to_string(sfw.grid().nx()) + " x " + std::to_string(sfw.grid().ny()));
    for (std::size_t i = 0; i < sets.size(); ++i) {
        masses.push_back(sfw.densities()[i].mass());
        cells.push_back(sfw.regions()[i].size());
        o.line(sets[i].id + ": " + std::to_string(sets[i].points.size()) + " points, mass " +
               num(sfw.densities()[i].mass()) + ", support region " + std::to_string(sfw.regions()[i].size()) +
               " cells holding " + num(mass_in(sfw.densities()[i], sfw.regions()[i].mask)));
        json row = json::array();
        for (std::size_t j = 0; j < sets.size(); ++j) row.push_back(sfw.lambda(i, j));
        lam.push_back(row);
    }
    o.line("stochastic Lambda between support regions:");
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t j = i + 1; j < sets.size(); ++j)
            o.line("  Lambda(" + sets[i].id + ", " + sets[j].id + ") = " + num(lam[i][j].get<double>()));
    json ids = json::array();
    for (const auto& s : sets) ids.push_back(s.id);
    o.result()["datasets"] = ids;
    o.result()["bandwidth"] = {{"sigma", sfw.bandwidth().sigma},
                               {"sigma_x", sfw.bandwidth().sigma_x},
                               {"sigma_y", sfw.bandwidth().sigma_y}};
    o.result()["masses"] = masses;
    o.result()["region_cells"] = cells;
    o.result()["lambda"] = lam;
    if (sets.size() >= 2) {
        auto map = bayes_decision_map(sfw);
        std::vector<std::size_t> counts(sets.size(), 0);
        for (int l : map.labels)
            if (l >= 0) ++counts[static_cast<std::size_t>(l)];
        o.result()["bayes_cells"] = counts;
        std::string s;
        for (std::size_t i = 0; i < sets.size(); ++i) s += " " + sets[i].id + "=" + std::to_string(counts[i]);
        o.line("Bayes decision map cells:" + s);
        if (!out_dir.empty()) {
            std::string pgm = "P2\n" + std::to_string(map.grid.nx()) + " " + std::to_string(map.grid.ny()) + "\n" +
                              std::to_string(sets.size()) + "\n";
            for (std::size_t r = map.grid.ny(); r-- > 0;) {
                for (std::size_t c = 0; c < map.grid.nx(); ++c)
                    pgm += std::to_string(map.labels[map.grid.index(c, r)] + 1) + (c + 1 < map.grid.nx() ? " " : "");
                pgm += "\n";
            }
            write_file(fs::path(out_dir) / "bayes.pgm", pgm);
        }
    }
    if (!out_dir.empty()) {
        for (std::size_t i = 0; i < sets.size(); ++i) {
            write_file(fs::path(out_dir) / (sets[i].id + "_density.pgm"), stochastic::to_pgm(sfw.densities()[i]));
            write_file(fs::path(out_dir) / (sets[i].id + "_density.csv"), stochastic::to_csv(sfw.densities()[i]));
            write_file(fs::path(out_dir) / (sets[i].id + "_region.pbm"),
                       stochastic::to_pbm(sfw.grid(), sfw.regions()[i].mask));
        }
        o.line("wrote images and CSV grids to " + out_dir);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dataset/model pairing framework: set-model queries, lattice, number and KDE demos"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--framework", g.framework, "framework JSON file");
    app.add_option("--out", g.out, "output file or directory");
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--seed", g.seed, "seed (recorded; no core path draws random numbers)");

    // init
    auto* init = app.add_subcommand("init", "create a framework file");
    std::string universe = "1..20", uname = "universe", domain = "empty";
    int L = 3;
    std::int64_t lo = 2, hi = 20;
    init->add_option("--universe", universe, "element ids, e.g. 1..20 or 1,2,5");
    init->add_option("--name", uname, "universe name");
    init->add_option("--domain", domain, "empty | numbers | lattice")->check(CLI::IsMember({"empty", "numbers", "lattice"}));
    init->add_option("--L", L, "lattice side")->check(CLI::Range(1, 4));
    init->add_option("--lo", lo, "smallest number");
    init->add_option("--hi", hi, "largest number");

    auto* load = app.add_subcommand("load", "load a framework and run the bijectivity sweep");
    auto* save = app.add_subcommand("save", "load a framework and write it normalized to --out");

    auto* ingest = app.add_subcommand("ingest", "ingest elements or a base model");
    std::vector<std::string> elements;
    std::string model_id, model_plugin, model_dsl, dataset_id, description;
    std::vector<std::string> required;
    ingest->add_option("elements", elements, "element ids to add to S_E");
    ingest->add_option("--model", model_id, "id of a base model to ingest");
    ingest->add_option("--plugin", model_plugin, "predicate plugin reference, e.g. numbers.divisible_by:7");
    ingest->add_option("--predicate", model_dsl, "predicate as a model expression over existing base models");
    ingest->add_option("--requires", required, "required feature ids");
    ingest->add_option("--dataset", dataset_id, "id of the dataset created for the model");
    ingest->add_option("--description", description, "model description");

    auto* query = app.add_subcommand("query", "data-driven, model-driven or equation query");
    std::string qtext, threshold, ops;
    int depth = 1;
    std::size_t top_k = 10;
    query->add_option("query", qtext, "element list, model expression, or equation with ?unknowns")->required();
    query->add_option("--depth", depth, "maximum search depth")->check(CLI::Range(1, 4));
    query->add_option("--top-k", top_k, "approximate results kept");
    query->add_option("--threshold", threshold, "minimum Lambda as a fraction, results need Lambda > T");
    query->add_option("--ops", ops, "comma-separated form names");

    auto* ldemo = app.add_subcommand("lattice-demo", "lattice pattern framework, size table and puzzle");
    int demo_L = 3;
    ldemo->add_option("--L", demo_L, "lattice side")->check(CLI::Range(1, 4));

    auto* ndemo = app.add_subcommand("numbers-demo", "divisibility framework and the case queries");
    std::int64_t nlo = 2, nhi = 20;
    ndemo->add_option("--lo", nlo, "smallest number");
    ndemo->add_option("--hi", nhi, "largest number");

    auto* idemo = app.add_subcommand("iris-demo", "stochastic framework on the iris fixture");
    std::string iris_path = METAMODEL_DATA_DIR "/iris.csv";
    int fx = 2, fy = 3;
    KdeFlags ikde;
    idemo->add_option("--data", iris_path, "iris CSV");
    idemo->add_option("--fx", fx, "first feature (1-based column)")->check(CLI::Range(1, 4));
    idemo->add_option("--fy", fy, "second feature (1-based column)")->check(CLI::Range(1, 4));
    ikde.add(idemo);

    auto* sfit = app.add_subcommand("stochastic-fit", "KDE framework from an x,y,label CSV");
    std::string points_path;
    KdeFlags skde;
    sfit->add_option("points", points_path, "CSV with x,y,label rows")->required();
    skde.add(sfit);

    auto* bip = app.add_subcommand("export-bipartite", "element/pairing network as CSV (text) or JSON");

    auto* mall = app.add_subcommand("malleability", "malleability of probabilities or of a graph");
    std::vector<double> probs;
    std::string graph_text, op_name = "edge-removal";
    mall->add_option("--probs", probs, "probabilities summing to 1")->delimiter(',');
    mall->add_option("--graph", graph_text, "graph as N:u-v,u-v,...");
    mall->add_option("--operator", op_name, "change operator")
        ->check(CLI::IsMember({"edge-removal", "edge-addition", "node-removal"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (init->parsed()) {
            Output o("init", g);
            o.config("domain", domain);
            Framework fw = [&] {
                if (domain == "numbers") {
                    o.config("lo", lo);
                    o.config("hi", hi);
                    return numbers::build_divisibility_framework(lo, hi);
                }
                if (domain == "lattice") {
                    o.config("L", L);
                    return lattice::build_lattice_framework(L).framework;
                }
                o.config("universe", universe);
                Framework f(uname, parse_element_list(universe));
                PluginRegistry reg;
                register_generic_plugins(reg);
                f.register_feature({"value", FeatureKind::Numeric, "generic.value", reg.extractor("generic.value"), false});
                return f;
            }();
            if (g.out.empty()) throw CLI::ValidationError("--out", "init needs --out PATH");
            save_framework(fw, g.out);
            o.result() = describe_framework(fw);
            print_framework_summary(o, o.result());
            o.line("wrote " + g.out);
            o.flush();
        } else if (load->parsed()) {
            Output o("load", g);
            auto fw = require_framework(g);
            o.result() = describe_framework(fw);
            print_framework_summary(o, o.result());
            o.flush();
        } else if (save->parsed()) {
            Output o("save", g);
            auto fw = require_framework(g);
            if (g.out.empty()) throw CLI::ValidationError("--out", "save needs --out PATH");
            save_framework(fw, g.out);
            o.result() = describe_framework(fw);
            o.line("wrote " + g.out);
            o.flush();
        } else if (ingest->parsed()) {
            Output o("ingest", g);
            auto fw = require_framework(g);
            std::string target = g.out.empty() ? g.framework : g.out;
            o.config("writes", target);
            json done = json::array();
            for (const auto& e : elements)
                for (auto x : parse_element_list(e)) {
                    auto rep = fw.ingest_element(x);
                    done.push_back({{"element", x.value}, {"joined", rep.joined}});
                    std::string j;
                    for (const auto& p : rep.joined) j += " " + p;
                    o.line("ingested " + to_string(x) + (j.empty() ? ", joined no pairing" : ", joined" + j));
                }
            o.result()["elements"] = done;
            if (!model_id.empty()) {
                if (model_plugin.empty() == model_dsl.empty())
                    throw CLI::ValidationError("--model", "give exactly one of --plugin or --predicate");
                BaseModel m{model_id, description, required, model_plugin, model_dsl, {}};
                if (!model_plugin.empty()) m.predicate = standard_registry(to_json(fw)).predicate(model_plugin);
                auto rep = fw.ingest_model(std::move(m), dataset_id);
                o.result()["model"] = {{"pairing", rep.pairing.id}, {"size", rep.size}, {"unverified", rep.unverified},
                                       {"merged_with", rep.merged_with ? json(*rep.merged_with) : json(nullptr)}};
                o.line("model " + model_id + " paired as " + rep.pairing.id + " with " + std::to_string(rep.size) +
                       " elements" + (rep.unverified ? " (unverified)" : "") +
                       (rep.merged_with ? ", merged with " + *rep.merged_with : ""));
            } else if (!model_plugin.empty() || !model_dsl.empty()) {
                throw CLI::ValidationError("--plugin", "--plugin and --predicate need --model");
            }
            save_framework(fw, target);
            o.line("wrote " + target);
            o.flush();
        } else if (query->parsed()) {
            Output o("query", g);
            auto fw = require_framework(g);
            auto cfg = search_config(depth, top_k, threshold, ops);
            o.config("depth", cfg.max_depth);
            o.config("top_k", cfg.top_k);
            o.config("threshold", to_string(cfg.threshold));
            json forms = json::array();
            for (auto f : cfg.op_set) forms.push_back(std::string(form_name(f)));
            o.config("forms", forms);
            SearchReport rep;
            std::string mode;
            if (qtext.find("==") != std::string::npos) {
                mode = "equation";
                rep = solve_equation(qtext, fw, cfg);
            } else if (looks_like_element_list(qtext)) {
                mode = "data-driven";
                rep = solve_data_driven(parse_element_list(qtext), fw, cfg);
            } else {
                mode = "model-driven";
                auto symbols = fw.symbols();
                rep = solve_model_driven(parse_model(qtext, &symbols), fw, cfg);
            }
            o.config("mode", mode);
            o.result() = to_json(rep);
            print_results(o, rep);
            o.flush();
        } else if (ldemo->parsed()) {
            Output o("lattice-demo", g);
            o.config("L", demo_L);
            o.config("adjacency", "4-connected");
            auto build = lattice::build_lattice_framework(demo_L);
            const auto& cal = build.calibration;
            const auto& fw = build.framework;
            json sizes = json::array();
            o.line("model  size  published");
            for (std::size_t i = 0; i < 9; ++i) {
                auto n = fw.dataset("w" + std::to_string(i + 1)).size();
                sizes.push_back(n);
                std::string pub = demo_L == 3 ? std::to_string(lattice::kPublishedSizes[i]) : "-";
                std::string mark = demo_L == 3 && n != lattice::kPublishedSizes[i] ? "  MISMATCH" : "";
                char buf[96];
                std::snprintf(buf, sizeof buf, "m%-5zu %-5zu %s%s", i + 1, n, pub.c_str(), mark.c_str());
                o.line(buf);
            }
            o.line("calibration: " + cal.describe());
            o.result()["sizes"] = sizes;
            o.result()["calibration"] = {{"width_rule", std::string(to_string(cal.width_rule))},
                                         {"thin_neighbor_count", cal.thin_neighbor_count},
                                         {"thin_self_inclusive", cal.thin_self_inclusive},
                                         {"width_matched", cal.width_matched},
                                         {"first_mismatch", cal.first_mismatch ? json(*cal.first_mismatch) : json(nullptr)}};
            auto puzzle = lattice::omega10_puzzle(fw, {});
            o.line("w10 = w7 & w8 has " + std::to_string(puzzle.omega10.size()) + " patterns");
            o.line(std::string("puzzle: exact pair ranked first: ") + (puzzle.exact_first ? "yes" : "no"));
            print_results(o, puzzle.report);
            auto eq = solve_equation("?a & ?b == w10", [&] {
                Framework w = fw;
                w.add_dataset("w10", std::vector<ElementId>(puzzle.omega10.members().begin(), puzzle.omega10.members().end()));
                return w;
            }());
            o.line("equation ?a & ?b == w10:");
            print_results(o, eq);
            auto m11 = lattice::m11_report(fw);
            o.line("m11 = m2 & m7: " + m11.note);
            o.result()["omega10"] = {{"size", puzzle.omega10.size()}, {"exact_first", puzzle.exact_first},
                                     {"search", to_json(puzzle.report)}};
            o.result()["equation"] = to_json(eq);
            o.result()["m11"] = {{"size", m11.extension.size()}, {"note", m11.note}};
            if (!g.out.empty()) {
                Framework w = fw;
                w.add_dataset("w10", std::vector<ElementId>(puzzle.omega10.members().begin(), puzzle.omega10.members().end()));
                fs::path dir(g.out);
                fs::create_directories(dir);
                save_framework(w, (dir / "lattice.json").string());
                for (std::size_t i = 1; i <= 9; ++i) {
                    std::string id = "w" + std::to_string(i);
                    write_file(dir / (id + ".pbm"), lattice::to_pbm(lattice::patterns_of(fw.dataset(id), demo_L)));
                }
                write_file(dir / "w10.pbm", lattice::to_pbm(lattice::patterns_of(puzzle.omega10, demo_L)));
                o.line("wrote lattice.json and PBM pattern sheets to " + g.out);
            }
            o.flush();
        } else if (ndemo->parsed()) {
            Output o("numbers-demo", g);
            o.config("lo", nlo);
            o.config("hi", nhi);
            o.config("depth", 1);
            auto fw = numbers::build_divisibility_framework(nlo, nhi);
            auto rows = numbers::run_case_queries(fw);
            json out = json::array();
            for (const auto& r : rows) {
                Ratio best = r.report.best.value_or(Ratio{0, 1});
                json exprs = json::array();
                for (const auto& m : r.report.results)
                    if (m.lambda == best) exprs.push_back(m.text);
                out.push_back({{"query", r.query.name},
                               {"target", ids_json(r.query.target)},
                               {"engine", ratio_json(best)},
                               {"oracle", ratio_json(r.oracle.best)},
                               {"published", r.query.published_text},
                               {"co_optimal", r.report.co_optimal},
                               {"best_expressions", exprs},
                               {"engine_matches_oracle", r.engine_matches_oracle},
                               {"engine_matches_published", r.engine_matches_published},
                               {"warnings", r.report.warnings}});
            }
            o.result()["queries"] = out;
            std::istringstream table(numbers::format_case_table(rows));
            for (std::string l; std::getline(table, l);) o.line(l);
            if (!g.out.empty()) save_framework(fw, g.out);
            o.flush();
        } else if (idemo->parsed()) {
            Output o("iris-demo", g);
            o.config("data", iris_path);
            o.config("features", {fx, fy});
            ikde.echo(o);
            auto rows = iris::load_csv(iris_path);
            auto sets = iris::point_sets(rows, fx, fy);
            auto species = iris::species_names(rows);
            for (std::size_t i = 0; i < species.size(); ++i) o.line(sets[i].id + " = " + species[i]);
            stochastic::StochasticFramework sfw(sets, ikde.config());
            report_stochastic(o, sfw, g.out);
            auto mem = stochastic::membership_report(sets[0].points, sets, ikde.config());
            o.line("self-query with w1 as new points:");
            json mrows = json::array();
            for (const auto& r : mem.rows) {
                o.line("  " + r.dataset + ": count " + std::to_string(r.count) + ", percent " + num(r.percent));
                mrows.push_back({{"dataset", r.dataset}, {"count", r.count}, {"percent", r.percent}});
            }
            json best = json::array();
            for (const auto& b : mem.best) {
                best.push_back(b.expr);
                o.line("  best region " + b.expr + " Lambda " + num(b.lambda));
            }
            o.line(std::string("  ") + stochastic::MembershipReport::kCountDefinition);
            o.line(std::string("  ") + stochastic::MembershipReport::kPercentDefinition);
            o.result()["species"] = species;
            o.result()["membership"] = {{"rows", mrows}, {"best", best}, {"best_lambda", mem.best_lambda}};
            o.flush();
        } else if (sfit->parsed()) {
            Output o("stochastic-fit", g);
            o.config("points", points_path);
            skde.echo(o);
            stochastic::StochasticFramework sfw(read_points_csv(points_path), skde.config());
            report_stochastic(o, sfw, g.out);
            o.flush();
        } else if (bip->parsed()) {
            Output o("export-bipartite", g);
            auto fw = require_framework(g);
            auto graph = export_bipartite(fw);
            auto stats = connection_stats(graph);
            o.result() = to_json(graph);
            o.result()["stats"] = to_json(stats);
            if (!g.out.empty()) {
                write_file(g.out, g.format == "json" ? to_json(graph).dump(2) + "\n" : bipartite_csv(graph));
                o.line("wrote " + g.out);
            } else {
                std::istringstream csv(bipartite_csv(graph));
                for (std::string l; std::getline(csv, l);) o.line(l);
            }
            o.line("mean associations per element " + ratio_text(stats.mean));
            for (auto [n, c] : stats.histogram) o.line("  n=" + std::to_string(n) + ": " + std::to_string(c) + " elements");
            o.flush();
        } else if (mall->parsed()) {
            Output o("malleability", g);
            if (probs.empty() == graph_text.empty())
                throw CLI::ValidationError("malleability", "give exactly one of --probs or --graph");
            if (!probs.empty()) {
                o.config("probs", probs);
                double m = malleability(probs);
                o.result() = {{"malleability", m}, {"entropy_bits", std::log(m)}};
                o.line("malleability " + num(m) + " (entropy " + num(std::log(m)) + " bits)");
            } else {
                o.config("graph", graph_text);
                o.config("operator", op_name);
                o.config("signature", "sorted degree sequence");
                auto colon = graph_text.find(':');
                if (colon == std::string::npos) throw CLI::ValidationError("--graph", "expected N:u-v,u-v,...");
                std::size_t n = std::stoul(graph_text.substr(0, colon));
                std::vector<std::pair<std::size_t, std::size_t>> edges;
                std::istringstream in(graph_text.substr(colon + 1));
                for (std::string e; std::getline(in, e, ',');) {
                    auto dash = e.find('-');
                    if (dash == std::string::npos) throw CLI::ValidationError("--graph", "bad edge '" + e + "'");
                    edges.emplace_back(std::stoul(e.substr(0, dash)), std::stoul(e.substr(dash + 1)));
                }
                ChangeOperator op = op_name == "edge-removal"    ? ChangeOperator::EdgeRemoval
                                    : op_name == "edge-addition" ? ChangeOperator::EdgeAddition
                                                                 : ChangeOperator::NodeRemoval;
                auto rep = perturbation_malleability(Graph::make(n, edges), op);
                o.result() = to_json(rep);
                o.line(std::to_string(rep.changes) + " changes, weighting uniform over change instances");
                for (const auto& [sig, c] : rep.groups) o.line("  " + sig + ": " + std::to_string(c));
                o.line("malleability " + num(rep.value) + " (entropy " + num(rep.entropy) + " bits)");
            }
            o.flush();
        }
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\nrun with --help for the grammar\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
