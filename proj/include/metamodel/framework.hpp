#pragma once

// The dataset/model registry: universe, environment datasets, feature layer,
// base models and the bijective pairings between datasets and models, plus
// the evaluator that reads expressions in either domain against it.
//
// Every mutation runs on a copy that must pass the global bijectivity sweep
// before it replaces the current state, so a failed operation leaves the
// framework untouched.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "metamodel/expr.hpp"
#include "metamodel/index_set.hpp"
#include "metamodel/parse.hpp"
#include "metamodel/sets.hpp"

namespace metamodel {

using FeatureValue = std::variant<double, std::string>;
using FeatureVector = std::map<std::string, FeatureValue>;

enum class FeatureKind { Categorical, Numeric };

inline std::string_view to_string(FeatureKind k) {
    return k == FeatureKind::Numeric ? "numeric" : "categorical";
}

/// nullopt marks the feature as inapplicable to that element.
using Extractor = std::function<std::optional<FeatureValue>(ElementId)>;
using Predicate = std::function<bool(const FeatureVector&)>;

struct FeatureDef {
    std::string id;
    FeatureKind kind = FeatureKind::Numeric;
    std::string plugin;
    Extractor extractor;
    bool partial = false;
};

struct BaseModel {
    std::string id;
    std::string description;
    std::vector<std::string> required_features;
    std::string plugin;         // registry reference, or
    std::string predicate_dsl;  // a composition of other base models
    Predicate predicate;
};

struct Pairing {
    std::string id;        // also the id of the paired environment dataset
    std::string model_id;
    ModelExpr model;
    bool dummy = false;       // label-only model standing for its own dataset
    bool unverified = false;  // model with an empty extension
};

enum class MergeMode { Union, Intersection };

struct BijectivityReport {
    bool ok = true;
    std::vector<ElementId> missing;  // satisfy the model, absent from the dataset
    std::vector<ElementId> stray;    // in the dataset, fail the model

    std::string describe() const {
        if (ok) return "bijective";
        std::string s;
        if (!missing.empty()) s += "missing " + detail::list_ids(missing);
        if (!stray.empty()) s += std::string(s.empty() ? "" : "; ") + "stray " + detail::list_ids(stray);
        return s;
    }
};

class NotBijective : public Error {
public:
    NotBijective(const std::string& what, BijectivityReport r)
        : Error(what + ": " + r.describe()), report(std::move(r)) {}
    BijectivityReport report;
};

struct IngestReport {
    ElementId element;
    std::vector<std::string> joined;  // pairing ids whose datasets gained the element
};

struct IngestModelReport {
    Pairing pairing;
    std::size_t size = 0;
    bool unverified = false;
    std::optional<std::string> merged_with;
};

struct RestrictionResult {
    Pairing restricted;
    Pairing dummy;
};

/// Resolves plugin references of the form "name" or "name:argument".
class PluginRegistry {
public:
    using ExtractorFactory = std::function<Extractor(std::string_view)>;
    using PredicateFactory = std::function<Predicate(std::string_view)>;

    void add_extractor(std::string name, ExtractorFactory f) { extractors_[std::move(name)] = std::move(f); }
    void add_predicate(std::string name, PredicateFactory f) { predicates_[std::move(name)] = std::move(f); }

    Extractor extractor(std::string_view ref) const {
        auto [name, arg] = split(ref);
        auto it = extractors_.find(name);
        if (it == extractors_.end()) throw Error("no feature extractor plugin '" + name + "'");
        return it->second(arg);
    }

    Predicate predicate(std::string_view ref) const {
        auto [name, arg] = split(ref);
        auto it = predicates_.find(name);
        if (it == predicates_.end()) throw Error("no model predicate plugin '" + name + "'");
        return it->second(arg);
    }

    bool has_extractor(std::string_view ref) const { return extractors_.count(split(ref).first) > 0; }
    bool has_predicate(std::string_view ref) const { return predicates_.count(split(ref).first) > 0; }

private:
    static std::pair<std::string, std::string_view> split(std::string_view ref) {
        auto colon = ref.find(':');
        if (colon == std::string_view::npos) return {std::string(ref), {}};
        return {std::string(ref.substr(0, colon)), ref.substr(colon + 1)};
    }

    std::map<std::string, ExtractorFactory, std::less<>> extractors_;
    std::map<std::string, PredicateFactory, std::less<>> predicates_;
};

inline std::vector<std::int64_t> parse_int_list(std::string_view s) {
    std::vector<std::int64_t> out;
    std::string item;
    std::istringstream in{std::string(s)};
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stoll(item));
        } catch (const std::exception&) {
            throw Error("expected an integer list, got '" + std::string(s) + "'");
        }
    }
    return out;
}

inline double numeric_feature(const FeatureVector& fv, const std::string& id) {
    return std::get<double>(fv.at(id));
}

/// Plugins usable with any integer-labeled universe: the element's own value
/// as a feature and membership/modular predicates over it.
inline void register_generic_plugins(PluginRegistry& reg) {
    reg.add_extractor("generic.value", [](std::string_view) -> Extractor {
        return [](ElementId x) -> std::optional<FeatureValue> { return static_cast<double>(x.value); };
    });
    reg.add_predicate("generic.member", [](std::string_view arg) -> Predicate {
        auto values = parse_int_list(arg);
        std::sort(values.begin(), values.end());
        return [values](const FeatureVector& fv) {
            auto v = static_cast<std::int64_t>(numeric_feature(fv, "value"));
            return std::binary_search(values.begin(), values.end(), v);
        };
    });
    reg.add_predicate("generic.mod", [](std::string_view arg) -> Predicate {
        auto kr = parse_int_list(arg);
        if (kr.size() != 2 || kr[0] <= 0) throw Error("generic.mod expects 'k,r' with k > 0");
        return [k = kr[0], r = kr[1]](const FeatureVector& fv) {
            auto v = static_cast<std::int64_t>(numeric_feature(fv, "value"));
            return ((v % k) + k) % k == r;
        };
    });
    reg.add_predicate("generic.never", [](std::string_view) -> Predicate {
        return [](const FeatureVector&) { return false; };
    });
    reg.add_predicate("generic.always", [](std::string_view) -> Predicate {
        return [](const FeatureVector&) { return true; };
    });
}

class Framework;

/// Reads set and model expressions against one framework snapshot. Leaf
/// values are cached, so an evaluator must not outlive a mutation of the
/// framework it was built from. Not thread-safe; use one per thread.
class Evaluator {
public:
    explicit Evaluator(const Framework& fw);

    std::span<const ElementId> elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }

    std::optional<std::size_t> index_of(ElementId x) const {
        auto it = std::lower_bound(elements_.begin(), elements_.end(), x);
        if (it == elements_.end() || *it != x) return std::nullopt;
        return static_cast<std::size_t>(it - elements_.begin());
    }

    IndexSet to_index_set(const Dataset& d) const {
        IndexSet s(elements_.size());
        for (auto x : d.members())
            if (auto i = index_of(x)) s.set(*i);
        return s;
    }

    Dataset to_dataset(const IndexSet& s, std::string id) const;

    IndexSet full() const { return IndexSet::full(elements_.size()); }

    /// Dataset-domain value of a leaf: a paired or environment dataset.
    const IndexSet& set_leaf(const std::string& name);
    /// Model-domain value of a leaf: the extension of a base or pairing model.
    const IndexSet& model_leaf(const std::string& name);

    IndexSet eval_set(const SetExpr& e) { return eval(*e.node(), true); }
    IndexSet extension(const ModelExpr& e) { return eval(*e.node(), false); }

    /// Model satisfaction decided from a feature vector; usable for elements
    /// not yet in the environment.
    bool satisfies(const ModelExpr& e, ElementId x, const FeatureVector& fv) const {
        return satisfies_node(*e.node(), x, fv, 0);
    }

private:
    IndexSet eval(const detail::Node& n, bool set_domain) {
        switch (n.kind) {
            case detail::NodeKind::Leaf:
                if (n.unknown) throw Error("unbound unknown '?" + n.name + "'");
                return set_domain ? set_leaf(n.name) : model_leaf(n.name);
            case detail::NodeKind::Negation: return eval(*n.left, set_domain).complement();
            case detail::NodeKind::Binary:
                return IndexSet::apply(n.op, eval(*n.left, set_domain), eval(*n.right, set_domain));
        }
        return {};
    }

    bool satisfies_node(const detail::Node& n, ElementId x, const FeatureVector& fv, int depth) const;
    bool satisfies_leaf(const std::string& name, ElementId x, const FeatureVector& fv, int depth) const;

    const Framework* fw_;
    std::vector<ElementId> elements_;
    std::unordered_map<std::string, IndexSet> set_cache_;
    std::unordered_map<std::string, IndexSet> model_cache_;
    int model_depth_ = 0;
};

class Framework {
    // Mutations apply to a copy; it replaces *this only after the sweep passes.
    template <class F>
    auto transact(F&& f) {
        Framework next = *this;
        auto result = f(next);
        next.refresh();
        next.check_consistency();
        *this = std::move(next);
        return result;
    }

    template <class F, class Lookup>
    decltype(auto) transact(F&& f, Lookup&& lookup) {
        auto key = transact(std::forward<F>(f));
        return lookup(key);
    }

public:
    static constexpr const char* kIngestPool = "_ingested";

    explicit Framework(UniversePtr universe) : universe_(std::move(universe)) {
        if (!universe_) throw Error("framework requires a universe");
        refresh();
    }
    Framework(std::string name, std::vector<ElementId> omega)
        : Framework(make_universe(std::move(name), std::move(omega))) {}

    const UniversePtr& universe() const { return universe_; }
    Dataset universe_dataset() const { return Dataset::full("Omega", universe_); }

    /// S_E, the union of all environment datasets.
    const Dataset& environment() const { return environment_; }
    const std::map<std::string, Dataset>& datasets() const { return datasets_; }
    const std::vector<FeatureDef>& features() const { return features_; }
    const std::map<std::string, BaseModel>& base_models() const { return base_models_; }
    const std::vector<Pairing>& pairings() const { return pairings_; }
    const std::map<ElementId, FeatureVector>& element_features() const { return element_features_; }
    const std::map<std::string, std::string>& metadata() const { return metadata_; }

    std::size_t n_universe() const { return universe_->size(); }
    std::size_t n_datasets() const { return datasets_.size(); }
    std::size_t n_models() const { return base_models_.size(); }
    std::size_t n_features() const { return features_.size(); }

    void set_metadata(std::string key, std::string value) { metadata_[std::move(key)] = std::move(value); }

    const Dataset& dataset(const std::string& id) const {
        auto it = datasets_.find(id);
        if (it == datasets_.end()) throw Error("no dataset '" + id + "' in the environment");
        return it->second;
    }

    const Pairing* find_pairing(const std::string& id) const {
        for (const auto& p : pairings_)
            if (p.id == id) return &p;
        return nullptr;
    }
    const Pairing* find_pairing_by_model(const std::string& model_id) const {
        for (const auto& p : pairings_)
            if (p.model_id == model_id) return &p;
        return nullptr;
    }
    const Pairing& pairing(const std::string& id) const {
        if (auto* p = find_pairing(id)) return *p;
        throw Error("no pairing '" + id + "'");
    }
    const Dataset& dataset_of(const Pairing& p) const { return dataset(p.id); }

    const FeatureVector& features_of(ElementId x) const {
        auto it = element_features_.find(x);
        if (it == element_features_.end()) throw Error("unknown element " + to_string(x));
        return it->second;
    }

    /// Identifier classification for the DSL: pairing and dataset ids are set
    /// identifiers, base and pairing model ids are model identifiers.
    SymbolTable symbols() const {
        return [this](std::string_view name) -> std::optional<DomainTag> {
            std::string n(name);
            if (datasets_.count(n) || find_pairing(n)) return DomainTag::Set;
            if (base_models_.count(n) || find_pairing_by_model(n)) return DomainTag::Model;
            return std::nullopt;
        };
    }

    // -- environment and feature layer ---------------------------------------

    const Dataset& add_dataset(std::string id, std::vector<ElementId> members) {
        return transact([&](Framework& f) -> const std::string {
            if (f.datasets_.count(id)) throw Error("dataset '" + id + "' already exists");
            Dataset d(id, f.universe_, std::move(members));
            for (auto x : d.members()) f.ensure_features(x);
            f.datasets_.emplace(id, std::move(d));
            return id;
        }, [this](const std::string& k) -> const Dataset& { return datasets_.at(k); });
    }

    void register_feature(FeatureDef def) {
        transact([&](Framework& f) {
            if (def.id.empty()) throw Error("feature id must not be empty");
            for (const auto& existing : f.features_)
                if (existing.id == def.id) throw Error("feature '" + def.id + "' is already registered");
            if (!def.extractor) throw Error("feature '" + def.id + "' has no extractor");
            for (auto& [x, fv] : f.element_features_) extract_into(def, x, fv);
            f.features_.push_back(std::move(def));
            return 0;
        });
    }

    void add_base_model(BaseModel m) {
        transact([&](Framework& f) {
            f.insert_base_model(std::move(m));
            return 0;
        });
    }

    // -- pairing protocol -----------------------------------------------------

    BijectivityReport is_bijective(const Dataset& dataset, const ModelExpr& model) const {
        Evaluator ev(*this);
        IndexSet ext = ev.extension(model);
        BijectivityReport r;
        std::size_t i = 0;
        for (auto x : ev.elements()) {
            bool in_ext = ext.test(i++);
            bool in_data = dataset.contains(x);
            if (in_ext && !in_data) r.missing.push_back(x);
            if (!in_ext && in_data) r.stray.push_back(x);
        }
        for (auto x : dataset.members())
            if (!ev.index_of(x)) r.stray.push_back(x);
        std::sort(r.stray.begin(), r.stray.end());
        r.ok = r.missing.empty() && r.stray.empty();
        return r;
    }

    const Pairing& pair(const std::string& dataset_id, const ModelExpr& model, std::string model_id = {}) {
        return transact([&](Framework& f) {
            if (!f.datasets_.count(dataset_id)) throw Error("dataset '" + dataset_id + "' is not in the environment");
            if (f.find_pairing(dataset_id)) throw Error("dataset '" + dataset_id + "' is already paired");
            Pairing p;
            p.id = dataset_id;
            p.model = model;
            p.model_id = model_id.empty() ? f.default_model_id(dataset_id, model) : std::move(model_id);
            for (const auto& name : leaf_names(model))
                if ((name == dataset_id || name == p.model_id) && !f.base_models_.count(name))
                    throw Error("model of pairing '" + dataset_id + "' refers to itself");
            f.check_model_id_free(p.model_id);
            auto report = f.is_bijective(f.dataset(dataset_id), model);
            if (!report.ok) throw NotBijective("pairing '" + dataset_id + "' is not bijective", std::move(report));
            p.unverified = f.dataset(dataset_id).empty();
            f.pairings_.push_back(std::move(p));
            return dataset_id;
        }, [this](const std::string& id) -> const Pairing& { return pairing(id); });
    }

    IngestReport ingest_element(ElementId x) {
        return transact([&](Framework& f) {
            if (!f.universe_->contains(x)) throw Error("unknown element " + to_string(x) + ": not in the universe");
            if (f.environment_.contains(x)) throw Error("element " + to_string(x) + " is already in the environment");
            f.ensure_features(x);
            const auto& fv = f.element_features_.at(x);
            IngestReport report{x, {}};
            Evaluator ev(f);
            std::vector<std::string> targets;
            for (const auto& p : f.pairings_)
                if (!p.dummy && ev.satisfies(p.model, x, fv)) targets.push_back(p.id);
            for (const auto& id : targets) {
                f.add_member(id, x);
                auto& p = *f.mutable_pairing(id);
                p.unverified = false;
                report.joined.push_back(id);
            }
            if (!f.datasets_.count(kIngestPool)) f.datasets_.emplace(kIngestPool, Dataset(kIngestPool, f.universe_, {}));
            f.add_member(kIngestPool, x);
            return report;
        });
    }

    IngestModelReport ingest_model(BaseModel m, std::string dataset_id = {}) {
        return transact([&](Framework& f) {
            std::string mid = m.id;
            f.check_model_id_free(mid);
            f.insert_base_model(std::move(m));
            Evaluator ev(f);
            Dataset ext = ev.to_dataset(ev.model_leaf(mid), dataset_id.empty() ? "w_" + mid : dataset_id);
            IngestModelReport report;
            report.size = ext.size();
            if (!ext.empty()) {
                for (auto& p : f.pairings_) {
                    if (p.dummy || !(f.dataset(p.id) == ext)) continue;
                    p.model = p.model & ModelExpr::leaf(mid);
                    p.model_id = p.model_id + "_and_" + mid;
                    report.pairing = p;
                    report.merged_with = p.id;
                    return report;
                }
            }
            if (f.datasets_.count(ext.id()) || f.find_pairing(ext.id()))
                throw Error("dataset id '" + ext.id() + "' is already in use");
            Pairing p{ext.id(), mid, ModelExpr::leaf(mid), false, ext.empty()};
            f.datasets_.emplace(ext.id(), ext);
            f.pairings_.push_back(p);
            report.pairing = p;
            report.unverified = p.unverified;
            return report;
        });
    }

    const Pairing& merge_pairings(const std::string& p_id, const std::string& q_id, MergeMode mode) {
        return transact([&](Framework& f) {
            if (p_id == q_id) throw Error("cannot merge pairing '" + p_id + "' with itself");
            Pairing p = f.pairing(p_id);
            Pairing q = f.pairing(q_id);
            bool uni = mode == MergeMode::Union;
            std::string id = p_id + (uni ? "_or_" : "_and_") + q_id;
            if (f.datasets_.count(id)) throw Error("dataset id '" + id + "' is already in use");
            Dataset d = (uni ? set_union(f.dataset(p_id), f.dataset(q_id))
                             : intersect(f.dataset(p_id), f.dataset(q_id))).renamed(id);
            Pairing merged{id, id + ".model", uni ? (p.model | q.model) : (p.model & q.model), false, d.empty()};
            f.retire(p_id);
            f.retire(q_id);
            f.check_model_id_free(merged.model_id);
            f.datasets_.emplace(id, d);
            f.refresh();
            auto report = f.is_bijective(d, merged.model);
            if (!report.ok) throw NotBijective("merged pairing '" + id + "' is not bijective", std::move(report));
            f.pairings_.push_back(merged);
            return id;
        }, [this](const std::string& id) -> const Pairing& { return pairing(id); });
    }

    /// Expresses `subset` as the parent minus a label-only dummy pairing that
    /// holds the difference.
    RestrictionResult restrict_pairing(const std::string& parent_id, std::vector<ElementId> subset,
                                       std::string subset_id) {
        return transact([&](Framework& f) {
            const Pairing parent = f.pairing(parent_id);
            const Dataset& pd = f.dataset(parent_id);
            Dataset sub(subset_id, f.universe_, std::move(subset));
            if (sub.empty()) throw Error("restriction of '" + parent_id + "' to an empty subset");
            if (!sub.is_subset_of(pd) || sub.size() == pd.size())
                throw Error("restriction of '" + parent_id + "' requires a strict subset of its dataset");
            if (auto it = f.datasets_.find(subset_id); it != f.datasets_.end() && !(it->second == sub))
                throw Error("dataset '" + subset_id + "' exists with different members");
            if (f.find_pairing(subset_id)) throw Error("dataset '" + subset_id + "' is already paired");

            std::string dummy_id = subset_id + ".rest";
            std::string dummy_model = subset_id + ".dummy";
            if (f.datasets_.count(dummy_id)) throw Error("dataset id '" + dummy_id + "' is already in use");
            f.check_model_id_free(dummy_model);
            f.datasets_.emplace(dummy_id, difference(pd, sub).renamed(dummy_id));
            Pairing dummy{dummy_id, dummy_model, ModelExpr::leaf(dummy_model), true, false};
            f.pairings_.push_back(dummy);

            f.datasets_.emplace(subset_id, sub);
            Pairing restricted{subset_id, subset_id + ".model", parent.model & ~ModelExpr::leaf(dummy_model), false, false};
            f.check_model_id_free(restricted.model_id);
            f.pairings_.push_back(restricted);
            return RestrictionResult{restricted, dummy};
        });
    }

    const Pairing& merge_models_on_shared_dataset(const std::string& p_id, const std::string& q_id) {
        if (p_id == q_id) throw Error("cannot merge pairing '" + p_id + "' with itself");
        const Pairing q = pairing(q_id);
        return merge_models_on_shared_dataset(p_id, dataset(q_id), q.model, q_id);
    }

    /// Conjoins a second model describing exactly the same dataset, e.g. one
    /// built on a different feature. `retire_id` names a stored pairing that
    /// the merge replaces, if any.
    const Pairing& merge_models_on_shared_dataset(const std::string& p_id, const Dataset& other_dataset,
                                                  const ModelExpr& other_model,
                                                  const std::string& retire_id = {}) {
        return transact([&](Framework& f) {
            Pairing p = f.pairing(p_id);
            const Dataset& d = f.dataset(p_id);
            if (!(d == other_dataset))
                throw Error("pairings '" + p_id + "' and '" + other_dataset.id() + "' describe different datasets");
            Evaluator ev(f);
            for (auto x : d.members()) {
                const auto& fv = f.features_of(x);
                if (!ev.satisfies(p.model, x, fv) || !ev.satisfies(other_model, x, fv))
                    throw Error("element " + to_string(x) + " of '" + p_id +
                                "' does not satisfy both models; split the dataset instead");
            }
            std::string other_id = retire_id.empty() ? std::string("model") : f.pairing(retire_id).model_id;
            if (!retire_id.empty()) f.retire(retire_id);
            auto* stored = f.mutable_pairing(p_id);
            stored->model = p.model & other_model;
            stored->model_id = p.model_id + "_and_" + other_id;
            f.check_model_id_unique();
            return p_id;
        }, [this](const std::string& id) -> const Pairing& { return pairing(id); });
    }

    std::pair<Pairing, Pairing> split_dataset_on_divergence(const std::string& p_id, const ModelExpr& model_b) {
        return transact([&](Framework& f) {
            Pairing p = f.pairing(p_id);
            const Dataset d = f.dataset(p_id);
            Evaluator ev(f);
            std::vector<ElementId> yes, no;
            for (auto x : d.members()) (ev.satisfies(model_b, x, f.features_of(x)) ? yes : no).push_back(x);
            if (yes.empty() || no.empty())
                throw Error("model splits nothing in '" + p_id + "': " +
                            (yes.empty() ? "no element satisfies it" : "every element satisfies it"));
            f.retire(p_id);
            Pairing a{p_id + ".1", p_id + ".1.model", p.model & model_b, false, false};
            Pairing b{p_id + ".2", p_id + ".2.model", p.model & ~model_b, false, false};
            for (const auto* part : {&a, &b}) {
                if (f.datasets_.count(part->id)) throw Error("dataset id '" + part->id + "' is already in use");
                f.check_model_id_free(part->model_id);
            }
            f.datasets_.emplace(a.id, Dataset(a.id, f.universe_, std::move(yes)));
            f.datasets_.emplace(b.id, Dataset(b.id, f.universe_, std::move(no)));
            f.pairings_.push_back(a);
            f.pairings_.push_back(b);
            return std::pair{a, b};
        });
    }

    // -- consistency ------------------------------------------------------------

    /// Pairings that currently fail the bijectivity requirement.
    std::vector<std::pair<std::string, BijectivityReport>> sweep() const {
        std::vector<std::pair<std::string, BijectivityReport>> failures;
        for (const auto& p : pairings_) {
            if (p.dummy) continue;
            auto r = is_bijective(dataset(p.id), p.model);
            if (!r.ok) failures.emplace_back(p.id, std::move(r));
        }
        return failures;
    }

    void check_consistency() const {
        check_model_id_unique();
        for (const auto& p : pairings_) {
            if (!datasets_.count(p.id)) throw Error("pairing '" + p.id + "' has no dataset");
            auto known = leaf_names(p.model);
            for (const auto& name : known)
                if (!resolvable_model(name)) throw Error("pairing '" + p.id + "' refers to unknown model '" + name + "'");
        }
        auto failures = sweep();
        if (!failures.empty())
            throw NotBijective("pairing '" + failures.front().first + "' is not bijective", failures.front().second);
    }

    // -- loaders ----------------------------------------------------------------
    // Raw restore hooks for deserialization; call check_consistency() after.

    void restore_dataset(Dataset d) {
        datasets_.insert_or_assign(d.id(), std::move(d));
        refresh();
    }
    void restore_features(ElementId x, FeatureVector fv) { element_features_[x] = std::move(fv); }
    void restore_feature_def(FeatureDef def) { features_.push_back(std::move(def)); }
    void restore_base_model(BaseModel m) { base_models_[m.id] = std::move(m); }
    void restore_pairing(Pairing p) { pairings_.push_back(std::move(p)); }

    bool resolvable_model(const std::string& name) const {
        return base_models_.count(name) || find_pairing_by_model(name) || find_pairing(name) || datasets_.count(name);
    }

    Predicate compile_dsl_predicate(const std::string& dsl) const {
        ModelExpr expr = parse_model(dsl);
        for (const auto& name : leaf_names(expr))
            if (!base_models_.count(name))
                throw Error("predicate '" + dsl + "' refers to unknown base model '" + name + "'");
        if (!unknown_names(expr).empty()) throw Error("predicate '" + dsl + "' contains unknowns");
        std::map<std::string, std::pair<Predicate, std::vector<std::string>>> parts;
        for (const auto& name : leaf_names(expr)) {
            const auto& bm = base_models_.at(name);
            parts[name] = {bm.predicate, bm.required_features};
        }
        return [expr, parts](const FeatureVector& fv) {
            std::function<bool(const detail::Node&)> eval = [&](const detail::Node& n) -> bool {
                switch (n.kind) {
                    case detail::NodeKind::Leaf: {
                        const auto& [pred, req] = parts.at(n.name);
                        for (const auto& r : req)
                            if (!fv.count(r)) return false;
                        return pred(fv);
                    }
                    case detail::NodeKind::Negation: return !eval(*n.left);
                    case detail::NodeKind::Binary: return ops::apply(n.op, eval(*n.left), eval(*n.right));
                }
                return false;
            };
            return eval(*expr.node());
        };
    }

private:
    friend class Evaluator;

    void refresh() {
        std::vector<ElementId> all;
        for (const auto& [id, d] : datasets_) all.insert(all.end(), d.members().begin(), d.members().end());
        environment_ = Dataset("S_E", universe_, std::move(all));
    }

    void extract_into(const FeatureDef& def, ElementId x, FeatureVector& fv) const {
        std::optional<FeatureValue> v;
        try {
            v = def.extractor(x);
        } catch (const std::exception& e) {
            throw Error("feature '" + def.id + "' failed on element " + to_string(x) + ": " + e.what());
        }
        if (v) fv[def.id] = *v;
        else if (!def.partial)
            throw Error("feature '" + def.id + "' is not applicable to element " + to_string(x) +
                        " and is not declared partial");
    }

    void ensure_features(ElementId x) {
        if (element_features_.count(x)) return;
        FeatureVector fv;
        for (const auto& def : features_) extract_into(def, x, fv);
        element_features_.emplace(x, std::move(fv));
    }

    void insert_base_model(BaseModel m) {
        if (m.id.empty()) throw Error("base model id must not be empty");
        if (base_models_.count(m.id)) throw Error("base model '" + m.id + "' already exists");
        if (!m.predicate_dsl.empty() && !m.predicate) {
            m.predicate = compile_dsl_predicate(m.predicate_dsl);
            for (const auto& name : leaf_names(parse_model(m.predicate_dsl)))
                for (const auto& r : base_models_.at(name).required_features)
                    if (std::find(m.required_features.begin(), m.required_features.end(), r) == m.required_features.end())
                        m.required_features.push_back(r);
        }
        if (!m.predicate) throw Error("base model '" + m.id + "' has no predicate");
        for (const auto& r : m.required_features) {
            bool found = std::any_of(features_.begin(), features_.end(), [&](const FeatureDef& d) { return d.id == r; });
            if (!found) throw Error("base model '" + m.id + "' requires unregistered feature '" + r + "'");
        }
        base_models_.emplace(m.id, std::move(m));
    }

    std::string default_model_id(const std::string& dataset_id, const ModelExpr& model) const {
        if (model.is_leaf() && base_models_.count(model.name()) && !find_pairing_by_model(model.name()))
            return model.name();
        return dataset_id + ".model";
    }

    void check_model_id_free(const std::string& id) const {
        if (find_pairing_by_model(id)) throw Error("model id '" + id + "' is already paired");
    }

    void check_model_id_unique() const {
        std::map<std::string, int> seen_models, seen_data;
        for (const auto& p : pairings_) {
            if (++seen_models[p.model_id] > 1) throw Error("model id '" + p.model_id + "' is paired twice");
            if (++seen_data[p.id] > 1) throw Error("dataset '" + p.id + "' is paired twice");
        }
    }

    Pairing* mutable_pairing(const std::string& id) {
        for (auto& p : pairings_)
            if (p.id == id) return &p;
        return nullptr;
    }

    void add_member(const std::string& dataset_id, ElementId x) {
        const Dataset& d = datasets_.at(dataset_id);
        std::vector<ElementId> members(d.members().begin(), d.members().end());
        members.push_back(x);
        datasets_.insert_or_assign(dataset_id, Dataset(dataset_id, universe_, std::move(members)));
    }

    /// Drops a pairing; its dataset stays in the environment unpaired.
    void retire(const std::string& id) {
        auto it = std::find_if(pairings_.begin(), pairings_.end(), [&](const Pairing& p) { return p.id == id; });
        if (it == pairings_.end()) throw Error("no pairing '" + id + "'");
        pairings_.erase(it);
    }

    UniversePtr universe_;
    std::map<std::string, Dataset> datasets_;
    Dataset environment_;
    std::vector<FeatureDef> features_;
    std::map<ElementId, FeatureVector> element_features_;
    std::map<std::string, BaseModel> base_models_;
    std::vector<Pairing> pairings_;
    std::map<std::string, std::string> metadata_;
};

// -- Evaluator definitions ------------------------------------------------------

inline Evaluator::Evaluator(const Framework& fw) : fw_(&fw) {
    auto m = fw.environment().members();
    elements_.assign(m.begin(), m.end());
}

inline Dataset Evaluator::to_dataset(const IndexSet& s, std::string id) const {
    std::vector<ElementId> members;
    s.for_each([&](std::size_t i) { members.push_back(elements_[i]); });
    return Dataset(std::move(id), fw_->universe(), std::move(members));
}

inline const IndexSet& Evaluator::set_leaf(const std::string& name) {
    if (auto it = set_cache_.find(name); it != set_cache_.end()) return it->second;
    IndexSet value;
    if (fw_->datasets().count(name)) {
        value = to_index_set(fw_->dataset(name));
    } else if (const auto* p = fw_->find_pairing_by_model(name)) {
        value = to_index_set(fw_->dataset(p->id));
    } else if (fw_->base_models().count(name)) {
        value = model_leaf(name);
    } else {
        throw Error("dangling reference '" + name + "': no such dataset or pairing");
    }
    return set_cache_.emplace(name, std::move(value)).first->second;
}

inline const IndexSet& Evaluator::model_leaf(const std::string& name) {
    if (auto it = model_cache_.find(name); it != model_cache_.end()) return it->second;
    if (++model_depth_ > 64) throw Error("model reference cycle through '" + name + "'");
    IndexSet value(elements_.size());
    if (auto bm = fw_->base_models().find(name); bm != fw_->base_models().end()) {
        const auto& model = bm->second;
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            const auto& fv = fw_->features_of(elements_[i]);
            bool applicable = std::all_of(model.required_features.begin(), model.required_features.end(),
                                          [&](const std::string& f) { return fv.count(f) > 0; });
            if (applicable && model.predicate(fv)) value.set(i);
        }
    } else {
        const Pairing* p = fw_->find_pairing_by_model(name);
        if (!p) p = fw_->find_pairing(name);
        if (p && !p->dummy) {
            value = extension(p->model);
        } else if (p || fw_->datasets().count(name)) {
            value = to_index_set(fw_->dataset(p ? p->id : name));
        } else {
            --model_depth_;
            throw Error("dangling reference '" + name + "': no such model");
        }
    }
    --model_depth_;
    return model_cache_.emplace(name, std::move(value)).first->second;
}

inline bool Evaluator::satisfies_node(const detail::Node& n, ElementId x, const FeatureVector& fv, int depth) const {
    switch (n.kind) {
        case detail::NodeKind::Leaf:
            if (n.unknown) throw Error("unbound unknown '?" + n.name + "'");
            return satisfies_leaf(n.name, x, fv, depth);
        case detail::NodeKind::Negation: return !satisfies_node(*n.left, x, fv, depth);
        case detail::NodeKind::Binary:
            return ops::apply(n.op, satisfies_node(*n.left, x, fv, depth), satisfies_node(*n.right, x, fv, depth));
    }
    return false;
}

inline bool Evaluator::satisfies_leaf(const std::string& name, ElementId x, const FeatureVector& fv, int depth) const {
    if (depth > 64) throw Error("model reference cycle through '" + name + "'");
    if (auto bm = fw_->base_models().find(name); bm != fw_->base_models().end()) {
        for (const auto& f : bm->second.required_features)
            if (!fv.count(f)) return false;
        return bm->second.predicate(fv);
    }
    const Pairing* p = fw_->find_pairing_by_model(name);
    if (!p) p = fw_->find_pairing(name);
    if (p && !p->dummy) return satisfies_node(*p->model.node(), x, fv, depth + 1);
    if (p) return fw_->dataset(p->id).contains(x);
    if (fw_->datasets().count(name)) return fw_->dataset(name).contains(x);
    throw Error("dangling reference '" + name + "': no such model");
}

// -- free evaluation functions ----------------------------------------------------

inline Dataset eval_set(const SetExpr& e, const Framework& fw) {
    Evaluator ev(fw);
    return ev.to_dataset(ev.eval_set(e), unparse(e));
}

inline Dataset extension(const ModelExpr& e, const Framework& fw) {
    Evaluator ev(fw);
    return ev.to_dataset(ev.extension(e), unparse(e));
}

inline bool satisfies(const ModelExpr& e, ElementId x, const Framework& fw) {
    if (!fw.environment().contains(x)) throw Error("unknown element " + to_string(x) + ": not in the environment");
    Evaluator ev(fw);
    return ev.satisfies(e, x, fw.features_of(x));
}

/// Model-domain rendering of a set expression: each pairing leaf is shown as
/// its model id.
inline std::string render_model(const ModelExpr& e, const Framework& fw) {
    return unparse_with(e, [&](const std::string& name) {
        if (const auto* p = fw.find_pairing(name)) return p->model_id;
        return name;
    });
}

}  // namespace metamodel
