#pragma once

// Density-based variant of the framework over a 2-D feature space. Datasets
// become kernel density estimates on a shared grid; a support region is the
// smallest set of highest-density cells holding a fraction chi of the mass,
// and regions combine with the same boolean catalog as datasets do.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "metamodel/framework.hpp"
#include "metamodel/index_set.hpp"
#include "metamodel/parallel.hpp"
#include "metamodel/search.hpp"

namespace metamodel::stochastic {

struct Point2 {
    double x = 0;
    double y = 0;
    friend bool operator==(const Point2&, const Point2&) = default;
    friend auto operator<=>(const Point2&, const Point2&) = default;
};

struct PointSet {
    std::string id;
    std::vector<Point2> points;
};

class FeatureGrid {
public:
    FeatureGrid() = default;
    FeatureGrid(double x0, double x1, double y0, double y1, std::size_t nx, std::size_t ny)
        : x0_(x0), x1_(x1), y0_(y0), y1_(y1), nx_(nx), ny_(ny) {
        if (nx < 32 || ny < 32) throw Error("grid resolution must be at least 32 cells per axis");
        if (!(x1 > x0) || !(y1 > y0)) throw Error("grid extent must be non-degenerate");
    }

    /// Bounding box of the points padded by `margin` on every side.
    static FeatureGrid covering(const std::vector<Point2>& pts, double margin, std::size_t resolution) {
        if (pts.empty()) throw Error("cannot size a grid without points");
        double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
        for (const auto& p : pts) {
            x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
        }
        return FeatureGrid(x0 - margin, x1 + margin, y0 - margin, y1 + margin, resolution, resolution);
    }

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t cells() const { return nx_ * ny_; }
    double dx() const { return (x1_ - x0_) / static_cast<double>(nx_); }
    double dy() const { return (y1_ - y0_) / static_cast<double>(ny_); }
    double cell_area() const { return dx() * dy(); }
    double x0() const { return x0_; }
    double x1() const { return x1_; }
    double y0() const { return y0_; }
    double y1() const { return y1_; }

    double cx(std::size_t ix) const { return x0_ + (static_cast<double>(ix) + 0.5) * dx(); }
    double cy(std::size_t iy) const { return y0_ + (static_cast<double>(iy) + 0.5) * dy(); }
    std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx_ + ix; }

    /// Cell containing p, or nullopt outside the extent.
    std::optional<std::size_t> cell_of(Point2 p) const {
        if (p.x < x0_ || p.x > x1_ || p.y < y0_ || p.y > y1_) return std::nullopt;
        auto ix = std::min(nx_ - 1, static_cast<std::size_t>((p.x - x0_) / dx()));
        auto iy = std::min(ny_ - 1, static_cast<std::size_t>((p.y - y0_) / dy()));
        return index(ix, iy);
    }

    friend bool operator==(const FeatureGrid&, const FeatureGrid&) = default;

private:
    double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
    std::size_t nx_ = 0, ny_ = 0;
};

/// Radially symmetric kernel: profile of the squared distance plus a support
/// radius beyond which it is taken as zero.
struct Kernel {
    std::string name;
    double bandwidth = 1;
    double radius = 4;
    std::function<double(double r2)> profile;
};

inline Kernel gaussian_kernel(double sigma, double truncation_sigmas = 4) {
    if (!(sigma > 0)) throw Error("kernel bandwidth must be positive");
    double inv = 1.0 / (2 * sigma * sigma);
    return {"gaussian", sigma, truncation_sigmas * sigma, [inv](double r2) { return std::exp(-r2 * inv); }};
}

struct Density {
    FeatureGrid grid;
    std::vector<double> values;  // per cell, row-major from the lower-left corner

    double mass() const {
        long double s = 0;
        for (double v : values) s += v;
        return static_cast<double>(s * grid.cell_area());
    }
    double cell_mass(std::size_t i) const { return values[i] * grid.cell_area(); }
    double at(Point2 p) const {
        auto c = grid.cell_of(p);
        return c ? values[*c] : 0.0;
    }
    std::size_t mode_cell() const {
        return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    }
};

/// Sum of one normalized kernel per point. Each point contributes exactly
/// 1/N of the mass on the grid; a kernel narrower than a cell that misses
/// every cell center puts its share in the cell containing the point.
inline Density kde(const std::vector<Point2>& points, const Kernel& kernel, const FeatureGrid& grid) {
    if (points.empty()) throw Error("kde needs at least one point");
    if (!(kernel.bandwidth > 0)) throw Error("kernel bandwidth must be positive");
    const double area = grid.cell_area();
    const double share = 1.0 / static_cast<double>(points.size());
    const double R = kernel.radius;

    auto window = [&](double c, double lo, double step, std::size_t n) {
        auto a = static_cast<long long>(std::floor((c - R - lo) / step - 0.5));
        auto b = static_cast<long long>(std::ceil((c + R - lo) / step - 0.5));
        a = std::max(0LL, a);
        b = std::min(static_cast<long long>(n) - 1, b);
        return std::pair<long long, long long>{a, b};
    };

    // Per-point scale so that each bump integrates to `share` on the grid.
    std::vector<double> scale(points.size(), 0.0);
    std::vector<std::optional<std::size_t>> fallback(points.size());
    parallel_for(points.size(), [&](std::size_t k) {
        const auto& p = points[k];
        auto [xa, xb] = window(p.x, grid.x0(), grid.dx(), grid.nx());
        auto [ya, yb] = window(p.y, grid.y0(), grid.dy(), grid.ny());
        double sum = 0;
        for (long long iy = ya; iy <= yb; ++iy) {
            double ddy = grid.cy(iy) - p.y;
            for (long long ix = xa; ix <= xb; ++ix) {
                double ddx = grid.cx(ix) - p.x;
                double r2 = ddx * ddx + ddy * ddy;
                if (r2 <= R * R) sum += kernel.profile(r2);
            }
        }
        if (sum > 0) {
            scale[k] = share / (sum * area);
        } else {
            auto c = grid.cell_of(p);
            if (!c) throw Error("kde point lies outside the grid and its kernel reaches no cell");
            fallback[k] = c;
        }
    });

    Density d{grid, std::vector<double>(grid.cells(), 0.0)};
    parallel_for(grid.ny(), [&](std::size_t iy) {
        double y = grid.cy(iy);
        for (std::size_t k = 0; k < points.size(); ++k) {
            if (scale[k] == 0) continue;
            const auto& p = points[k];
            double ddy = y - p.y;
            if (std::abs(ddy) > R) continue;
            auto [xa, xb] = window(p.x, grid.x0(), grid.dx(), grid.nx());
            for (long long ix = xa; ix <= xb; ++ix) {
                double ddx = grid.cx(ix) - p.x;
                double r2 = ddx * ddx + ddy * ddy;
                if (r2 <= R * R) d.values[grid.index(ix, iy)] += scale[k] * kernel.profile(r2);
            }
        }
    });
    for (std::size_t k = 0; k < points.size(); ++k)
        if (fallback[k]) d.values[*fallback[k]] += share / area;
    return d;
}

struct SupportRegion {
    FeatureGrid grid;
    IndexSet mask;
    double chi = 1;
    double threshold = 0;  // density level of the last cell taken
    std::optional<std::size_t> last_cell;

    std::size_t size() const { return mask.count(); }
    bool contains(Point2 p) const {
        auto c = grid.cell_of(p);
        return c && mask.test(*c);
    }
};

/// Highest-density cells taken greedily (ties by cell index) until their
/// mass reaches chi of the total; zero-density cells are never taken.
inline SupportRegion support_region(const Density& d, double chi) {
    if (!(chi > 0) || chi > 1) throw Error("chi must lie in (0, 1]");
    std::vector<std::size_t> order(d.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d.values[a] > d.values[b]; });
    long double total = 0;
    for (double v : d.values) total += v;
    const long double goal = chi * total;
    SupportRegion r{d.grid, IndexSet(d.values.size()), chi, 0, std::nullopt};
    long double acc = 0;
    for (auto c : order) {
        if (d.values[c] <= 0) break;
        if (chi < 1 && acc >= goal) break;
        r.mask.set(c);
        acc += d.values[c];
        r.threshold = d.values[c];
        r.last_cell = c;
    }
    return r;
}

inline double mass_in(const Density& d, const IndexSet& mask) {
    long double s = 0;
    mask.for_each([&](std::size_t i) { s += d.values[i]; });
    return static_cast<double>(s * d.grid.cell_area());
}

inline void check_same_grid(const FeatureGrid& a, const FeatureGrid& b) {
    if (!(a == b)) throw Error("support regions live on different grids");
}

/// Cellwise boolean combination by truth-table code; complement is relative
/// to the whole grid.
inline SupportRegion region_op(unsigned code, const SupportRegion& a, const SupportRegion& b) {
    check_same_grid(a.grid, b.grid);
    return {a.grid, IndexSet::apply(code, a.mask, b.mask), std::min(a.chi, b.chi), 0, std::nullopt};
}

inline SupportRegion region_complement(const SupportRegion& a) {
    return {a.grid, a.mask.complement(), a.chi, 0, std::nullopt};
}

/// p-mass over the masks' intersection divided by p-mass over their union.
inline double stochastic_lambda(const IndexSet& a, const IndexSet& b, const Density& p) {
    double num = mass_in(p, a & b);
    double den = mass_in(p, a | b);
    if (!(den > 0)) throw Error("stochastic lambda undefined: the regions carry no mass under p");
    return num / den;
}

inline double stochastic_lambda(const SupportRegion& a, const SupportRegion& b, const Density& p) {
    check_same_grid(a.grid, b.grid);
    check_same_grid(a.grid, p.grid);
    return stochastic_lambda(a.mask, b.mask, p);
}

// -- framework ----------------------------------------------------------------

struct KdeConfig {
    std::optional<double> bandwidth;  // default: see default_bandwidth
    double chi = 0.97;
    std::size_t resolution = 256;
    double margin_sigmas = 3;
    double truncation_sigmas = 4;
};

/// Per-axis Silverman-style scale std * N^(-1/6) (sample standard deviation),
/// combined into one isotropic bandwidth by the geometric mean.
struct BandwidthRule {
    double sigma_x = 0;
    double sigma_y = 0;
    double sigma = 0;
};

inline BandwidthRule default_bandwidth(const std::vector<Point2>& pts) {
    if (pts.size() < 2) throw Error("default bandwidth needs at least two points");
    auto n = static_cast<double>(pts.size());
    double mx = 0, my = 0;
    for (const auto& p : pts) mx += p.x, my += p.y;
    mx /= n, my /= n;
    double vx = 0, vy = 0;
    for (const auto& p : pts) vx += (p.x - mx) * (p.x - mx), vy += (p.y - my) * (p.y - my);
    double f = std::pow(n, -1.0 / 6.0);
    BandwidthRule r;
    r.sigma_x = std::sqrt(vx / (n - 1)) * f;
    r.sigma_y = std::sqrt(vy / (n - 1)) * f;
    r.sigma = std::sqrt(r.sigma_x * r.sigma_y);
    if (!(r.sigma > 0)) throw Error("default bandwidth is zero: points are collinear along an axis");
    return r;
}

class StochasticFramework {
public:
    /// `extent_points` widen the grid (e.g. a query dataset) without entering Γ.
    StochasticFramework(std::vector<PointSet> datasets, KdeConfig cfg = {},
                        const std::vector<Point2>& extent_points = {})
        : sets_(std::move(datasets)), cfg_(cfg) {
        if (sets_.empty()) throw Error("stochastic framework needs at least one dataset");
        for (const auto& s : sets_) {
            if (s.points.empty()) throw Error("dataset '" + s.id + "' has no points");
            gamma_.insert(gamma_.end(), s.points.begin(), s.points.end());
        }
        if (cfg_.bandwidth) {
            if (!(*cfg_.bandwidth > 0)) throw Error("kernel bandwidth must be positive");
            rule_.sigma = rule_.sigma_x = rule_.sigma_y = *cfg_.bandwidth;
        } else {
            rule_ = default_bandwidth(gamma_);
        }
        kernel_ = gaussian_kernel(rule_.sigma, cfg_.truncation_sigmas);
        std::vector<Point2> all = gamma_;
        all.insert(all.end(), extent_points.begin(), extent_points.end());
        grid_ = FeatureGrid::covering(all, cfg_.margin_sigmas * rule_.sigma, cfg_.resolution);
        for (const auto& s : sets_) {
            densities_.push_back(kde(s.points, kernel_, grid_));
            regions_.push_back(support_region(densities_.back(), cfg_.chi));
        }
        union_ = kde(gamma_, kernel_, grid_);
    }

    const std::vector<PointSet>& datasets() const { return sets_; }
    const std::vector<Density>& densities() const { return densities_; }
    const std::vector<SupportRegion>& regions() const { return regions_; }
    const Density& union_density() const { return union_; }
    const std::vector<Point2>& gamma() const { return gamma_; }
    const FeatureGrid& grid() const { return grid_; }
    const Kernel& kernel() const { return kernel_; }
    const BandwidthRule& bandwidth() const { return rule_; }
    const KdeConfig& config() const { return cfg_; }

    std::size_t index_of(const std::string& id) const {
        for (std::size_t i = 0; i < sets_.size(); ++i)
            if (sets_[i].id == id) return i;
        throw Error("no stochastic dataset '" + id + "'");
    }

    double lambda(std::size_t i, std::size_t j) const { return stochastic_lambda(regions_[i], regions_[j], union_); }

    /// Region of a set expression over dataset ids.
    IndexSet eval_region(const SetExpr& e) const {
        const auto& n = *e.node();
        switch (n.kind) {
            case detail::NodeKind::Leaf: return regions_[index_of(n.name)].mask;
            case detail::NodeKind::Negation: return eval_region(e.child()).complement();
            case detail::NodeKind::Binary:
                return IndexSet::apply(n.op, eval_region(e.left()), eval_region(e.right()));
        }
        return {};
    }

private:
    std::vector<PointSet> sets_;
    KdeConfig cfg_;
    std::vector<Point2> gamma_;
    BandwidthRule rule_;
    Kernel kernel_;
    FeatureGrid grid_;
    std::vector<Density> densities_;
    std::vector<SupportRegion> regions_;
    Density union_;
};

inline Density union_density(const StochasticFramework& sfw) { return sfw.union_density(); }

// -- membership report ------------------------------------------------------------

struct MembershipRow {
    std::string dataset;
    std::size_t count = 0;  // new points inside the dataset's region
    double percent = 0;     // 100 x mass of the dataset's density inside the new region
};

struct RegionMatch {
    std::string expr;
    double lambda = 0;
    std::size_t nodes = 0;
};

struct MembershipReport {
    std::vector<MembershipRow> rows;
    std::vector<RegionMatch> best;  // co-optimal region expressions, ranked
    double best_lambda = 0;
    double bandwidth = 0;
    double chi = 0;
    std::size_t resolution = 0;
    std::size_t new_points = 0;
    std::size_t new_region_cells = 0;

    static constexpr const char* kCountDefinition = "count = new points lying inside the support region of the dataset";
    static constexpr const char* kPercentDefinition =
        "percent = 100 x mass of the dataset's density inside the support region of the new points";
};

/// Relates a new point set to existing datasets. The grid is rebuilt so it
/// covers the new points too; the new points do not enter the union density.
inline MembershipReport membership_report(const std::vector<Point2>& new_points, const std::vector<PointSet>& datasets,
                                          KdeConfig cfg = {}, const SearchConfig& search = {}) {
    if (new_points.empty()) throw Error("membership report needs at least one new point");
    StochasticFramework sfw(datasets, cfg, new_points);
    Density dn = kde(new_points, sfw.kernel(), sfw.grid());
    SupportRegion rn = support_region(dn, sfw.config().chi);

    MembershipReport rep;
    rep.bandwidth = sfw.bandwidth().sigma;
    rep.chi = sfw.config().chi;
    rep.resolution = sfw.grid().nx();
    rep.new_points = new_points.size();
    rep.new_region_cells = rn.size();
    for (std::size_t i = 0; i < sfw.datasets().size(); ++i) {
        MembershipRow row{sfw.datasets()[i].id, 0, 0};
        for (const auto& p : new_points) row.count += sfw.regions()[i].contains(p);
        row.percent = 100.0 * mass_in(sfw.densities()[i], rn.mask);
        rep.rows.push_back(row);
    }

    std::vector<Operand> leaves;
    for (std::size_t i = 0; i < sfw.datasets().size(); ++i)
        leaves.push_back({SetExpr::leaf(sfw.datasets()[i].id), sfw.regions()[i].mask});
    std::vector<RegionMatch> all;
    const auto& p = sfw.union_density();
    enumerate_candidates(leaves, search, [&](const SetExpr& e, const IndexSet& v) {
        double den = mass_in(p, v | rn.mask);
        if (!(den > 0)) return;
        double lam = mass_in(p, v & rn.mask) / den;
        if (lam < rep.best_lambda - 1e-12) return;
        if (lam > rep.best_lambda + 1e-12) {
            rep.best_lambda = lam;
            all.clear();
        }
        all.push_back({unparse(e), lam, node_count(e)});
    });
    std::sort(all.begin(), all.end(), [](const RegionMatch& a, const RegionMatch& b) {
        if (a.nodes != b.nodes) return a.nodes < b.nodes;
        return a.expr < b.expr;
    });
    rep.best = std::move(all);
    return rep;
}

// -- Bayesian decision map ----------------------------------------------------------

struct DecisionMap {
    FeatureGrid grid;
    std::vector<int> labels;  // dataset index per cell, -1 where every density is below the floor
    double floor = 0;
};

/// Equiprobable classes: each cell takes the dataset with the largest density,
/// ties going to the lowest index.
inline DecisionMap bayes_decision_map(const StochasticFramework& sfw, double relative_floor = 1e-12) {
    const auto& ds = sfw.densities();
    if (ds.size() < 2) throw Error("decision map needs at least two datasets");
    double peak = 0;
    for (const auto& d : ds) peak = std::max(peak, *std::max_element(d.values.begin(), d.values.end()));
    DecisionMap m{sfw.grid(), std::vector<int>(sfw.grid().cells(), -1), relative_floor * peak};
    for (std::size_t c = 0; c < m.labels.size(); ++c) {
        int best = -1;
        double v = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds[i].values[c] < m.floor) continue;
            if (best < 0 || ds[i].values[c] > v) {
                best = static_cast<int>(i);
                v = ds[i].values[c];
            }
        }
        m.labels[c] = best;
    }
    return m;
}

// -- convergence to the discrete framework ----------------------------------------------

/// Distinct feature points as elements of a discrete framework, one dataset
/// per point set (element ids follow the sorted order of the points).
struct DiscreteEmbedding {
    Framework framework;
    std::vector<Point2> coords;  // coords[id]

    ElementId id_of(Point2 p) const {
        auto it = std::lower_bound(coords.begin(), coords.end(), p);
        if (it == coords.end() || !(*it == p)) throw Error("point is not part of the embedding");
        return ElementId{static_cast<std::int64_t>(it - coords.begin())};
    }
};

inline DiscreteEmbedding embed_points(const std::vector<PointSet>& sets) {
    std::vector<Point2> coords;
    for (const auto& s : sets) coords.insert(coords.end(), s.points.begin(), s.points.end());
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    Framework fw("points", id_range(0, static_cast<std::int64_t>(coords.size()) - 1));
    DiscreteEmbedding e{std::move(fw), coords};
    for (const auto& s : sets) {
        std::vector<ElementId> members;
        for (const auto& p : s.points) members.push_back(e.id_of(p));
        e.framework.add_dataset(s.id, std::move(members));
    }
    return e;
}

using CountMatrix = std::vector<std::vector<std::size_t>>;  // [region i][point set j]

/// Points of each set j lying in dataset i of the discrete framework.
inline CountMatrix discrete_counts(const std::vector<PointSet>& sets, const DiscreteEmbedding& e) {
    CountMatrix m(sets.size(), std::vector<std::size_t>(sets.size(), 0));
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const Dataset& di = e.framework.dataset(sets[i].id);
        for (std::size_t j = 0; j < sets.size(); ++j)
            for (const auto& p : sets[j].points) m[i][j] += di.contains(e.id_of(p));
    }
    return m;
}

inline CountMatrix stochastic_counts(const StochasticFramework& sfw) {
    const auto& sets = sfw.datasets();
    CountMatrix m(sets.size(), std::vector<std::size_t>(sets.size(), 0));
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t j = 0; j < sets.size(); ++j)
            for (const auto& p : sets[j].points) m[i][j] += sfw.regions()[i].contains(p);
    return m;
}

struct ConvergenceStep {
    double bandwidth = 0;
    CountMatrix counts;
    std::size_t error = 0;  // sum of absolute count differences to the discrete values
};

struct ConvergenceReport {
    CountMatrix discrete;
    std::vector<ConvergenceStep> steps;
    bool monotone = true;  // error never increases from one halving to the next
    bool exact_at_end = false;
    std::optional<std::size_t> first_exact;
    double min_distance = 0;
    /// Bandwidth below which exact agreement is guaranteed: a chi-region blob
    /// has radius sigma * sqrt(-2 ln(1 - chi)), which must stay under half the
    /// closest distinct-point distance.
    double guaranteed_below = 0;
};

inline ConvergenceReport convergence_check(const std::vector<PointSet>& sets, const DiscreteEmbedding& discrete,
                                           KdeConfig cfg = {}, int halvings = 4) {
    ConvergenceReport rep;
    rep.discrete = discrete_counts(sets, discrete);
    const auto& pts = discrete.coords;
    rep.min_distance = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b)
            rep.min_distance = std::min(rep.min_distance, std::hypot(pts[a].x - pts[b].x, pts[a].y - pts[b].y));
    rep.guaranteed_below = rep.min_distance / (2 * std::sqrt(-2 * std::log(1 - cfg.chi)));

    double sigma = cfg.bandwidth.value_or(0);
    for (int k = 0; k <= halvings; ++k) {
        KdeConfig step = cfg;
        if (k > 0 || cfg.bandwidth) step.bandwidth = sigma;
        StochasticFramework sfw(sets, step);
        sigma = sfw.bandwidth().sigma;
        ConvergenceStep s{sigma, stochastic_counts(sfw), 0};
        for (std::size_t i = 0; i < sets.size(); ++i)
            for (std::size_t j = 0; j < sets.size(); ++j)
                s.error += s.counts[i][j] > rep.discrete[i][j] ? s.counts[i][j] - rep.discrete[i][j]
                                                              : rep.discrete[i][j] - s.counts[i][j];
        if (!rep.steps.empty() && s.error > rep.steps.back().error) rep.monotone = false;
        if (s.error == 0 && !rep.first_exact) rep.first_exact = rep.steps.size();
        rep.steps.push_back(std::move(s));
        sigma /= 2;
    }
    rep.exact_at_end = rep.steps.back().error == 0;
    return rep;
}

// -- export ------------------------------------------------------------------------

/// Grayscale (P2) image, top row = highest y, scaled so the peak is 255.
inline std::string to_pgm(const Density& d) {
    double peak = *std::max_element(d.values.begin(), d.values.end());
    std::string out = "P2\n" + std::to_string(d.grid.nx()) + " " + std::to_string(d.grid.ny()) + "\n255\n";
    for (std::size_t r = 0; r < d.grid.ny(); ++r) {
        std::size_t iy = d.grid.ny() - 1 - r;
        for (std::size_t ix = 0; ix < d.grid.nx(); ++ix) {
            int v = peak > 0 ? static_cast<int>(std::lround(255.0 * d.values[d.grid.index(ix, iy)] / peak)) : 0;
            out += std::to_string(v);
            out += ix + 1 < d.grid.nx() ? ' ' : '\n';
        }
    }
    return out;
}

/// Bitmap (P1) of a mask, top row = highest y, 1 = inside.
inline std::string to_pbm(const FeatureGrid& g, const IndexSet& mask) {
    std::string out = "P1\n" + std::to_string(g.nx()) + " " + std::to_string(g.ny()) + "\n";
    for (std::size_t r = 0; r < g.ny(); ++r) {
        std::size_t iy = g.ny() - 1 - r;
        for (std::size_t ix = 0; ix < g.nx(); ++ix) {
            out += mask.test(g.index(ix, iy)) ? '1' : '0';
            out += ix + 1 < g.nx() ? ' ' : '\n';
        }
    }
    return out;
}

inline std::string to_csv(const Density& d) {
    std::string out = "ix,iy,x,y,density\n";
    char buf[128];
    for (std::size_t iy = 0; iy < d.grid.ny(); ++iy)
        for (std::size_t ix = 0; ix < d.grid.nx(); ++ix) {
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.9g,%.9g,%.9g\n", ix, iy, d.grid.cx(ix), d.grid.cy(iy),
                          d.values[d.grid.index(ix, iy)]);
            out += buf;
        }
    return out;
}

}  // namespace metamodel::stochastic
