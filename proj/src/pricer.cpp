#include "omfloc/pricer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>

namespace omfloc {

namespace {

double norm_of(std::span<const double> z, const NormSpec& norm) {
    thread_local std::vector<double> zero;
    zero.assign(z.size(), 0.0);
    return norm_distance(z, zero, norm);
}

// Adds weight * (gradient of ||x - a||) to g; zero at x == a.
void add_norm_gradient(PointView a, PointView x, double weight, const NormSpec& norm, double* g) {
    const std::size_t d = a.size();
    switch (norm.kind()) {
        case NormSpec::Kind::L1:
            for (std::size_t l = 0; l < d; ++l) {
                const double z = x[l] - a[l];
                if (z > 0) g[l] += weight;
                else if (z < 0) g[l] -= weight;
            }
            return;
        case NormSpec::Kind::L2: {
            const double r = norm_distance(a, x, norm);
            if (r == 0.0) return;
            for (std::size_t l = 0; l < d; ++l) g[l] += weight * (x[l] - a[l]) / r;
            return;
        }
        case NormSpec::Kind::LTau: {
            const double r = norm_distance(a, x, norm);
            if (r == 0.0) return;
            const double tau = norm.tau();
            for (std::size_t l = 0; l < d; ++l) {
                const double z = x[l] - a[l];
                if (z == 0.0) continue;
                const double mag = std::pow(std::abs(z) / r, tau - 1.0);
                g[l] += weight * (z > 0 ? mag : -mag);
            }
            return;
        }
    }
}

// Dual norm, used by the optimality test at a demand point.
double dual_norm(std::span<const double> z, const NormSpec& norm) {
    switch (norm.kind()) {
        case NormSpec::Kind::L1: {
            double m = 0.0;
            for (double v : z) m = std::max(m, std::abs(v));
            return m;
        }
        case NormSpec::Kind::L2:
            return norm_of(z, norm);
        case NormSpec::Kind::LTau: {
            const double q = norm.tau() / (norm.tau() - 1.0);
            double m = 0.0;
            for (double v : z) m = std::max(m, std::abs(v));
            if (m == 0.0) return 0.0;
            double s = 0.0;
            for (double v : z) s += std::pow(std::abs(v) / m, q);
            return m * std::pow(s, 1.0 / q);
        }
    }
    return 0.0;
}

Point weighted_median_point(const Instance& inst, std::span<const int> subset, std::span<const double> w) {
    const std::size_t d = inst.d();
    Point x(d);
    std::vector<std::pair<double, double>> vals;
    double total = 0.0;
    for (double v : w) total += v;
    for (std::size_t l = 0; l < d; ++l) {
        vals.clear();
        for (std::size_t t = 0; t < subset.size(); ++t)
            if (w[t] > 0) vals.emplace_back(inst.point(subset[t])[l], w[t]);
        std::sort(vals.begin(), vals.end());
        double acc = 0.0;
        x[l] = vals.back().first;
        for (const auto& [v, wt] : vals) {
            acc += wt;
            if (acc >= 0.5 * total * (1 - 1e-15)) {
                x[l] = v;
                break;
            }
        }
    }
    return x;
}

// Weiszfeld with the Vardi-Zhang modification at demand points.
Point weiszfeld(const Instance& inst, std::span<const int> subset, std::span<const double> w,
                std::vector<double>* trace) {
    const std::size_t d = inst.d();
    const NormSpec& norm = inst.norm();
    double total = 0.0;
    Point x(d, 0.0);
    for (std::size_t t = 0; t < subset.size(); ++t) {
        total += w[t];
        auto a = inst.point(subset[t]);
        for (std::size_t l = 0; l < d; ++l) x[l] += w[t] * a[l];
    }
    for (auto& v : x) v /= total;
    Point tx(d), r(d);
    for (int it = 0; it < 10000; ++it) {
        double eta = 0.0, denom = 0.0;
        std::fill(tx.begin(), tx.end(), 0.0);
        std::fill(r.begin(), r.end(), 0.0);
        for (std::size_t t = 0; t < subset.size(); ++t) {
            if (w[t] <= 0) continue;
            auto a = inst.point(subset[t]);
            const double dist = norm_distance(a, x, norm);
            if (dist < 1e-14) {
                eta += w[t];
                continue;
            }
            const double f = w[t] / dist;
            denom += f;
            for (std::size_t l = 0; l < d; ++l) {
                tx[l] += f * a[l];
                r[l] += f * (a[l] - x[l]);
            }
        }
        if (denom == 0.0) break;  // every weight sits at x
        for (auto& v : tx) v /= denom;
        const double rn = norm_of(r, norm);
        if (eta > 0.0 && rn <= eta) break;  // optimal at this demand point
        const double keep = eta > 0.0 ? std::min(1.0, eta / rn) : 0.0;
        double step = 0.0;
        for (std::size_t l = 0; l < d; ++l) {
            const double nx = (1.0 - keep) * tx[l] + keep * x[l];
            step = std::max(step, std::abs(nx - x[l]));
            x[l] = nx;
        }
        if (trace) trace->push_back(weber_objective(inst, subset, w, x));
        if (step < 1e-9) break;
    }
    // Convergence toward an optimal demand point is slow; test them directly.
    double fx = weber_objective(inst, subset, w, x);
    for (std::size_t t = 0; t < subset.size(); ++t) {
        if (w[t] <= 0) continue;
        auto a = inst.point(subset[t]);
        const double fa = weber_objective(inst, subset, w, a);
        if (fa < fx) {
            fx = fa;
            x.assign(a.begin(), a.end());
        }
    }
    return x;
}

Point descend_ltau(const Instance& inst, std::span<const int> subset, std::span<const double> w, Point x,
                   const Box& box) {
    const std::size_t d = inst.d();
    double diam = 0.0;
    for (std::size_t l = 0; l < d; ++l) diam = std::max(diam, box.upper[l] - box.lower[l]);
    double step = 0.25 * std::max(diam, 1e-12);
    double fx = weber_objective(inst, subset, w, x);
    Point g(d), y(d);
    for (int it = 0; it < 5000 && step > 1e-12 * (1.0 + diam); ++it) {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t t = 0; t < subset.size(); ++t)
            if (w[t] > 0) add_norm_gradient(inst.point(subset[t]), x, w[t], inst.norm(), g.data());
        double gn = 0.0;
        for (double v : g) gn += v * v;
        gn = std::sqrt(gn);
        if (gn == 0.0) break;
        for (std::size_t l = 0; l < d; ++l)
            y[l] = std::clamp(x[l] - step * g[l] / gn, box.lower[l], box.upper[l]);
        const double fy = weber_objective(inst, subset, w, y);
        if (fy < fx) {
            x = y;
            fx = fy;
            step *= 1.2;
        } else {
            step *= 0.5;
        }
    }
    return x;
}

}  // namespace

std::vector<double> point_scores(const Instance& instance, const MasterDuals& duals, PointView x) {
    std::vector<double> e(instance.n());
    for (std::size_t i = 0; i < instance.n(); ++i)
        e[i] = -duals.alpha[i] + duals.c[i] * norm_distance(instance.point(i), x, instance.norm());
    return e;
}

double subset_reduced_cost(const Instance& instance, const MasterDuals& duals, std::span<const int> subset,
                           PointView x) {
    double rc = duals.gamma;
    for (int i : subset) rc += -duals.alpha[i] + duals.c[i] * norm_distance(instance.point(i), x, instance.norm());
    return rc;
}

double weber_objective(const Instance& instance, std::span<const int> subset, std::span<const double> weights,
                       PointView x) {
    double f = 0.0;
    for (std::size_t t = 0; t < subset.size(); ++t)
        if (weights[t] > 0) f += weights[t] * norm_distance(instance.point(subset[t]), x, instance.norm());
    return f;
}

Point weber_solve(const Instance& instance, std::span<const int> subset, std::span<const double> weights,
                  std::vector<double>* trace) {
    if (subset.empty()) throw InvalidInput("weber_solve: empty subset");
    if (weights.size() != subset.size()) throw InvalidInput("weber_solve: one weight per point required");
    const std::size_t d = instance.d();
    int positive = 0, last = -1;
    for (std::size_t t = 0; t < weights.size(); ++t) {
        if (weights[t] < 0 || !std::isfinite(weights[t])) throw InvalidInput("weber_solve: weights must be >= 0");
        if (weights[t] > 0) {
            ++positive;
            last = static_cast<int>(t);
        }
    }
    if (positive == 0) {
        Point x(d, 0.0);
        for (int i : subset)
            for (std::size_t l = 0; l < d; ++l) x[l] += instance.point(i)[l];
        for (auto& v : x) v /= static_cast<double>(subset.size());
        return x;
    }
    if (positive == 1) {
        auto a = instance.point(subset[last]);
        return Point(a.begin(), a.end());
    }
    switch (instance.norm().kind()) {
        case NormSpec::Kind::L1:
            return weighted_median_point(instance, subset, weights);
        case NormSpec::Kind::L2:
            return weiszfeld(instance, subset, weights, trace);
        case NormSpec::Kind::LTau: {
            Box box{Point(d, std::numeric_limits<double>::infinity()),
                    Point(d, -std::numeric_limits<double>::infinity())};
            for (std::size_t t = 0; t < subset.size(); ++t) {
                if (weights[t] <= 0) continue;
                auto a = instance.point(subset[t]);
                for (std::size_t l = 0; l < d; ++l) {
                    box.lower[l] = std::min(box.lower[l], a[l]);
                    box.upper[l] = std::max(box.upper[l], a[l]);
                }
            }
            Point center(d);
            for (std::size_t l = 0; l < d; ++l) center[l] = 0.5 * (box.lower[l] + box.upper[l]);
            Point best = descend_ltau(instance, subset, weights, weiszfeld(instance, subset, weights, nullptr), box);
            double fbest = weber_objective(instance, subset, weights, best);
            Point other = descend_ltau(instance, subset, weights, center, box);
            const double fo = weber_objective(instance, subset, weights, other);
            if (fo < fbest) {
                best = other;
                fbest = fo;
            }
            // A demand point may be optimal; test it with the dual-norm condition.
            std::vector<double> g(d);
            for (std::size_t j = 0; j < subset.size(); ++j) {
                if (weights[j] <= 0) continue;
                auto a = instance.point(subset[j]);
                const double fa = weber_objective(instance, subset, weights, a);
                if (fa >= fbest) continue;
                std::fill(g.begin(), g.end(), 0.0);
                for (std::size_t t = 0; t < subset.size(); ++t)
                    if (t != j && weights[t] > 0) add_norm_gradient(instance.point(subset[t]), a, weights[t], instance.norm(), g.data());
                best.assign(a.begin(), a.end());
                fbest = fa;
                if (dual_norm(g, instance.norm()) <= weights[j]) break;
            }
            return best;
        }
    }
    return Point(d, 0.0);
}

IncompatibilityGraph incompatibility_graph(const BranchConstraints& branching, std::span<const double> scores) {
    IncompatibilityGraph g;
    if (branching.size() == 0) {
        for (int i = 0; i < static_cast<int>(scores.size()); ++i) g.groups.push_back({i});
    } else {
        g.groups = branching.groups();
    }
    std::vector<int> slot(scores.size());
    g.weight.assign(g.groups.size(), 0.0);
    for (std::size_t v = 0; v < g.groups.size(); ++v) {
        for (int i : g.groups[v]) {
            slot[i] = static_cast<int>(v);
            g.weight[v] += scores[i];
        }
    }
    g.adjacent.assign(g.groups.size(), {});
    for (const auto& [a, b] : branching.different_pairs()) {
        const int u = slot[a], v = slot[b];
        if (std::find(g.adjacent[u].begin(), g.adjacent[u].end(), v) != g.adjacent[u].end()) continue;
        g.adjacent[u].push_back(v);
        g.adjacent[v].push_back(u);
    }
    return g;
}

std::vector<int> greedy_mwis(const IncompatibilityGraph& graph) {
    const std::size_t m = graph.weight.size();
    std::vector<char> blocked(m, 0);
    std::vector<int> chosen;
    while (true) {
        int best = -1;
        for (std::size_t v = 0; v < m; ++v) {
            if (blocked[v] || graph.weight[v] >= 0) continue;
            if (best < 0 || graph.weight[v] < graph.weight[best]) best = static_cast<int>(v);
        }
        if (best < 0) break;
        chosen.push_back(best);
        blocked[best] = 1;
        for (int u : graph.adjacent[best]) blocked[u] = 1;
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::vector<int> exact_mwis(const IncompatibilityGraph& graph) {
    std::vector<int> neg;
    for (std::size_t v = 0; v < graph.weight.size(); ++v)
        if (graph.weight[v] < 0) neg.push_back(static_cast<int>(v));
    if (neg.size() > 62) throw InvalidInput("exact_mwis: too many negative vertices");
    std::sort(neg.begin(), neg.end(), [&](int a, int b) {
        return graph.weight[a] < graph.weight[b] || (graph.weight[a] == graph.weight[b] && a < b);
    });
    const std::size_t k = neg.size();
    std::vector<std::uint64_t> conflict(k, 0);
    std::vector<int> pos(graph.weight.size(), -1);
    for (std::size_t t = 0; t < k; ++t) pos[neg[t]] = static_cast<int>(t);
    for (std::size_t t = 0; t < k; ++t)
        for (int u : graph.adjacent[neg[t]])
            if (pos[u] >= 0) conflict[t] |= std::uint64_t{1} << pos[u];
    std::vector<double> tail(k + 1, 0.0);
    for (std::size_t t = k; t-- > 0;) tail[t] = tail[t + 1] + graph.weight[neg[t]];
    double best = 0.0;
    std::uint64_t best_set = 0;
    auto rec = [&](auto&& self, std::size_t t, std::uint64_t set, std::uint64_t banned, double value) -> void {
        if (value < best) {
            best = value;
            best_set = set;
        }
        if (t == k || value + tail[t] >= best) return;
        if (!(banned >> t & 1))
            self(self, t + 1, set | std::uint64_t{1} << t, banned | conflict[t], value + graph.weight[neg[t]]);
        self(self, t + 1, set, banned, value);
    };
    rec(rec, 0, 0, 0, 0.0);
    std::vector<int> chosen;
    for (std::size_t t = 0; t < k; ++t)
        if (best_set >> t & 1) chosen.push_back(neg[t]);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

namespace {

enum class Selection { SignRule, Greedy, Exact };

struct Candidate {
    std::vector<int> subset;
    Point x;
    double value = 0.0;
};

class Selector {
public:
    Selector(const Instance& inst, const MasterDuals& duals, const BranchConstraints* branching, Selection mode,
             int exact_limit)
        : inst_(inst), duals_(duals), branching_(branching), mode_(mode), exact_limit_(exact_limit) {}

    // Best subset for a fixed x under the active rule, and its reduced cost.
    Candidate at(PointView x) const {
        Candidate c;
        c.x.assign(x.begin(), x.end());
        const auto e = point_scores(inst_, duals_, x);
        c.value = duals_.gamma;
        if (mode_ == Selection::SignRule || branching_ == nullptr || branching_->empty()) {
            for (int i = 0; i < static_cast<int>(e.size()); ++i)
                if (e[i] < 0) {
                    c.subset.push_back(i);
                    c.value += e[i];
                }
            return c;
        }
        const auto g = incompatibility_graph(*branching_, e);
        int negative = 0;
        for (double w : g.weight) negative += w < 0;
        const bool exact = mode_ == Selection::Exact && negative <= exact_limit_;
        for (int v : exact ? exact_mwis(g) : greedy_mwis(g)) {
            c.subset.insert(c.subset.end(), g.groups[v].begin(), g.groups[v].end());
            c.value += g.weight[v];
        }
        std::sort(c.subset.begin(), c.subset.end());
        return c;
    }

    // Alternates Weber relocation for the current subset with re-selection.
    Candidate refine(Candidate c, int rounds) const {
        for (int r = 0; r < rounds && !c.subset.empty(); ++r) {
            std::vector<double> w(c.subset.size());
            for (std::size_t t = 0; t < c.subset.size(); ++t) w[t] = duals_.c[c.subset[t]];
            const Point x = weber_solve(inst_, c.subset, w);
            Candidate next = at(x);
            const double kept = subset_reduced_cost(inst_, duals_, c.subset, x);
            if (kept < next.value) {
                next.subset = c.subset;
                next.value = kept;
            }
            if (!(next.value < c.value - 1e-12)) break;
            c = std::move(next);
        }
        return c;
    }

private:
    const Instance& inst_;
    const MasterDuals& duals_;
    const BranchConstraints* branching_;
    Selection mode_;
    int exact_limit_;
};

// Keeps the best candidate per subset; emits the most negative ones.
class ColumnCollector {
public:
    void offer(const Candidate& c) {
        if (c.subset.empty()) return;
        auto it = best_.find(c.subset);
        if (it == best_.end() || c.value < it->second.value) best_[c.subset] = c;
    }

    std::vector<Column> take(const Instance& inst, const MasterDuals& duals, const BranchConstraints* branching,
                             double threshold, int cap) const {
        std::vector<const Candidate*> list;
        for (const auto& [s, c] : best_) {
            if (c.value >= -threshold) continue;
            if (branching != nullptr && !branching->allows(c.subset)) continue;
            list.push_back(&c);
        }
        std::stable_sort(list.begin(), list.end(),
                         [](const Candidate* a, const Candidate* b) { return a->value < b->value; });
        std::vector<Column> out;
        for (const Candidate* c : list) {
            if (static_cast<int>(out.size()) >= cap) break;
            Column col = make_column(inst, c->subset, c->x);
            // Re-check with the stored distances.
            double rc = duals.gamma;
            for (std::size_t t = 0; t < col.subset.size(); ++t)
                rc += -duals.alpha[col.subset[t]] + duals.c[col.subset[t]] * col.delta[t];
            if (rc < -threshold) out.push_back(std::move(col));
        }
        return out;
    }

private:
    std::map<std::vector<int>, Candidate> best_;
};

std::vector<Column> heuristic_price(const Instance& inst, const MasterDuals& duals,
                                    const BranchConstraints* branching, std::span<const Point> candidates,
                                    const PricerOptions& opt, Selection mode) {
    Selector sel(inst, duals, branching, mode, 0);
    ColumnCollector out;
    for (const auto& x : candidates) {
        Candidate c = sel.at(x);
        if (c.subset.empty()) continue;
        out.offer(sel.refine(std::move(c), opt.refine_rounds));
    }
    return out.take(inst, duals, branching, opt.threshold, opt.max_columns);
}

}  // namespace

std::vector<Point> candidate_points(const Instance& instance, const MasterDuals& duals, std::mt19937_64& rng,
                                    int samples) {
    const std::size_t d = instance.d();
    std::vector<int> active;
    for (std::size_t i = 0; i < instance.n(); ++i)
        if (duals.alpha[i] > 1e-12) active.push_back(static_cast<int>(i));
    std::vector<Point> out;
    if (active.empty()) return out;
    Point lo(instance.point(active[0]).begin(), instance.point(active[0]).end()), hi = lo;
    for (int i : active) {
        for (std::size_t l = 0; l < d; ++l) {
            lo[l] = std::min(lo[l], instance.point(i)[l]);
            hi[l] = std::max(hi[l], instance.point(i)[l]);
        }
    }
    Point center(d);
    for (std::size_t l = 0; l < d; ++l) center[l] = 0.5 * (lo[l] + hi[l]);
    out.push_back(center);
    for (int s = 0; s < samples; ++s) {
        Point x(d);
        for (std::size_t l = 0; l < d; ++l) x[l] = std::uniform_real_distribution<double>(lo[l], hi[l])(rng);
        out.push_back(std::move(x));
    }
    for (int i : active) out.emplace_back(instance.point(i).begin(), instance.point(i).end());
    return out;
}

std::vector<Column> heuristic_price_root(const Instance& instance, const MasterDuals& duals,
                                         std::span<const Point> candidates, const PricerOptions& options) {
    return heuristic_price(instance, duals, nullptr, candidates, options, Selection::SignRule);
}

std::vector<Column> heuristic_price_branched(const Instance& instance, const MasterDuals& duals,
                                             const BranchConstraints& branching, std::span<const Point> candidates,
                                             const PricerOptions& options) {
    return heuristic_price(instance, duals, &branching, candidates, options, Selection::Greedy);
}

double distance_lower_bound(PointView a, const Box& box, const NormSpec& norm) {
    thread_local std::vector<double> z;
    z.resize(a.size());
    for (std::size_t l = 0; l < a.size(); ++l) {
        const double c = std::clamp(a[l], box.lower[l], box.upper[l]);
        z[l] = a[l] - c;
    }
    return norm_of(z, norm);
}

double distance_upper_bound(PointView a, const Box& box, const NormSpec& norm) {
    thread_local std::vector<double> z;
    z.resize(a.size());
    for (std::size_t l = 0; l < a.size(); ++l)
        z[l] = std::max(std::abs(a[l] - box.lower[l]), std::abs(a[l] - box.upper[l]));
    return norm_of(z, norm);
}

namespace {

class SpatialSearch {
public:
    SpatialSearch(const Instance& inst, const MasterDuals& duals, const BranchConstraints& branching,
                  const ExactPricingOptions& opt)
        : inst_(inst), duals_(duals), opt_(opt), branched_(!branching.empty()), branching_(branching),
          selector_(inst, duals, &branching, Selection::Exact, opt.exact_mwis_limit) {
        if (branched_) {
            groups_ = branching.groups();
        } else {
            for (int i = 0; i < static_cast<int>(inst.n()); ++i) groups_.push_back({i});
        }
        std::vector<int> slot(inst.n());
        for (std::size_t v = 0; v < groups_.size(); ++v)
            for (int i : groups_[v]) slot[i] = static_cast<int>(v);
        adjacent_.assign(groups_.size(), {});
        for (const auto& [a, b] : branching.different_pairs()) {
            auto& adj = adjacent_[slot[a]];
            if (std::find(adj.begin(), adj.end(), slot[b]) != adj.end()) continue;
            adj.push_back(slot[b]);
            adjacent_[slot[b]].push_back(slot[a]);
        }
        const std::size_t m = groups_.size();
        lb_.resize(m);
        ub_.resize(m);
        at_center_.resize(m);
        grad_.resize(m * inst.d());
        acc_.resize(inst.d());
    }

    ExactPricingResult run() {
        ExactPricingResult res;
        const std::size_t d = inst_.d();
        incumbent_ = duals_.gamma;
        // Without branching only points with alpha > 0 can have e_i < 0, and
        // projecting x onto their box shortens every distance to them.
        std::vector<int> active;
        for (std::size_t i = 0; i < inst_.n(); ++i)
            if (branched_ || duals_.alpha[i] > 0) active.push_back(static_cast<int>(i));
        if (active.empty()) {
            res.min_reduced_cost = res.lower_bound = incumbent_;
            res.exact = true;
            return res;
        }
        Box root{Point(inst_.point(active[0]).begin(), inst_.point(active[0]).end()), {}};
        root.upper = root.lower;
        for (int i : active)
            for (std::size_t l = 0; l < d; ++l) {
                root.lower[l] = std::min(root.lower[l], inst_.point(i)[l]);
                root.upper[l] = std::max(root.upper[l], inst_.point(i)[l]);
            }
        double scale = 0.0;
        for (std::size_t l = 0; l < d; ++l)
            scale = std::max({scale, std::abs(root.lower[l]), std::abs(root.upper[l]), root.upper[l] - root.lower[l]});
        const double tiny = 1e-9 * (1.0 + scale);

        std::vector<Box> boxes;
        using Entry = std::pair<double, long>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
        boxes.push_back(root);
        heap.emplace(bound(root), 0);
        double unresolved = std::numeric_limits<double>::infinity();
        long processed = 0;
        while (!heap.empty()) {
            const auto [lb, id] = heap.top();
            if (lb >= incumbent_ - opt_.tolerance) break;
            if (processed >= opt_.box_budget ||
                (opt_.deadline && (processed & 255) == 0 && std::chrono::steady_clock::now() > *opt_.deadline)) {
                break;
            }
            heap.pop();
            ++processed;
            Box box = boxes[id];
            Point center(d);
            double width = 0.0;
            std::size_t split = 0;
            for (std::size_t l = 0; l < d; ++l) {
                center[l] = 0.5 * (box.lower[l] + box.upper[l]);
                if (box.upper[l] - box.lower[l] > width) {
                    width = box.upper[l] - box.lower[l];
                    split = l;
                }
            }
            evaluate(center);
            if (lb >= incumbent_ - opt_.tolerance) continue;
            if (width < tiny) {
                unresolved = std::min(unresolved, lb);
                continue;
            }
            Box left = box, right = box;
            left.upper[split] = center[split];
            right.lower[split] = center[split];
            for (Box* child : {&left, &right}) {
                const double clb = std::max(bound(*child), lb);
                if (clb >= incumbent_ - opt_.tolerance) continue;
                boxes.push_back(std::move(*child));
                heap.emplace(clb, static_cast<long>(boxes.size()) - 1);
            }
        }
        double frontier = std::numeric_limits<double>::infinity();
        if (!heap.empty()) frontier = heap.top().first;
        res.min_reduced_cost = incumbent_;
        res.lower_bound = std::min({incumbent_, frontier, unresolved});
        res.exact = res.lower_bound >= incumbent_ - opt_.tolerance;
        res.boxes = processed;
        res.columns = collector_.take(inst_, duals_, branched_ ? &branching_ : nullptr, 1e-6, opt_.max_columns);
        return res;
    }

private:
    void evaluate(const Point& x) {
        Candidate c = selector_.at(x);
        if (c.subset.empty()) return;
        if (c.value < incumbent_ - 1e-12) c = selector_.refine(std::move(c), 5);
        if (c.value < incumbent_) incumbent_ = c.value;
        collector_.offer(c);
    }

    // Lower bound over the box of sum_{v in set} w_v(x), each w_v convex: the larger
    // of the summed per-group minima and the linearization at the center.
    double combined(const std::vector<int>& set, const Box& box) const {
        const std::size_t d = inst_.d();
        double sum_lb = 0.0, lin = 0.0;
        for (std::size_t l = 0; l < d; ++l) acc_[l] = 0.0;
        for (int v : set) {
            sum_lb += lb_[v];
            lin += at_center_[v];
            for (std::size_t l = 0; l < d; ++l) acc_[l] += grad_[v * d + l];
        }
        for (std::size_t l = 0; l < d; ++l) lin -= std::abs(acc_[l]) * 0.5 * (box.upper[l] - box.lower[l]);
        return std::max(sum_lb, lin);
    }

    // F(x) = gamma + min over independent sets I of sum_{v in I} w_v(x), where w_v
    // sums e_i over group v. Only groups that can be negative in the box matter.
    double bound(const Box& box) {
        const std::size_t d = inst_.d(), m = groups_.size();
        Point center(d);
        for (std::size_t l = 0; l < d; ++l) center[l] = 0.5 * (box.lower[l] + box.upper[l]);
        negative_.clear();
        for (std::size_t v = 0; v < m; ++v) {
            double lo = 0.0, hi = 0.0, mid = 0.0;
            for (std::size_t l = 0; l < d; ++l) grad_[v * d + l] = 0.0;
            for (int i : groups_[v]) {
                auto a = inst_.point(i);
                const double alpha = duals_.alpha[i], c = duals_.c[i];
                lo += -alpha + c * distance_lower_bound(a, box, inst_.norm());
                hi += -alpha + c * distance_upper_bound(a, box, inst_.norm());
                mid += -alpha + c * norm_distance(a, center, inst_.norm());
                if (c > 0) add_norm_gradient(a, center, c, inst_.norm(), &grad_[v * d]);
            }
            lb_[v] = lo;
            ub_[v] = hi;
            at_center_[v] = mid;
            double lin = mid;
            for (std::size_t l = 0; l < d; ++l)
                lin -= std::abs(grad_[v * d + l]) * 0.5 * (box.upper[l] - box.lower[l]);
            lb_[v] = std::max(lo, lin);
            if (lb_[v] < 0) negative_.push_back(static_cast<int>(v));
        }
        std::vector<char> is_neg(m, 0);
        for (int v : negative_) is_neg[v] = 1;
        // Nonpositive over the whole box and free of conflicts: always worth taking.
        sure_.clear();
        open_.clear();
        for (int v : negative_) {
            bool conflict = false;
            for (int u : adjacent_[v]) conflict = conflict || is_neg[u];
            if (ub_[v] <= 0 && !conflict) sure_.push_back(v);
            else open_.push_back(v);
        }
        if (static_cast<int>(open_.size()) <= kEnumerateOpen) {
            double best = std::numeric_limits<double>::infinity();
            const std::size_t k = open_.size();
            std::vector<int> set;
            for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
                set = sure_;
                bool independent = true;
                for (std::size_t t = 0; t < k && independent; ++t) {
                    if (!(mask >> t & 1)) continue;
                    for (std::size_t r = 0; r < t; ++r)
                        if ((mask >> r & 1) && std::find(adjacent_[open_[t]].begin(), adjacent_[open_[t]].end(),
                                                         open_[r]) != adjacent_[open_[t]].end())
                            independent = false;
                    set.push_back(open_[t]);
                }
                if (!independent) continue;
                best = std::min(best, set.empty() ? 0.0 : combined(set, box));
            }
            return duals_.gamma + best;
        }
        double total = duals_.gamma + (sure_.empty() ? 0.0 : combined(sure_, box));
        IncompatibilityGraph g;
        g.weight.assign(m, 0.0);
        g.adjacent = adjacent_;
        g.groups = groups_;
        for (int v : open_) g.weight[v] = lb_[v];
        if (static_cast<int>(open_.size()) <= opt_.exact_mwis_limit) {
            for (int v : exact_mwis(g)) total += g.weight[v];
        } else {
            for (int v : open_) total += lb_[v];
        }
        return total;
    }

    static constexpr int kEnumerateOpen = 6;

    const Instance& inst_;
    const MasterDuals& duals_;
    ExactPricingOptions opt_;
    bool branched_;
    const BranchConstraints& branching_;
    Selector selector_;
    ColumnCollector collector_;
    std::vector<std::vector<int>> groups_;
    std::vector<std::vector<int>> adjacent_;
    std::vector<double> lb_, ub_, at_center_, grad_;
    mutable std::vector<double> acc_;
    std::vector<int> negative_, sure_, open_;
    double incumbent_ = 0.0;
};

// Under l1, each fixed subset's reduced cost is separable and convex piecewise
// linear with kinks at the demand coordinates, so the minimum over x sits on
// the grid spanned by those coordinates.
std::optional<ExactPricingResult> coordinate_grid_price(const Instance& inst, const MasterDuals& duals,
                                                        const BranchConstraints& branching,
                                                        const ExactPricingOptions& opt) {
    const std::size_t d = inst.d();
    const bool branched = !branching.empty();
    std::vector<std::vector<double>> axes(d);
    for (std::size_t i = 0; i < inst.n(); ++i) {
        if (!branched && !(duals.alpha[i] > 0)) continue;
        for (std::size_t l = 0; l < d; ++l) axes[l].push_back(inst.point(i)[l]);
    }
    ExactPricingResult res;
    if (axes[0].empty()) {
        res.min_reduced_cost = res.lower_bound = duals.gamma;
        res.exact = true;
        return res;
    }
    double total = 1.0;
    for (auto& a : axes) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        total *= static_cast<double>(a.size());
    }
    if (total > 4e6) return std::nullopt;

    ColumnCollector collector;
    double best = duals.gamma;
    std::vector<std::size_t> idx(d, 0);
    Point x(d);
    long visited = 0;
    while (true) {
        if (opt.deadline && (visited & 1023) == 0 && std::chrono::steady_clock::now() > *opt.deadline)
            return std::nullopt;
        ++visited;
        for (std::size_t l = 0; l < d; ++l) x[l] = axes[l][idx[l]];
        const auto e = point_scores(inst, duals, x);
        Candidate c;
        c.x = x;
        c.value = duals.gamma;
        if (!branched) {
            for (int i = 0; i < static_cast<int>(e.size()); ++i)
                if (e[i] < 0) {
                    c.subset.push_back(i);
                    c.value += e[i];
                }
        } else {
            const auto g = incompatibility_graph(branching, e);
            int negative = 0;
            for (double w : g.weight) negative += w < 0;
            if (negative > opt.exact_mwis_limit) return std::nullopt;
            for (int v : exact_mwis(g)) {
                c.subset.insert(c.subset.end(), g.groups[v].begin(), g.groups[v].end());
                c.value += g.weight[v];
            }
            std::sort(c.subset.begin(), c.subset.end());
        }
        best = std::min(best, c.value);
        collector.offer(c);
        std::size_t l = 0;
        while (l < d && ++idx[l] == axes[l].size()) idx[l++] = 0;
        if (l == d) break;
    }
    res.min_reduced_cost = res.lower_bound = best;
    res.exact = true;
    res.boxes = visited;
    res.columns = collector.take(inst, duals, &branching, opt.tolerance, opt.max_columns);
    return res;
}

}  // namespace

ExactPricingResult exact_price(const Instance& instance, const MasterDuals& duals,
                               const BranchConstraints& branching, const ExactPricingOptions& options) {
    if (options.l1_coordinate_grid && instance.norm().kind() == NormSpec::Kind::L1)
        if (auto res = coordinate_grid_price(instance, duals, branching, options)) return *res;
    SpatialSearch search(instance, duals, branching, options);
    return search.run();
}

}  // namespace omfloc
