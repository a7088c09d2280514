#include "omfloc/matheur.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "omfloc/objective.hpp"

namespace omfloc {

namespace {

Point random_point(const Box& box, std::mt19937_64& rng) {
    Point x(box.lower.size());
    for (std::size_t l = 0; l < x.size(); ++l) {
        if (box.upper[l] > box.lower[l]) {
            std::uniform_real_distribution<double> u(box.lower[l], box.upper[l]);
            x[l] = u(rng);
        } else {
            x[l] = box.lower[l];
        }
    }
    return x;
}

double squared_l2(PointView a, PointView b) {
    double s = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) s += (a[l] - b[l]) * (a[l] - b[l]);
    return s;
}

// Nearest center in squared l2; ties to the lowest index.
int nearest_l2(PointView a, const std::vector<Point>& centers) {
    int best = 0;
    double bd = squared_l2(a, centers[0]);
    for (std::size_t c = 1; c < centers.size(); ++c) {
        const double dc = squared_l2(a, centers[c]);
        if (dc < bd) {
            bd = dc;
            best = static_cast<int>(c);
        }
    }
    return best;
}

std::vector<Point> kmeans(const Instance& instance, std::size_t m, std::mt19937_64& rng,
                          std::vector<double>* sse_trace) {
    const std::size_t n = instance.n();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<Point> centers;
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::size_t next = pick(rng);
    while (true) {
        centers.emplace_back(instance.point(next).begin(), instance.point(next).end());
        if (centers.size() == m) break;
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], squared_l2(instance.point(i), centers.back()));
        next = static_cast<std::size_t>(std::max_element(nearest.begin(), nearest.end()) - nearest.begin());
    }

    const std::size_t d = instance.d();
    std::vector<int> assign(n);
    for (int iter = 0; iter < 100; ++iter) {
        for (std::size_t i = 0; i < n; ++i) assign[i] = nearest_l2(instance.point(i), centers);
        std::vector<Point> sum(m, Point(d, 0.0));
        std::vector<std::size_t> count(m, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++count[assign[i]];
            for (std::size_t l = 0; l < d; ++l) sum[assign[i]][l] += instance.point(i)[l];
        }
        double moved = 0.0;
        std::vector<Point> updated = centers;
        for (std::size_t c = 0; c < m; ++c) {
            if (count[c] == 0) continue;
            for (std::size_t l = 0; l < d; ++l) updated[c][l] = sum[c][l] / static_cast<double>(count[c]);
        }
        for (std::size_t c = 0; c < m; ++c) {
            if (count[c] != 0) continue;
            // Empty cluster: move it onto the point farthest from its own center.
            std::size_t far = 0;
            double fd = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double di = squared_l2(instance.point(i), updated[assign[i]]);
                if (di > fd) {
                    fd = di;
                    far = i;
                }
            }
            updated[c].assign(instance.point(far).begin(), instance.point(far).end());
        }
        for (std::size_t c = 0; c < m; ++c) moved = std::max(moved, std::sqrt(squared_l2(updated[c], centers[c])));
        centers = std::move(updated);
        if (sse_trace) {
            double sse = 0.0;
            for (std::size_t i = 0; i < n; ++i) sse += squared_l2(instance.point(i), centers[assign[i]]);
            sse_trace->push_back(sse);
        }
        if (moved < 1e-8) break;
    }
    return centers;
}

std::vector<Point> pick_the_farthest(const Instance& instance, std::size_t m, std::mt19937_64& rng,
                                     std::optional<std::size_t> start) {
    const std::size_t n = instance.n();
    std::size_t last;
    if (start) {
        if (*start >= n) throw InvalidInput("ptf start index out of range");
        last = *start;
    } else {
        last = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    }
    std::vector<char> chosen(n, 0);
    std::vector<Point> reps;
    while (true) {
        chosen[last] = 1;
        reps.emplace_back(instance.point(last).begin(), instance.point(last).end());
        if (reps.size() == m) break;
        std::size_t far = n;
        double fd = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (chosen[i]) continue;
            const double di = distance(instance.point(i), instance.point(last), instance.norm());
            if (di > fd) {
                fd = di;
                far = i;
            }
        }
        last = far;
    }
    return reps;
}

}  // namespace

InitialPool initial_pool(const Instance& instance, int rounds, std::uint64_t seed) {
    if (rounds < 1) throw InvalidInput("initial pool needs at least one round");
    const std::size_t n = instance.n();
    const std::size_t p = instance.p();
    const Box box = bounding_box(instance);
    std::mt19937_64 rng(seed);

    InitialPool out;
    out.incumbent.objective = std::numeric_limits<double>::infinity();
    std::vector<Point> facilities(p);
    for (auto& x : facilities) x = random_point(box, rng);

    for (int round = 0; round < rounds; ++round) {
        Evaluation ev = evaluate(instance, facilities);
        std::vector<std::vector<int>> clusters(p);
        for (std::size_t i = 0; i < n; ++i) clusters[ev.assignment[i]].push_back(static_cast<int>(i));
        for (std::size_t j = 0; j < p; ++j)
            if (!clusters[j].empty()) add_columns(out.columns, {make_column(instance, clusters[j], facilities[j])});
        if (ev.objective < out.incumbent.objective) {
            out.incumbent.facilities = facilities;
            out.incumbent.assignment = std::move(ev.assignment);
            out.incumbent.objective = ev.objective;
        }
        if (round + 1 == rounds) break;

        std::vector<std::size_t> order(p);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return clusters[a].size() > clusters[b].size(); });
        // Keep facilities serving at least an even share; the largest always stays.
        const double share = static_cast<double>(n) / static_cast<double>(p);
        for (std::size_t r = 1; r < p; ++r) {
            const std::size_t j = order[r];
            if (static_cast<double>(clusters[j].size()) < share) facilities[j] = random_point(box, rng);
        }
    }
    return out;
}

SolveReport matheur_solve(const Instance& instance, SolveConfig config) {
    config.exact_pricing = false;
    SolveReport report = solve(instance, config);
    report.bound_is_exact = false;
    return report;
}

Aggregation aggregate(const Instance& instance, AggregationMethod method, std::size_t m, std::uint64_t seed,
                      std::optional<std::size_t> ptf_start, std::vector<double>* sse_trace) {
    const std::size_t n = instance.n();
    if (m < 1 || m > n) throw InvalidInput("aggregation size must satisfy 1 <= m <= n");
    std::mt19937_64 rng(seed);

    std::vector<Point> reps = method == AggregationMethod::KMean ? kmeans(instance, m, rng, sse_trace)
                                                                 : pick_the_farthest(instance, m, rng, ptf_start);
    std::vector<int> mapping(n);
    std::vector<Point> moved(n);
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m; ++r) {
            const double dr = distance(instance.point(i), reps[r], instance.norm());
            if (dr < bd) {
                bd = dr;
                best = static_cast<int>(r);
            }
        }
        mapping[i] = best;
        delta = std::max(delta, bd);
        moved[i] = reps[best];
    }

    std::optional<Instance> reduced;
    const LambdaVector& lam = instance.lambda();
    if (lam.kind() != LambdaKind::Custom) {
        const std::size_t k = std::clamp<std::size_t>(lam.k(), 1, m);
        reduced = Instance(reps, instance.p(), instance.norm(), make_lambda(lam.kind(), m, k, lam.alpha()));
    }
    Aggregation agg{std::move(reps), std::move(mapping), delta, std::move(reduced),
                    Instance(std::move(moved), instance.p(), instance.norm(), instance.lambda())};
    return agg;
}

AggregatedReport aggregated_solve(const Instance& instance, AggregationMethod method, std::size_t m,
                                  const SolveConfig& inner, bool use_matheur, AggregationTarget target,
                                  std::optional<std::size_t> ptf_start) {
    Aggregation agg = aggregate(instance, method, m, inner.seed, ptf_start);
    const bool reduced = target == AggregationTarget::Reduced && agg.reduced.has_value();
    const Instance& solved = reduced ? *agg.reduced : agg.expanded;
    SolveReport rep = use_matheur ? matheur_solve(solved, inner) : solve(solved, inner);

    AggregatedReport out{.inner = std::move(rep), .solution = {}, .aggregated_objective = 0.0,
                         .delta = agg.delta, .two_delta_bound = 0.0, .bound_guaranteed = !reduced,
                         .aggregation = std::move(agg)};
    const auto& facilities = out.inner.incumbent.facilities;
    out.solution = make_solution(instance, facilities);
    out.aggregated_objective = evaluate(out.aggregation.expanded, facilities).objective;
    out.two_delta_bound = 2.0 * out.delta * instance.lambda().sum();
    return out;
}

}  // namespace omfloc
