#include "omfloc/bnp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <random>

#include "omfloc/matheur.hpp"
#include "omfloc/objective.hpp"
#include "omfloc/oracle.hpp"
#include "omfloc/pricer.hpp"

namespace omfloc {

namespace {

constexpr double kFracTol = 1e-6;
constexpr double kCoincidentScore = 1e12;
constexpr double kUsedY = 1e-9;
// Fixed-partition cutting planes get expensive beyond this many points.
constexpr std::size_t kPolishLimit = 200;

using Clock = std::chrono::steady_clock;

struct Node {
    long id = 0;
    int depth = 0;
    double bound = -std::numeric_limits<double>::infinity();
    BranchConstraints constraints;
    lp::Basis basis;
    bool has_basis = false;
};

// Best bound first, deeper first on ties, then creation order.
struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.id > b.id;
    }
};

bool fathomed(double bound, double incumbent) {
    return bound >= incumbent - 1e-6 * std::max(1.0, std::abs(incumbent));
}

Solution rounding(const Instance& instance, std::span<const Column> pool, std::span<const double> y) {
    std::vector<std::size_t> order;
    for (std::size_t r = 0; r < pool.size(); ++r)
        if (!pool[r].artificial && y[r] > kUsedY) order.push_back(r);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] > y[b]; });
    std::vector<Point> facilities;
    for (std::size_t r : order) {
        if (facilities.size() == instance.p()) break;
        const Point& x = pool[r].facility;
        if (std::find(facilities.begin(), facilities.end(), x) == facilities.end()) facilities.push_back(x);
    }
    if (facilities.empty()) facilities.push_back(pool.front().facility);
    return make_solution(instance, std::move(facilities));
}

// Alternates the best facilities for the current allocation with closest reallocation.
Solution polish(const Instance& instance, Solution sol, Clock::time_point deadline) {
    for (int round = 0; round < 20 && Clock::now() < deadline; ++round) {
        std::vector<int> block_of(instance.n());
        std::map<int, int> relabel;
        for (std::size_t i = 0; i < instance.n(); ++i)
            block_of[i] = relabel.emplace(sol.assignment[i], static_cast<int>(relabel.size())).first->second;
        const PartitionOptimum best = fixed_partition_optimum(instance, block_of, relabel.size());
        if (!(best.value < sol.objective)) break;
        Solution next = make_solution(instance, best.facilities);
        if (!(next.objective < sol.objective - 1e-12 * std::max(1.0, sol.objective))) break;
        sol = std::move(next);
    }
    return sol;
}

}  // namespace

double resolve_theta(const LambdaVector& lambda, std::optional<double> theta) {
    if (theta) {
        if (!(*theta >= 0.0 && *theta <= 1.0)) throw InvalidInput("theta must lie in [0, 1]");
        return *theta;
    }
    switch (lambda.kind()) {
        case LambdaKind::C: return 0.0;
        case LambdaKind::K: return 0.5;
        default: return 1.0;
    }
}

double node_lower_bound(double rrmp_objective, double min_reduced_cost, std::size_t p) {
    return rrmp_objective + static_cast<double>(p) * std::min(min_reduced_cost, 0.0);
}

double gap_percent(double incumbent, double bound) {
    return std::max(0.0, 100.0 * (incumbent - bound) / std::max(std::abs(incumbent), 1e-10));
}

std::vector<double> pair_sums(std::size_t n, std::span<const Column> pool, std::span<const double> y) {
    std::vector<double> s(n * n, 0.0);
    for (std::size_t r = 0; r < pool.size(); ++r) {
        if (y[r] <= 0.0) continue;
        const auto& sub = pool[r].subset;
        for (std::size_t a = 0; a < sub.size(); ++a)
            for (std::size_t b = a; b < sub.size(); ++b) {
                s[sub[a] * n + sub[b]] += y[r];
                if (a != b) s[sub[b] * n + sub[a]] += y[r];
            }
    }
    return s;
}

std::optional<std::pair<int, int>> select_branching_pair(const Instance& instance, std::span<const Column> pool,
                                                         std::span<const double> y, double theta,
                                                         const BranchConstraints* node) {
    const std::size_t n = instance.n();
    const auto s = pair_sums(n, pool, y);
    std::optional<std::pair<int, int>> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(n); ++i)
        for (int k = i + 1; k < static_cast<int>(n); ++k) {
            const double v = s[i * n + k];
            if (v <= kFracTol || v >= 1.0 - kFracTol) continue;
            if (node && node->size() == n && (node->together(i, k) || node->apart(i, k))) continue;
            const double dist = distance(instance.point(i), instance.point(k), instance.norm());
            const double closeness = dist > 0.0 ? 1.0 / dist : kCoincidentScore;
            const double score = theta * std::min(v, 1.0 - v) + (1.0 - theta) * closeness;
            if (score > best_score) {
                best_score = score;
                best = std::make_pair(i, k);
            }
        }
    return best;
}

std::optional<Solution> integer_recovery(const Instance& instance, std::span<const Column> pool,
                                         std::span<const double> y) {
    const std::size_t n = instance.n();
    for (std::size_t r = 0; r < pool.size(); ++r)
        if (pool[r].artificial && y[r] > kFracTol) return std::nullopt;
    const auto s = pair_sums(n, pool, y);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i + 1; k < n; ++k) {
            const double v = s[i * n + k];
            if (std::abs(v) > kFracTol && std::abs(v - 1.0) > kFracTol) return std::nullopt;
        }

    std::map<std::vector<int>, std::pair<double, Point>> used;
    for (std::size_t r = 0; r < pool.size(); ++r) {
        if (pool[r].artificial || y[r] <= kUsedY) continue;
        auto& [total, x] = used[pool[r].subset];
        if (x.empty()) x.assign(instance.d(), 0.0);
        total += y[r];
        for (std::size_t l = 0; l < x.size(); ++l) x[l] += y[r] * pool[r].facility[l];
    }
    if (used.empty()) return std::nullopt;
    std::vector<char> covered(n, 0);
    std::vector<Point> facilities;
    for (auto& [subset, entry] : used) {
        auto& [total, x] = entry;
        if (std::abs(total - 1.0) > kFracTol) return std::nullopt;
        for (auto& c : x) c /= total;
        for (int i : subset) covered[i] = 1;
        facilities.push_back(std::move(x));
    }
    if (facilities.size() > instance.p()) return std::nullopt;
    if (std::find(covered.begin(), covered.end(), 0) != covered.end()) return std::nullopt;
    return make_solution(instance, std::move(facilities));
}

SolveReport solve(const Instance& instance, const SolveConfig& config) {
    const auto start = Clock::now();
    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(std::max(config.time_limit, 0.0)));
    const std::size_t n = instance.n();
    const std::size_t p = instance.p();

    SolveReport report;
    report.theta = resolve_theta(instance.lambda(), config.theta);

    std::mt19937_64 rng(config.seed);
    InitialPool init = initial_pool(instance, std::max(config.rounds, 1), config.seed);
    report.incumbent = init.incumbent;

    RestrictedMaster master(instance);
    master.add(std::move(init.columns));

    PricerOptions heur;
    ExactPricingOptions exact;
    exact.box_budget = config.box_budget;
    exact.tolerance = config.tolerance;
    exact.deadline = deadline;

    auto offer = [&](Solution sol) {
        if (!(sol.objective < report.incumbent.objective - 1e-12)) return;
        report.incumbent = config.polish && n <= kPolishLimit ? polish(instance, std::move(sol), deadline) : std::move(sol);
    };
    if (config.polish && n <= kPolishLimit) report.incumbent = polish(instance, std::move(report.incumbent), deadline);

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    {
        Node root;
        root.bound = 0.0;  // ordered medians of distances are nonnegative
        root.constraints = BranchConstraints(n);
        open.push(std::move(root));
    }
    long next_id = 1;
    // Smallest bound among leaves that were closed without proving anything below the incumbent.
    double leaf_bound = std::numeric_limits<double>::infinity();
    bool certified = config.exact_pricing;
    bool root_done = false;

    while (!open.empty()) {
        if (Clock::now() >= deadline || (config.node_limit > 0 && report.nodes >= config.node_limit)) {
            report.timed_out = true;
            break;
        }
        Node node = open.top();
        open.pop();
        if (node.id != 0 && fathomed(node.bound, report.incumbent.objective)) {
            leaf_bound = std::min(leaf_bound, node.bound);
            continue;
        }
        ++report.nodes;

        const BranchConstraints& bc = node.constraints;
        const bool branched = !bc.empty();
        MasterSolution ms;
        const lp::Basis* warm = node.has_basis ? &node.basis : nullptr;
        double node_bound = node.bound;
        bool converged = false;
        bool interrupted = false;
        while (true) {
            if (Clock::now() >= deadline) {
                interrupted = true;
                break;
            }
            ms = master.solve(bc, warm);
            if (ms.status != lp::Status::Optimal) ms = master.solve(bc, nullptr);
            if (ms.status != lp::Status::Optimal) break;
            warm = nullptr;
            node.basis = ms.basis;
            node.has_basis = true;
            warm = &node.basis;

            if (config.heuristic_first || !config.exact_pricing) {
                const auto candidates = candidate_points(instance, ms.duals, rng, heur.samples);
                auto cols = branched ? heuristic_price_branched(instance, ms.duals, bc, candidates, heur)
                                     : heuristic_price_root(instance, ms.duals, candidates, heur);
                ++report.heuristic_pricer_calls;
                if (master.add(std::move(cols), &bc) > 0) continue;
            }
            if (!config.exact_pricing) {
                node_bound = std::max(node_bound, ms.objective);
                converged = true;
                break;
            }
            ExactPricingResult res = exact_price(instance, ms.duals, bc, exact);
            ++report.exact_pricer_calls;
            const double lb = node_lower_bound(ms.objective, res.lower_bound, p);
            node_bound = std::max(node_bound, lb);
            report.bound_trace.push_back({node.id, node.depth, ms.objective, res.lower_bound, lb, bc});
            if (res.lower_bound >= -config.tolerance || fathomed(node_bound, report.incumbent.objective)) {
                converged = true;
                break;
            }
            if (master.add(std::move(res.columns), &bc) > 0) continue;
            // Nothing new to add: either the pricer ran out of time or only
            // duplicates came back. The bound recorded above stays valid.
            interrupted = Clock::now() >= deadline;
            converged = !interrupted;
            break;
        }

        if (ms.status != lp::Status::Optimal) {
            // The LP failed numerically; keep the inherited bound as a leaf.
            certified = false;
            leaf_bound = std::min(leaf_bound, node_bound);
            continue;
        }

        if (auto rec = integer_recovery(instance, master.pool(), ms.y)) offer(std::move(*rec));
        else offer(rounding(instance, master.pool(), ms.y));

        if (!root_done) {
            root_done = true;
            report.root_lower_bound = node_bound;
            report.root_gap_percent = gap_percent(report.incumbent.objective, node_bound);
        }

        if (interrupted) {
            node.bound = node_bound;
            open.push(std::move(node));
            report.timed_out = true;
            break;
        }
        (void)converged;

        if (fathomed(node_bound, report.incumbent.objective)) {
            leaf_bound = std::min(leaf_bound, node_bound);
            continue;
        }
        if (integer_recovery(instance, master.pool(), ms.y)) {
            // The recovered solution costs no more than the LP value.
            leaf_bound = std::min(leaf_bound, node_bound);
            continue;
        }
        const auto pair = select_branching_pair(instance, master.pool(), ms.y, report.theta, &bc);
        if (!pair) {
            certified = false;
            leaf_bound = std::min(leaf_bound, node_bound);
            continue;
        }
        for (int side = 0; side < 2; ++side) {
            Node child;
            child.id = next_id++;
            child.depth = node.depth + 1;
            child.bound = node_bound;
            child.constraints = side == 0 ? bc.with_same(pair->first, pair->second)
                                          : bc.with_different(pair->first, pair->second);
            child.basis = node.basis;
            child.has_basis = true;
            open.push(std::move(child));
        }
    }

    while (!open.empty()) {
        leaf_bound = std::min(leaf_bound, open.top().bound);
        open.pop();
    }
    report.lower_bound = std::min(leaf_bound, report.incumbent.objective);
    if (!root_done) report.root_lower_bound = report.lower_bound;
    report.gap_percent = gap_percent(report.incumbent.objective, report.lower_bound);
    report.columns = static_cast<long>(master.size()) - 1;
    report.total_pricer_calls = report.exact_pricer_calls + report.heuristic_pricer_calls;
    report.bound_is_exact = certified;
    report.time_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return report;
}

}  // namespace omfloc
