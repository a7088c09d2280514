#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "omfloc/master.hpp"
#include "omfloc/model.hpp"

namespace omfloc {

struct SolveConfig {
    /// Branching weight in [0, 1]; empty selects the default for the lambda kind.
    std::optional<double> theta;
    double time_limit = 7200.0;
    std::uint64_t seed = 0;
    bool heuristic_first = true;
    bool exact_pricing = true;
    /// Rounds of the random initial pool.
    int rounds = 20;
    /// Pricing is converged once the certified minimum reduced cost is >= -tolerance.
    double tolerance = 1e-6;
    long box_budget = 400000;
    /// 0 = unlimited.
    long node_limit = 0;
    /// Improve each new incumbent by local search over its allocation.
    bool polish = true;
};

/// One exact pricing outcome at a node.
struct BoundRecord {
    long node = 0;
    int depth = 0;
    double rrmp_objective = 0.0;
    double min_reduced_cost = 0.0;  // certified
    double lower_bound = 0.0;       // rrmp_objective + p * min(m, 0)
    BranchConstraints constraints;
};

struct SolveReport {
    Solution incumbent;
    double lower_bound = 0.0;
    double gap_percent = 0.0;
    double root_lower_bound = 0.0;
    double root_gap_percent = 0.0;
    long nodes = 0;
    long columns = 0;
    long exact_pricer_calls = 0;
    long heuristic_pricer_calls = 0;
    long total_pricer_calls = 0;
    double time_seconds = 0.0;
    double theta = 1.0;
    bool bound_is_exact = false;
    bool timed_out = false;
    std::vector<BoundRecord> bound_trace;
};

/// C -> 0, K -> 0.5, everything else -> 1, unless given explicitly.
double resolve_theta(const LambdaVector& lambda, std::optional<double> theta);

double node_lower_bound(double rrmp_objective, double min_reduced_cost, std::size_t p);

double gap_percent(double incumbent, double bound);

/// Pair sums s_ik = sum of y over columns holding both i and k.
std::vector<double> pair_sums(std::size_t n, std::span<const Column> pool, std::span<const double> y);

/// argmax of theta * min(s, 1 - s) + (1 - theta) / ||a_i - a_k|| over pairs with
/// fractional sum not yet constrained at `node`; ties to the first pair in
/// lexicographic order. Empty when no pair qualifies.
std::optional<std::pair<int, int>> select_branching_pair(const Instance& instance, std::span<const Column> pool,
                                                         std::span<const double> y, double theta,
                                                         const BranchConstraints* node = nullptr);

/// When every pair sum is 0 or 1 and each used subset carries total weight 1,
/// places one facility per subset at the y-weighted average of its facilities.
std::optional<Solution> integer_recovery(const Instance& instance, std::span<const Column> pool,
                                         std::span<const double> y);

SolveReport solve(const Instance& instance, const SolveConfig& config = {});

}  // namespace omfloc
