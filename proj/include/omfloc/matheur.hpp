#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "omfloc/bnp.hpp"
#include "omfloc/master.hpp"
#include "omfloc/model.hpp"

namespace omfloc {

struct InitialPool {
    std::vector<Column> columns;
    Solution incumbent;
};

/// Random facilities in the bounding box; after the first round the facilities
/// with the largest clusters are kept and the rest redrawn. Every nonempty
/// cluster becomes a column.
InitialPool initial_pool(const Instance& instance, int rounds, std::uint64_t seed);

/// Branch-and-price with heuristic pricing only; the bound is not certified.
SolveReport matheur_solve(const Instance& instance, SolveConfig config = {});

enum class AggregationMethod { KMean, Ptf };

struct Aggregation {
    std::vector<Point> representatives;
    /// Original index -> representative index (nearest under the instance norm).
    std::vector<int> mapping;
    double delta = 0.0;
    /// m representative points with a lambda of length m (absent for custom lambda).
    std::optional<Instance> reduced;
    /// n points, each moved to its representative, original lambda.
    Instance expanded;
};

/// KMEAN: Lloyd iterations in l2. PTF: farthest-from-last selection starting at
/// `ptf_start` or a seeded random point. `sse_trace` receives the k-means
/// objective after each iteration.
Aggregation aggregate(const Instance& instance, AggregationMethod method, std::size_t m, std::uint64_t seed,
                      std::optional<std::size_t> ptf_start = std::nullopt,
                      std::vector<double>* sse_trace = nullptr);

enum class AggregationTarget { Reduced, Expanded };

struct AggregatedReport {
    SolveReport inner;
    Solution solution;             // evaluated on the original points
    double aggregated_objective;   // objective of the same facilities on the aggregated points
    double delta = 0.0;
    double two_delta_bound = 0.0;  // 2 * delta * sum(lambda)
    /// True when the solved instance is the expanded multiset, where the bound applies.
    bool bound_guaranteed = false;
    Aggregation aggregation;
};

AggregatedReport aggregated_solve(const Instance& instance, AggregationMethod method, std::size_t m,
                                  const SolveConfig& inner, bool use_matheur = false,
                                  AggregationTarget target = AggregationTarget::Reduced,
                                  std::optional<std::size_t> ptf_start = std::nullopt);

}  // namespace omfloc
