#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "omfloc/master.hpp"
#include "omfloc/model.hpp"
#include "omfloc/objective.hpp"

namespace omfloc {

/// Best p-multiset of nodes of a (resolution + 1)^2 grid over the bounding box.
/// Refuses p > 3, d != 2, resolution > 64 or more than 5e8 multisets.
Solution grid_oracle(const Instance& instance, int resolution);

struct PartitionOptimum {
    double value = std::numeric_limits<double>::infinity();
    std::vector<Point> facilities;  // one per block
    /// Cutting-plane bound reached for this partition.
    double lower_bound = 0.0;
    /// Upper and lower bounds met; false when the cutoff stopped the search or the cut loop stalled.
    bool converged = false;
};

/// Minimizes the ordered median of the distances with point i served by the
/// facility of block block_of[i]. Stops early once the bound reaches `cutoff`,
/// or once upper and lower bounds agree to `tolerance` relative.
PartitionOptimum fixed_partition_optimum(const Instance& instance, std::span<const int> block_of,
                                         std::size_t blocks,
                                         double cutoff = std::numeric_limits<double>::infinity(),
                                         double tolerance = 1e-9);

/// Exhaustive over set partitions into at most p blocks (n <= 10, p <= 3).
/// With `node`, only partitions respecting its same/different pairs count and
/// the returned assignment is the partition itself.
Solution partition_oracle(const Instance& instance, const BranchConstraints* node = nullptr);

struct OracleResult {
    Solution solution;
    /// No solution (respecting `node`) is cheaper than this.
    double lower_bound = 0.0;
};

OracleResult partition_oracle_bounded(const Instance& instance, const BranchConstraints* node = nullptr);

inline double exact_om_assignment_check(std::span<const double> distances, const LambdaVector& lambda) {
    return ordered_median_via_assignment(distances, lambda);
}

}  // namespace omfloc
