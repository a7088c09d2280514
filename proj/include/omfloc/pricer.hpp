#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "omfloc/master.hpp"
#include "omfloc/model.hpp"

namespace omfloc {

/// e_i = -alpha_i + c_i * distance(a_i, x).
std::vector<double> point_scores(const Instance& instance, const MasterDuals& duals, PointView x);

/// gamma + sum of e_i over `subset` at x: the reduced cost of the column (subset, x).
double subset_reduced_cost(const Instance& instance, const MasterDuals& duals, std::span<const int> subset,
                           PointView x);

/// Minimizes sum_i weights[i] * distance(a_subset[i], x). With all weights zero
/// the centroid of the subset is returned. `trace`, when given, receives the
/// objective after every Weiszfeld step (l2 only).
Point weber_solve(const Instance& instance, std::span<const int> subset, std::span<const double> weights,
                  std::vector<double>* trace = nullptr);

double weber_objective(const Instance& instance, std::span<const int> subset, std::span<const double> weights,
                       PointView x);

/// Vertex weights and edges of the incompatibility graph at a fixed x.
struct IncompatibilityGraph {
    std::vector<std::vector<int>> groups;
    std::vector<double> weight;
    std::vector<std::vector<int>> adjacent;
};

IncompatibilityGraph incompatibility_graph(const BranchConstraints& branching, std::span<const double> scores);

/// Greedy: repeatedly take the most negative vertex compatible with the chosen set.
std::vector<int> greedy_mwis(const IncompatibilityGraph& graph);

/// Exact minimum-weight independent set over the negative vertices (used when few).
std::vector<int> exact_mwis(const IncompatibilityGraph& graph);

struct PricerOptions {
    int max_columns = 10;
    int samples = 32;
    double threshold = 1e-6;
    int refine_rounds = 5;
};

/// Box center of the points with positive alpha, `samples` uniform points in
/// that box, and those demand points themselves.
std::vector<Point> candidate_points(const Instance& instance, const MasterDuals& duals, std::mt19937_64& rng,
                                    int samples);

std::vector<Column> heuristic_price_root(const Instance& instance, const MasterDuals& duals,
                                         std::span<const Point> candidates, const PricerOptions& options = {});

std::vector<Column> heuristic_price_branched(const Instance& instance, const MasterDuals& duals,
                                             const BranchConstraints& branching, std::span<const Point> candidates,
                                             const PricerOptions& options = {});

struct ExactPricingOptions {
    long box_budget = 400000;
    double tolerance = 1e-6;
    int max_columns = 10;
    int exact_mwis_limit = 20;
    /// Under l1, scan the grid of demand coordinates instead of branching on boxes.
    bool l1_coordinate_grid = true;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct ExactPricingResult {
    /// Best reduced cost found (gamma when no subset helps).
    double min_reduced_cost = 0.0;
    /// Certified: no column has reduced cost below this.
    double lower_bound = 0.0;
    /// lower_bound is within tolerance of min_reduced_cost.
    bool exact = false;
    std::vector<Column> columns;
    long boxes = 0;
};

/// Spatial branch-and-bound over the facility position.
ExactPricingResult exact_price(const Instance& instance, const MasterDuals& duals,
                               const BranchConstraints& branching, const ExactPricingOptions& options = {});

/// Lower bound on distance(a, x) over x in the box: distance to the clamped point.
double distance_lower_bound(PointView a, const Box& box, const NormSpec& norm);
/// Upper bound: distance to the farthest corner.
double distance_upper_bound(PointView a, const Box& box, const NormSpec& norm);

}  // namespace omfloc
