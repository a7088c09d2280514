#pragma once

#include <span>
#include <vector>

#include "omfloc/model.hpp"

namespace omfloc {

/// sum_k lambda_k * delta_(k) over the ascending sort of `distances`.
double ordered_median(std::span<const double> distances, const LambdaVector& lambda);

/// Same value computed as the maximum of sum lambda_k delta_i sigma_ik over all
/// permutation matrices. Exhaustive; refuses n > 8.
double ordered_median_via_assignment(std::span<const double> distances, const LambdaVector& lambda);

struct Evaluation {
    double objective = 0.0;
    std::vector<int> assignment;
    std::vector<double> distances;
};

/// Closest-facility allocation (ties go to the lowest facility index) followed
/// by the ordered median of the resulting distances.
Evaluation evaluate(const Instance& instance, std::span<const Point> facilities);

/// evaluate() packaged as a Solution, padding to p facilities by repeating the last one.
Solution make_solution(const Instance& instance, std::vector<Point> facilities);

}  // namespace omfloc
