#include "omfloc/objective.hpp"

#include <algorithm>
#include <numeric>

namespace omfloc {

double ordered_median(std::span<const double> distances, const LambdaVector& lambda) {
    if (distances.size() != lambda.size()) {
        throw InvalidInput("ordered_median: distance and lambda lengths differ");
    }
    std::vector<std::size_t> order(distances.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return distances[a] < distances[b]; });
    double value = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        value += lambda[k] * distances[order[k]];
    }
    return value;
}

double ordered_median_via_assignment(std::span<const double> distances, const LambdaVector& lambda) {
    const std::size_t n = distances.size();
    if (n != lambda.size()) {
        throw InvalidInput("ordered_median_via_assignment: distance and lambda lengths differ");
    }
    if (n > 8) {
        throw InvalidInput("ordered_median_via_assignment: n > 8 is refused");
    }
    // sigma_ik = 1 iff perm[k] == i.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1.0;
    do {
        double v = 0.0;
        for (std::size_t k = 0; k < n; ++k) v += lambda[k] * distances[perm[k]];
        best = std::max(best, v);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

Evaluation evaluate(const Instance& instance, std::span<const Point> facilities) {
    if (facilities.empty()) {
        throw InvalidInput("evaluate: at least one facility is required");
    }
    for (const auto& f : facilities) {
        if (f.size() != instance.d()) {
            throw InvalidInput("evaluate: facility dimension mismatch");
        }
    }
    Evaluation ev;
    ev.assignment.resize(instance.n());
    ev.distances.resize(instance.n());
    for (std::size_t i = 0; i < instance.n(); ++i) {
        double best = norm_distance(instance.point(i), facilities[0], instance.norm());
        int arg = 0;
        for (std::size_t j = 1; j < facilities.size(); ++j) {
            const double dij = norm_distance(instance.point(i), facilities[j], instance.norm());
            if (dij < best) {
                best = dij;
                arg = static_cast<int>(j);
            }
        }
        ev.assignment[i] = arg;
        ev.distances[i] = best;
    }
    ev.objective = ordered_median(ev.distances, instance.lambda());
    return ev;
}

Solution make_solution(const Instance& instance, std::vector<Point> facilities) {
    if (facilities.empty()) {
        throw InvalidInput("make_solution: at least one facility is required");
    }
    while (facilities.size() < instance.p()) facilities.push_back(facilities.back());
    auto ev = evaluate(instance, facilities);
    return Solution{std::move(facilities), std::move(ev.assignment), ev.objective};
}

}  // namespace omfloc
