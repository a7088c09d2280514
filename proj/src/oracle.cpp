#include "omfloc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace omfloc {

namespace {

// Dense tableau for min c'x, Gx >= h, x >= 0 with c >= 0, so the all-slack
// basis is dual feasible from the start and rows can be appended at any time.
class DualTableau {
public:
    explicit DualTableau(std::vector<double> cost) : n_(cost.size()), d_(std::move(cost)) {}

    void add_row(std::span<const double> g, double h) {
        for (auto& row : t_) row.push_back(0.0);
        d_.push_back(0.0);
        const std::size_t cols = d_.size();
        std::vector<double> row(cols, 0.0);
        for (std::size_t j = 0; j < n_; ++j) row[j] = -g[j];
        row[cols - 1] = 1.0;
        double rhs = -h;
        for (std::size_t r = 0; r < t_.size(); ++r) {
            const std::size_t b = basic_[r];
            if (b >= n_ || row[b] == 0.0) continue;
            const double f = row[b];
            for (std::size_t j = 0; j < cols; ++j) row[j] -= f * t_[r][j];
            rhs -= f * rhs_[r];
            row[b] = 0.0;
        }
        t_.push_back(std::move(row));
        rhs_.push_back(rhs);
        basic_.push_back(cols - 1);
    }

    bool solve() {
        const std::size_t m = t_.size();
        const long bland_after = 50 * static_cast<long>(m + d_.size());
        for (long it = 0; it < 200 * static_cast<long>(m + d_.size()) + 1000; ++it) {
            const bool bland = it > bland_after;
            std::size_t r = m;
            double worst = -kTol;
            for (std::size_t i = 0; i < m; ++i) {
                if (rhs_[i] >= -kTol) continue;
                if (bland) {
                    if (r == m || basic_[i] < basic_[r]) r = i;
                } else if (rhs_[i] < worst) {
                    worst = rhs_[i];
                    r = i;
                }
            }
            if (r == m) return true;
            std::size_t enter = d_.size();
            double best = 0.0;
            for (std::size_t j = 0; j < d_.size(); ++j) {
                const double a = t_[r][j];
                if (a >= -kTol) continue;
                const double ratio = std::max(d_[j], 0.0) / -a;
                if (enter == d_.size() || ratio < best - 1e-12) {
                    best = ratio;
                    enter = j;
                }
            }
            if (enter == d_.size()) return false;
            pivot(r, enter);
        }
        return false;
    }

    std::size_t rows() const { return t_.size(); }

    double value(std::size_t j) const {
        for (std::size_t r = 0; r < t_.size(); ++r)
            if (basic_[r] == j) return std::max(rhs_[r], 0.0);
        return 0.0;
    }

private:
    static constexpr double kTol = 1e-10;

    void pivot(std::size_t r, std::size_t j) {
        const double a = t_[r][j];
        for (auto& v : t_[r]) v /= a;
        rhs_[r] /= a;
        t_[r][j] = 1.0;
        for (std::size_t i = 0; i < t_.size(); ++i) {
            if (i == r) continue;
            const double f = t_[i][j];
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < t_[i].size(); ++k) t_[i][k] -= f * t_[r][k];
            rhs_[i] -= f * rhs_[r];
            t_[i][j] = 0.0;
        }
        const double f = d_[j];
        if (f != 0.0) {
            for (std::size_t k = 0; k < d_.size(); ++k) d_[k] -= f * t_[r][k];
            d_[j] = 0.0;
        }
        basic_[r] = j;
    }

    std::size_t n_;
    std::vector<double> d_;
    std::vector<std::vector<double>> t_;
    std::vector<double> rhs_;
    std::vector<std::size_t> basic_;
};

// Gradient of the norm at v: a unit vector of the dual norm with u'v = ||v||.
Point norm_gradient(PointView v, const NormSpec& norm) {
    Point u(v.size(), 0.0);
    const double len = norm_distance(v, Point(v.size(), 0.0), norm);
    if (len <= 0.0) return u;
    switch (norm.kind()) {
        case NormSpec::Kind::L1:
            for (std::size_t l = 0; l < v.size(); ++l) u[l] = v[l] > 0 ? 1.0 : (v[l] < 0 ? -1.0 : 0.0);
            break;
        case NormSpec::Kind::L2:
            for (std::size_t l = 0; l < v.size(); ++l) u[l] = v[l] / len;
            break;
        case NormSpec::Kind::LTau: {
            const double t = norm.tau();
            for (std::size_t l = 0; l < v.size(); ++l) {
                const double a = std::abs(v[l]);
                if (a > 0.0) u[l] = std::copysign(std::pow(a / len, t - 1.0), v[l]);
            }
            break;
        }
    }
    return u;
}

double om_sorted(std::vector<double> delta, const LambdaVector& lambda) {
    std::sort(delta.begin(), delta.end());
    double s = 0.0;
    for (std::size_t k = 0; k < delta.size(); ++k) s += lambda[k] * delta[k];
    return s;
}

}  // namespace

constexpr std::size_t kMaxRows = 2500;

PartitionOptimum fixed_partition_optimum(const Instance& instance, std::span<const int> block_of,
                                         std::size_t blocks, double cutoff, double tolerance) {
    const std::size_t n = instance.n();
    const std::size_t d = instance.d();
    const NormSpec& norm = instance.norm();
    const LambdaVector& lambda = instance.lambda();
    const Box box = bounding_box(instance);

    // Columns: shifted facility coordinates (blocks * d), delta (n), z.
    const std::size_t nx = blocks * d;
    const std::size_t nv = nx + n + 1;
    const std::size_t zc = nv - 1;
    std::vector<double> cost(nv, 0.0);
    cost[zc] = 1.0;
    DualTableau lp(cost);
    std::vector<double> g(nv);

    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t l = 0; l < d; ++l) {
            std::fill(g.begin(), g.end(), 0.0);
            g[b * d + l] = -1.0;
            lp.add_row(g, -(box.upper[l] - box.lower[l]));
        }
    auto add_point_cut = [&](std::size_t i, PointView u) {
        std::fill(g.begin(), g.end(), 0.0);
        double h = 0.0;
        const std::size_t b = block_of[i];
        for (std::size_t l = 0; l < d; ++l) {
            g[b * d + l] = u[l];
            h += u[l] * (instance.point(i)[l] - box.lower[l]);
        }
        g[nx + i] = 1.0;
        lp.add_row(g, h);
    };
    auto add_order_cut = [&](std::span<const double> delta) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return delta[a] < delta[b]; });
        std::fill(g.begin(), g.end(), 0.0);
        g[zc] = 1.0;
        for (std::size_t k = 0; k < n; ++k) g[nx + order[k]] = -lambda[k];
        lp.add_row(g, 0.0);
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (norm.kind() == NormSpec::Kind::L1) {
            Point u(d);
            for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
                for (std::size_t l = 0; l < d; ++l) u[l] = (mask >> l) & 1 ? 1.0 : -1.0;
                add_point_cut(i, u);
            }
        } else {
            Point u(d, 0.0);
            for (std::size_t l = 0; l < d; ++l) {
                u[l] = 1.0;
                add_point_cut(i, u);
                u[l] = -1.0;
                add_point_cut(i, u);
                u[l] = 0.0;
            }
        }
    }
    add_order_cut(std::vector<double>(n, 0.0));

    PartitionOptimum out;
    std::vector<Point> x(blocks, Point(d));
    std::vector<double> delta_lp(n), delta_true(n);
    for (int round = 0; round < 5000; ++round) {
        if (!lp.solve()) break;
        for (std::size_t b = 0; b < blocks; ++b)
            for (std::size_t l = 0; l < d; ++l) x[b][l] = box.lower[l] + lp.value(b * d + l);
        for (std::size_t i = 0; i < n; ++i) {
            delta_lp[i] = lp.value(nx + i);
            delta_true[i] = norm_distance(instance.point(i), x[block_of[i]], norm);
        }
        const double lower = lp.value(zc);
        out.lower_bound = std::max(out.lower_bound, lower);
        const double upper = om_sorted(delta_true, lambda);
        if (upper < out.value) {
            out.value = upper;
            out.facilities = x;
        }
        const double scale = std::max(1.0, std::abs(out.value));
        if (out.value - lower <= tolerance * scale) {
            out.converged = true;
            break;
        }
        if (lower >= cutoff || lp.rows() > kMaxRows) break;

        bool cut = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (delta_true[i] <= delta_lp[i] + 0.01 * tolerance * scale) continue;
            Point v(d);
            for (std::size_t l = 0; l < d; ++l) v[l] = instance.point(i)[l] - x[block_of[i]][l];
            add_point_cut(i, norm_gradient(v, norm));
            cut = true;
        }
        if (om_sorted(delta_lp, lambda) > lower + 0.01 * tolerance * scale) {
            add_order_cut(delta_lp);
            cut = true;
        }
        if (!cut) break;
    }
    return out;
}

OracleResult partition_oracle_bounded(const Instance& instance, const BranchConstraints* node) {
    const std::size_t n = instance.n();
    if (n > 10 || instance.p() > 3) throw InvalidInput("partition oracle is limited to n <= 10 and p <= 3");
    const std::size_t maxb = std::min(instance.p(), n);

    std::vector<int> block(n, 0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<Point> best_facilities;
    std::vector<int> best_block;
    double lower = std::numeric_limits<double>::infinity();

    auto respects = [&]() {
        if (node == nullptr || node->size() != n) return true;
        for (const auto& [a, b] : node->same_pairs())
            if (block[a] != block[b]) return false;
        for (const auto& [a, b] : node->different_pairs())
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < n; ++k)
                    if (node->together(static_cast<int>(i), a) && node->together(static_cast<int>(k), b) &&
                        block[i] == block[k])
                        return false;
        return true;
    };

    // Restricted-growth strings: block[i] <= 1 + max(block[0..i-1]).
    auto visit = [&](auto&& self, std::size_t i, int used) -> void {
        if (i == n) {
            if (!respects()) return;
            auto opt = fixed_partition_optimum(instance, block, static_cast<std::size_t>(used), best);
            lower = std::min(lower, opt.lower_bound);
            if (opt.value < best) {
                best = opt.value;
                best_facilities = std::move(opt.facilities);
                best_block = block;
            }
            return;
        }
        for (int b = 0; b <= used && b < static_cast<int>(maxb); ++b) {
            block[i] = b;
            self(self, i + 1, std::max(used, b + 1));
        }
    };
    visit(visit, 0, 0);
    if (best_facilities.empty()) throw InvalidInput("no partition satisfies the branching constraints");

    // Polish the winner well below the comparison tolerances used by callers.
    const std::size_t used = static_cast<std::size_t>(*std::max_element(best_block.begin(), best_block.end()) + 1);
    auto polished = fixed_partition_optimum(instance, best_block, used, std::numeric_limits<double>::infinity(), 1e-12);
    if (polished.value < best) {
        best = polished.value;
        best_facilities = std::move(polished.facilities);
    }

    OracleResult out;
    out.lower_bound = std::min(lower, best);
    if (node == nullptr || node->empty()) {
        out.solution = make_solution(instance, std::move(best_facilities));
        return out;
    }
    // Under branching constraints the assignment is part of the answer; closest
    // reallocation could break a same or different pair.
    out.solution.facilities = std::move(best_facilities);
    while (out.solution.facilities.size() < instance.p()) out.solution.facilities.push_back(out.solution.facilities.back());
    out.solution.assignment = best_block;
    out.solution.objective = best;
    return out;
}

Solution partition_oracle(const Instance& instance, const BranchConstraints* node) {
    return partition_oracle_bounded(instance, node).solution;
}

Solution grid_oracle(const Instance& instance, int resolution) {
    const std::size_t p = instance.p();
    if (p > 3 || instance.d() != 2 || resolution < 1 || resolution > 64)
        throw InvalidInput("grid oracle needs p <= 3, d = 2 and 1 <= resolution <= 64");
    const std::size_t side = static_cast<std::size_t>(resolution) + 1;
    const std::size_t nodes = side * side;
    double tuples = 1.0;
    for (std::size_t k = 0; k < p; ++k) tuples = tuples * static_cast<double>(nodes + k) / static_cast<double>(k + 1);
    if (tuples > 5e8) throw InvalidInput("grid oracle: too many facility tuples");

    const Box box = bounding_box(instance);
    const std::size_t n = instance.n();
    std::vector<Point> grid(nodes, Point(2));
    for (std::size_t a = 0; a < side; ++a)
        for (std::size_t b = 0; b < side; ++b) {
            const double fa = static_cast<double>(a) / resolution, fb = static_cast<double>(b) / resolution;
            grid[a * side + b] = {box.lower[0] + fa * (box.upper[0] - box.lower[0]),
                                  box.lower[1] + fb * (box.upper[1] - box.lower[1])};
        }
    std::vector<double> dist(nodes * n);
    for (std::size_t g = 0; g < nodes; ++g)
        for (std::size_t i = 0; i < n; ++i) dist[g * n + i] = norm_distance(instance.point(i), grid[g], instance.norm());

    std::vector<std::size_t> pick(p, 0), best_pick(p, 0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> delta(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) {
            double v = dist[pick[0] * n + i];
            for (std::size_t k = 1; k < p; ++k) v = std::min(v, dist[pick[k] * n + i]);
            delta[i] = v;
        }
        std::sort(delta.begin(), delta.end());
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += instance.lambda()[k] * delta[k];
        if (s < best) {
            best = s;
            best_pick = pick;
        }
        // Next nondecreasing tuple.
        std::size_t k = p;
        while (k > 0 && pick[k - 1] == nodes - 1) --k;
        if (k == 0) break;
        ++pick[k - 1];
        for (std::size_t j = k; j < p; ++j) pick[j] = pick[k - 1];
    }
    std::vector<Point> facilities;
    for (std::size_t g : best_pick) facilities.push_back(grid[g]);
    return make_solution(instance, std::move(facilities));
}

}  // namespace omfloc
