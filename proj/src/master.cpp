#include "omfloc/master.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace omfloc {

namespace {

constexpr double kDuplicateTol = 1e-9;
constexpr double kEpsilonDrift = 1e-6;

bool same_facility(const Point& a, const Point& b) {
    for (std::size_t l = 0; l < a.size(); ++l)
        if (std::abs(a[l] - b[l]) > kDuplicateTol) return false;
    return true;
}

int find_root(const std::vector<int>& parent, int i) {
    while (parent[i] != i) i = parent[i];
    return i;
}

}  // namespace

bool Column::contains(int i) const { return std::binary_search(subset.begin(), subset.end(), i); }

Column make_column(const Instance& instance, std::vector<int> subset, Point facility) {
    if (subset.empty()) throw InvalidInput("column subset must not be empty");
    if (facility.size() != instance.d()) throw InvalidInput("column facility dimension mismatch");
    std::sort(subset.begin(), subset.end());
    if (std::adjacent_find(subset.begin(), subset.end()) != subset.end())
        throw InvalidInput("column subset has duplicate indices");
    if (subset.front() < 0 || subset.back() >= static_cast<int>(instance.n()))
        throw InvalidInput("column subset index out of range");
    Column col;
    col.delta.reserve(subset.size());
    for (int i : subset) col.delta.push_back(norm_distance(instance.point(i), facility, instance.norm()));
    col.subset = std::move(subset);
    col.facility = std::move(facility);
    return col;
}

Column artificial_column(const Instance& instance) {
    const Box box = bounding_box(instance);
    Column col;
    col.subset.resize(instance.n());
    std::iota(col.subset.begin(), col.subset.end(), 0);
    col.facility.resize(instance.d());
    for (std::size_t l = 0; l < instance.d(); ++l) col.facility[l] = 0.5 * (box.lower[l] + box.upper[l]);
    col.delta.assign(instance.n(), 2.0 * big_m(instance));
    col.artificial = true;
    return col;
}

BranchConstraints::BranchConstraints(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
}

int BranchConstraints::group_of(int i) const { return find_root(parent_, i); }

bool BranchConstraints::apart(int a, int b) const {
    const int ga = group_of(a), gb = group_of(b);
    for (const auto& [x, y] : different_) {
        const int gx = group_of(x), gy = group_of(y);
        if ((gx == ga && gy == gb) || (gx == gb && gy == ga)) return true;
    }
    return false;
}

BranchConstraints BranchConstraints::with_same(int a, int b) const {
    if (a == b) throw InvalidInput("branching pair needs two distinct indices");
    if (together(a, b)) throw InvalidInput("pair already forced onto one facility");
    if (apart(a, b)) throw InvalidInput("pair already forced onto different facilities");
    BranchConstraints out = *this;
    const int ga = out.group_of(a), gb = out.group_of(b);
    // Keep the smaller index as root so group ids are stable.
    if (ga < gb) out.parent_[gb] = ga;
    else out.parent_[ga] = gb;
    out.same_.emplace_back(std::min(a, b), std::max(a, b));
    return out;
}

BranchConstraints BranchConstraints::with_different(int a, int b) const {
    if (a == b) throw InvalidInput("branching pair needs two distinct indices");
    if (together(a, b)) throw InvalidInput("pair already forced onto one facility");
    if (apart(a, b)) throw InvalidInput("pair already forced onto different facilities");
    BranchConstraints out = *this;
    out.different_.emplace_back(std::min(a, b), std::max(a, b));
    return out;
}

std::vector<std::vector<int>> BranchConstraints::groups() const {
    std::vector<std::vector<int>> out;
    std::vector<int> slot(parent_.size(), -1);
    for (int i = 0; i < static_cast<int>(parent_.size()); ++i) {
        const int g = group_of(i);
        if (slot[g] < 0) {
            slot[g] = static_cast<int>(out.size());
            out.emplace_back();
        }
        out[slot[g]].push_back(i);
    }
    return out;
}

bool BranchConstraints::allows(std::span<const int> subset) const {
    if (empty()) return true;
    auto in = [&](int i) { return std::binary_search(subset.begin(), subset.end(), i); };
    for (const auto& [a, b] : same_)
        if (in(a) != in(b)) return false;
    // Different pairs hold between whole groups.
    if (!different_.empty()) {
        std::vector<char> has(parent_.size(), 0);
        for (int i : subset) has[group_of(i)] = 1;
        for (const auto& [a, b] : different_)
            if (has[group_of(a)] && has[group_of(b)]) return false;
    }
    return true;
}

double epsilon_sum_drift(const MasterDuals& duals) {
    const std::size_t n = duals.alpha.size();
    double drift = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            row += duals.eps(i, k);
            col += duals.eps(k, i);
        }
        drift = std::max({drift, std::abs(row - 1.0), std::abs(col - 1.0)});
    }
    return drift;
}

double reduced_cost(const Column& column, const MasterDuals& duals, const LambdaVector& lambda) {
    const std::size_t n = duals.alpha.size();
    double rc = duals.gamma;
    for (std::size_t t = 0; t < column.subset.size(); ++t) {
        const int i = column.subset[t];
        double ci = 0.0;
        for (std::size_t k = 0; k < n; ++k) ci += lambda[k] * duals.eps(i, k);
        rc += -duals.alpha[i] + column.delta[t] * ci;
    }
    return rc;
}

namespace {

void add_uv_columns(lp::LinearProgram& lp, std::size_t n) {
    std::vector<lp::Entry> e(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) e[k] = {static_cast<int>(n + 1 + i * n + k), 1.0};
        lp.add_column(1.0, -lp::kInf, lp::kInf, e);
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) e[i] = {static_cast<int>(n + 1 + i * n + k), 1.0};
        lp.add_column(1.0, -lp::kInf, lp::kInf, e);
    }
}

std::vector<lp::Entry> y_entries(const Column& col, const LambdaVector& lambda) {
    const std::size_t n = lambda.size();
    std::vector<lp::Entry> e;
    e.reserve(col.subset.size() * (n + 1) + 1);
    for (int i : col.subset) e.push_back({i, 1.0});
    e.push_back({static_cast<int>(n), -1.0});
    for (std::size_t t = 0; t < col.subset.size(); ++t) {
        const std::size_t i = col.subset[t];
        if (col.delta[t] == 0.0) continue;
        for (std::size_t k = 0; k < n; ++k) {
            if (lambda[k] == 0.0) continue;
            e.push_back({static_cast<int>(n + 1 + i * n + k), -lambda[k] * col.delta[t]});
        }
    }
    return e;
}

}  // namespace

lp::LinearProgram build_rrmp(const Instance& instance, std::span<const Column> pool) {
    const std::size_t n = instance.n();
    std::vector<char> covered(n, 0);
    for (const auto& col : pool)
        for (int i : col.subset) covered[i] = 1;
    for (std::size_t i = 0; i < n; ++i)
        if (!covered[i]) throw InvalidInput("column pool leaves a demand point uncovered");

    lp::LinearProgram lp;
    for (std::size_t i = 0; i < n; ++i) lp.add_row(lp::RowSense::GreaterEqual, 1.0);
    lp.add_row(lp::RowSense::GreaterEqual, -static_cast<double>(instance.p()));
    for (std::size_t r = 0; r < n * n; ++r) lp.add_row(lp::RowSense::GreaterEqual, 0.0);
    add_uv_columns(lp, n);
    for (const auto& col : pool) lp.add_column(0.0, 0.0, lp::kInf, y_entries(col, instance.lambda()));
    return lp;
}

MasterDuals extract_duals(const Instance& instance, const lp::LpSolution& solution) {
    const std::size_t n = instance.n();
    MasterDuals d;
    d.alpha.assign(solution.duals.begin(), solution.duals.begin() + n);
    d.gamma = solution.duals[n];
    d.epsilon.assign(solution.duals.begin() + n + 1, solution.duals.begin() + n + 1 + n * n);
    // Multipliers of >= rows are nonnegative; clip round-off.
    for (auto& a : d.alpha) a = std::max(a, 0.0);
    d.gamma = std::max(d.gamma, 0.0);
    for (auto& e : d.epsilon) e = std::max(e, 0.0);
    d.c.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) d.c[i] += instance.lambda()[k] * d.epsilon[i * n + k];
    return d;
}

std::size_t add_columns(std::vector<Column>& pool, std::vector<Column> fresh, const BranchConstraints* node) {
    std::size_t added = 0;
    for (auto& col : fresh) {
        if (node != nullptr && !col.artificial && !node->allows(col.subset)) continue;
        const bool dup = std::any_of(pool.begin(), pool.end(), [&](const Column& c) {
            return c.subset == col.subset && same_facility(c.facility, col.facility);
        });
        if (dup) continue;
        pool.push_back(std::move(col));
        ++added;
    }
    return added;
}

RestrictedMaster::RestrictedMaster(const Instance& instance) : instance_(&instance) {
    const std::size_t n = instance.n();
    for (std::size_t i = 0; i < n; ++i) lp_.add_row(lp::RowSense::GreaterEqual, 1.0);
    lp_.add_row(lp::RowSense::GreaterEqual, -static_cast<double>(instance.p()));
    for (std::size_t r = 0; r < n * n; ++r) lp_.add_row(lp::RowSense::GreaterEqual, 0.0);
    add_uv_columns(lp_, n);
    std::vector<Column> art;
    art.push_back(artificial_column(instance));
    add(std::move(art));
}

void RestrictedMaster::append_to_lp(const Column& column) {
    lp_.add_column(0.0, 0.0, lp::kInf, y_entries(column, instance_->lambda()));
}

std::size_t RestrictedMaster::add(std::vector<Column> fresh, const BranchConstraints* node) {
    std::size_t added = 0;
    for (auto& col : fresh) {
        if (node != nullptr && !col.artificial && !node->allows(col.subset)) continue;
        auto& slots = by_subset_[col.subset];
        const bool dup = std::any_of(slots.begin(), slots.end(),
                                     [&](std::size_t k) { return same_facility(pool_[k].facility, col.facility); });
        if (dup) continue;
        slots.push_back(pool_.size());
        append_to_lp(col);
        pool_.push_back(std::move(col));
        ++added;
    }
    return added;
}

MasterSolution RestrictedMaster::solve(const BranchConstraints& node, const lp::Basis* warm) {
    const std::size_t n = instance_->n();
    for (std::size_t k = 0; k < pool_.size(); ++k) {
        const bool allowed = pool_[k].artificial || node.allows(pool_[k].subset);
        lp_.set_bounds(static_cast<int>(2 * n + k), 0.0, allowed ? lp::kInf : 0.0);
    }
    auto run = [&](const lp::SimplexOptions& opt, const lp::Basis* from, MasterSolution& out) {
        lp::LpSolution sol = from ? lp::warm_start_solve(lp_, *from, opt) : lp::solve_lp(lp_, opt);
        out.status = sol.status;
        out.iterations += sol.iterations;
        if (sol.status != lp::Status::Optimal) return;
        out.objective = sol.objective;
        out.y.assign(sol.primal.begin() + 2 * n, sol.primal.end());
        out.duals = extract_duals(*instance_, sol);
        out.basis = std::move(sol.basis);
    };
    MasterSolution out;
    run(lp::SimplexOptions{}, warm, out);
    if (out.status == lp::Status::Optimal && epsilon_sum_drift(out.duals) > kEpsilonDrift) {
        lp::SimplexOptions tight;
        tight.optimality_tol = 1e-10;
        tight.feasibility_tol = 1e-10;
        const lp::Basis from = out.basis;
        run(tight, &from, out);
    }
    return out;
}

}  // namespace omfloc
