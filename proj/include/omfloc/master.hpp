#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "omfloc/model.hpp"
#include "omfloc/simplex.hpp"

namespace omfloc {

/// A pattern: demand subset S served by one facility at x, with the induced distances.
struct Column {
    std::vector<int> subset;    // sorted, distinct
    Point facility;
    std::vector<double> delta;  // aligned with subset
    bool artificial = false;

    bool contains(int i) const;
};

/// Builds a column with true distances; sorts and validates the subset.
Column make_column(const Instance& instance, std::vector<int> subset, Point facility);

/// Covers every index at the box center with distance 2 * big_M.
Column artificial_column(const Instance& instance);

/// Same-facility groups (transitively closed) and different-facility pairs.
class BranchConstraints {
public:
    BranchConstraints() = default;
    explicit BranchConstraints(std::size_t n);

    std::size_t size() const { return parent_.size(); }
    bool empty() const { return same_.empty() && different_.empty(); }

    /// Both throw InvalidInput if the pair is already constrained either way.
    BranchConstraints with_same(int a, int b) const;
    BranchConstraints with_different(int a, int b) const;

    int group_of(int i) const;
    bool together(int a, int b) const { return group_of(a) == group_of(b); }
    bool apart(int a, int b) const;
    /// Groups in order of their smallest member; members ascending.
    std::vector<std::vector<int>> groups() const;

    const std::vector<std::pair<int, int>>& same_pairs() const { return same_; }
    const std::vector<std::pair<int, int>>& different_pairs() const { return different_; }

    /// True when `subset` never splits a group and never holds both ends of a different pair.
    bool allows(std::span<const int> subset) const;

private:
    std::vector<int> parent_;
    std::vector<std::pair<int, int>> same_;
    std::vector<std::pair<int, int>> different_;
};

struct MasterDuals {
    std::vector<double> alpha;    // coverage rows
    double gamma = 0.0;           // cardinality row
    std::vector<double> epsilon;  // n x n, row-major (i, k)
    std::vector<double> c;        // c_i = sum_k lambda_k epsilon_ik

    double eps(std::size_t i, std::size_t k) const { return epsilon[i * alpha.size() + k]; }
};

/// Largest deviation of the epsilon row and column sums from 1.
double epsilon_sum_drift(const MasterDuals& duals);

double reduced_cost(const Column& column, const MasterDuals& duals, const LambdaVector& lambda);

/// Variables u (n), v (n), then one y per pool column. Rows: coverage (n),
/// cardinality, then order rows indexed n + 1 + i * n + k.
lp::LinearProgram build_rrmp(const Instance& instance, std::span<const Column> pool);

MasterDuals extract_duals(const Instance& instance, const lp::LpSolution& solution);

/// Appends the columns that are new (tolerance 1e-9 on coordinates) and allowed by
/// `node`; returns how many were added.
std::size_t add_columns(std::vector<Column>& pool, std::vector<Column> fresh,
                        const BranchConstraints* node = nullptr);

struct MasterSolution {
    lp::Status status = lp::Status::NumericalFailure;
    double objective = 0.0;
    std::vector<double> y;  // per pool column
    MasterDuals duals;
    lp::Basis basis;
    long iterations = 0;
};

/// Column pool plus the RRMP built from it; columns are appended to the LP as
/// they enter the pool, and node constraints only change bounds.
class RestrictedMaster {
public:
    explicit RestrictedMaster(const Instance& instance);

    const Instance& instance() const { return *instance_; }
    const std::vector<Column>& pool() const { return pool_; }
    std::size_t size() const { return pool_.size(); }

    /// Returns the number of columns actually added (duplicates and columns
    /// violating `node` are dropped).
    std::size_t add(std::vector<Column> fresh, const BranchConstraints* node = nullptr);

    MasterSolution solve(const BranchConstraints& node, const lp::Basis* warm = nullptr);

    const lp::LinearProgram& lp() const { return lp_; }

private:
    void append_to_lp(const Column& column);

    const Instance* instance_;
    std::vector<Column> pool_;
    std::map<std::vector<int>, std::vector<std::size_t>> by_subset_;
    lp::LinearProgram lp_;
};

}  // namespace omfloc
