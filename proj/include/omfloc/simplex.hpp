#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace omfloc::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { GreaterEqual, LessEqual, Equal };

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

const char* to_string(Status status);

struct Entry {
    int row;
    double value;
};

/// min (or max) c^T x  s.t.  row_i(x) {>=,<=,=} b_i,  lower <= x <= upper.
/// Columns are stored sparse and may be appended after the rows are fixed.
class LinearProgram {
public:
    int add_row(RowSense sense, double rhs);
    int add_column(double cost, double lower, double upper, std::span<const Entry> entries);

    void set_bounds(int col, double lower, double upper);
    void set_cost(int col, double cost) { cost_[col] = cost; }
    void set_maximize(bool maximize) { maximize_ = maximize; }

    int num_rows() const { return static_cast<int>(rhs_.size()); }
    int num_cols() const { return static_cast<int>(cost_.size()); }
    bool maximize() const { return maximize_; }

    double cost(int col) const { return cost_[col]; }
    double lower(int col) const { return lower_[col]; }
    double upper(int col) const { return upper_[col]; }
    RowSense sense(int row) const { return sense_[row]; }
    double rhs(int row) const { return rhs_[row]; }
    std::span<const Entry> column(int col) const {
        return {entries_.data() + start_[col], entries_.data() + start_[col + 1]};
    }

private:
    std::vector<double> cost_, lower_, upper_;
    std::vector<RowSense> sense_;
    std::vector<double> rhs_;
    std::vector<std::size_t> start_{0};
    std::vector<Entry> entries_;
    bool maximize_ = false;
};

enum class VarStatus : unsigned char { Basic, AtLower, AtUpper, AtZero };

/// Status for every structural column followed by every row slack.
struct Basis {
    std::vector<VarStatus> columns;
    std::vector<VarStatus> rows;
};

struct SimplexOptions {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-7;
    double pivot_tol = 1e-9;
    int refactor_interval = 100;
    /// 0 selects 50 * (rows + cols) + 10000.
    long max_iterations = 0;
    /// Consecutive non-improving pivots before switching to Bland's rule;
    /// 0 selects 2 * (rows + cols).
    long stall_limit = 0;
};

struct LpSolution {
    Status status = Status::NumericalFailure;
    std::vector<double> primal;
    /// One multiplier per row, in the sign convention of the stated objective.
    std::vector<double> duals;
    std::vector<double> reduced_costs;
    double objective = 0.0;
    Basis basis;
    long iterations = 0;
    bool warm_started = false;
    bool used_bland = false;
    std::string diagnostics;
};

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

/// Re-solves from a previous basis. A basis with fewer columns than `lp` is
/// extended with the new columns nonbasic at a bound; an unusable basis falls
/// back to a cold start and says so in `diagnostics`.
LpSolution warm_start_solve(const LinearProgram& lp, const Basis& previous,
                            const SimplexOptions& options = {});

}  // namespace omfloc::lp
