#include "omfloc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace omfloc::lp {

const char* to_string(Status status) {
    switch (status) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::IterationLimit: return "iteration-limit";
        case Status::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

int LinearProgram::add_row(RowSense sense, double rhs) {
    if (!std::isfinite(rhs)) throw std::invalid_argument("row rhs must be finite");
    sense_.push_back(sense);
    rhs_.push_back(rhs);
    return num_rows() - 1;
}

int LinearProgram::add_column(double cost, double lower, double upper, std::span<const Entry> entries) {
    if (!std::isfinite(cost)) throw std::invalid_argument("column cost must be finite");
    if (lower > upper) throw std::invalid_argument("column lower bound exceeds upper bound");
    for (const auto& e : entries) {
        if (e.row < 0 || e.row >= num_rows()) throw std::invalid_argument("entry row out of range");
        if (!std::isfinite(e.value)) throw std::invalid_argument("entry value must be finite");
        if (e.value != 0.0) entries_.push_back(e);
    }
    cost_.push_back(cost);
    lower_.push_back(lower);
    upper_.push_back(upper);
    start_.push_back(entries_.size());
    return num_cols() - 1;
}

void LinearProgram::set_bounds(int col, double lower, double upper) {
    if (lower > upper) throw std::invalid_argument("column lower bound exceeds upper bound");
    lower_[col] = lower;
    upper_[col] = upper;
}

namespace {

// Bounded primal simplex. The basis is [A_J | -I_slack]; with T the rows whose
// slack is nonbasic, every solve reduces to the square kernel K = A[T, J], whose
// inverse is kept explicitly and updated per pivot.
class Engine {
public:
    Engine(const LinearProgram& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {
        n_ = lp.num_cols();
        m_ = lp.num_rows();
        nv_ = n_ + m_;
        cost_.assign(nv_, 0.0);
        lo_.assign(nv_, 0.0);
        up_.assign(nv_, 0.0);
        const double sign = lp.maximize() ? -1.0 : 1.0;
        for (int j = 0; j < n_; ++j) {
            cost_[j] = sign * lp.cost(j);
            lo_[j] = lp.lower(j);
            up_[j] = lp.upper(j);
        }
        for (int i = 0; i < m_; ++i) {
            switch (lp.sense(i)) {
                case RowSense::GreaterEqual: lo_[n_ + i] = 0.0; up_[n_ + i] = kInf; break;
                case RowSense::LessEqual: lo_[n_ + i] = -kInf; up_[n_ + i] = 0.0; break;
                case RowSense::Equal: lo_[n_ + i] = 0.0; up_[n_ + i] = 0.0; break;
            }
        }
        build_rows();
        max_iter_ = opt.max_iterations > 0 ? opt.max_iterations : 50L * (m_ + n_) + 10000;
        stall_limit_ = opt.stall_limit > 0 ? opt.stall_limit : 2L * (m_ + n_);
    }

    LpSolution run(const Basis* warm) {
        LpSolution sol;
        bool ok = false;
        if (warm != nullptr) {
            ok = load_basis(*warm);
            if (ok) {
                sol.warm_started = true;
            } else {
                sol.diagnostics = "inconsistent warm basis; cold start";
            }
        }
        if (!ok) {
            slack_basis();
            if (!refactor()) {
                sol.status = Status::NumericalFailure;
                sol.diagnostics += " slack basis factorization failed";
                return sol;
            }
        }
        compute_primal();
        Status st = iterate();
        if (st == Status::NumericalFailure && sol.warm_started) {
            sol.diagnostics = "numerical trouble from warm basis; cold restart";
            sol.warm_started = false;
            slack_basis();
            refactor();
            compute_primal();
            st = iterate();
        }
        sol.status = st;
        sol.iterations = iterations_;
        sol.used_bland = used_bland_;
        fill_solution(sol);
        return sol;
    }

private:
    // ----- setup ---------------------------------------------------------
    void build_rows() {
        std::vector<int> count(m_ + 1, 0);
        for (int j = 0; j < n_; ++j)
            for (const auto& e : lp_.column(j)) ++count[e.row + 1];
        row_start_.assign(m_ + 1, 0);
        for (int i = 0; i < m_; ++i) row_start_[i + 1] = row_start_[i] + count[i + 1];
        row_col_.resize(row_start_[m_]);
        row_val_.resize(row_start_[m_]);
        std::vector<int> fill(row_start_.begin(), row_start_.end() - 1);
        for (int j = 0; j < n_; ++j) {
            for (const auto& e : lp_.column(j)) {
                row_col_[fill[e.row]] = j;
                row_val_[fill[e.row]] = e.value;
                ++fill[e.row];
            }
        }
    }

    VarStatus nonbasic_default(int v) const {
        if (std::isfinite(lo_[v])) return VarStatus::AtLower;
        if (std::isfinite(up_[v])) return VarStatus::AtUpper;
        return VarStatus::AtZero;
    }

    VarStatus sanitize(int v, VarStatus s) const {
        if (s == VarStatus::Basic) return s;
        if (s == VarStatus::AtLower && std::isfinite(lo_[v])) return s;
        if (s == VarStatus::AtUpper && std::isfinite(up_[v])) return s;
        return nonbasic_default(v);
    }

    void slack_basis() {
        status_.assign(nv_, VarStatus::AtLower);
        for (int j = 0; j < n_; ++j) status_[j] = nonbasic_default(j);
        for (int i = 0; i < m_; ++i) status_[n_ + i] = VarStatus::Basic;
        rebuild_sets();
    }

    bool load_basis(const Basis& b) {
        if (static_cast<int>(b.rows.size()) != m_ || static_cast<int>(b.columns.size()) > n_) return false;
        status_.assign(nv_, VarStatus::AtLower);
        for (int j = 0; j < n_; ++j) {
            const VarStatus s = j < static_cast<int>(b.columns.size()) ? b.columns[j] : nonbasic_default(j);
            status_[j] = sanitize(j, s);
        }
        for (int i = 0; i < m_; ++i) status_[n_ + i] = sanitize(n_ + i, b.rows[i]);
        rebuild_sets();
        if (J_.size() != T_.size()) return false;
        return refactor();
    }

    void rebuild_sets() {
        J_.clear();
        T_.clear();
        posJ_.assign(n_, -1);
        posT_.assign(m_, -1);
        for (int j = 0; j < n_; ++j) {
            if (status_[j] == VarStatus::Basic) {
                posJ_[j] = static_cast<int>(J_.size());
                J_.push_back(j);
            }
        }
        for (int i = 0; i < m_; ++i) {
            if (status_[n_ + i] != VarStatus::Basic) {
                posT_[i] = static_cast<int>(T_.size());
                T_.push_back(i);
            }
        }
    }

    // ----- kernel inverse ------------------------------------------------
    double& kinv(int b, int a) { return kinv_[static_cast<std::size_t>(b) * cap_ + a]; }
    double kinv(int b, int a) const { return kinv_[static_cast<std::size_t>(b) * cap_ + a]; }

    void ensure_capacity(int s) {
        if (s <= cap_) return;
        int cap = std::max(16, cap_);
        while (cap < s) cap *= 2;
        std::vector<double> next(static_cast<std::size_t>(cap) * cap, 0.0);
        const int cur = static_cast<int>(J_.size());
        for (int b = 0; b < cur && b < cap_; ++b)
            for (int a = 0; a < cur && a < cap_; ++a)
                next[static_cast<std::size_t>(b) * cap + a] = kinv_[static_cast<std::size_t>(b) * cap_ + a];
        kinv_.swap(next);
        cap_ = cap;
    }

    bool refactor() {
        const int s = static_cast<int>(J_.size());
        if (static_cast<int>(T_.size()) != s) return false;
        ensure_capacity(std::max(s, 1));
        updates_ = 0;
        if (s == 0) return true;
        // Dense copy of K, then Gauss-Jordan with partial pivoting on [K | I].
        std::vector<double> k(static_cast<std::size_t>(s) * s, 0.0);
        for (int b = 0; b < s; ++b) {
            for (const auto& e : lp_.column(J_[b])) {
                const int a = posT_[e.row];
                if (a >= 0) k[static_cast<std::size_t>(a) * s + b] = e.value;
            }
        }
        std::vector<double> inv(static_cast<std::size_t>(s) * s, 0.0);
        for (int i = 0; i < s; ++i) inv[static_cast<std::size_t>(i) * s + i] = 1.0;
        double scale = 0.0;
        for (double v : k) scale = std::max(scale, std::abs(v));
        if (scale == 0.0) return false;
        for (int c = 0; c < s; ++c) {
            int piv = c;
            double best = std::abs(k[static_cast<std::size_t>(c) * s + c]);
            for (int r = c + 1; r < s; ++r) {
                const double v = std::abs(k[static_cast<std::size_t>(r) * s + c]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (best < 1e-11 * scale) return false;
            if (piv != c) {
                for (int q = 0; q < s; ++q) {
                    std::swap(k[static_cast<std::size_t>(piv) * s + q], k[static_cast<std::size_t>(c) * s + q]);
                    std::swap(inv[static_cast<std::size_t>(piv) * s + q], inv[static_cast<std::size_t>(c) * s + q]);
                }
            }
            const double d = k[static_cast<std::size_t>(c) * s + c];
            for (int q = 0; q < s; ++q) {
                k[static_cast<std::size_t>(c) * s + q] /= d;
                inv[static_cast<std::size_t>(c) * s + q] /= d;
            }
            for (int r = 0; r < s; ++r) {
                if (r == c) continue;
                const double f = k[static_cast<std::size_t>(r) * s + c];
                if (f == 0.0) continue;
                for (int q = 0; q < s; ++q) {
                    k[static_cast<std::size_t>(r) * s + q] -= f * k[static_cast<std::size_t>(c) * s + q];
                    inv[static_cast<std::size_t>(r) * s + q] -= f * inv[static_cast<std::size_t>(c) * s + q];
                }
            }
        }
        // inv = K^{-1}: rows follow K's columns (J), columns follow K's rows (T).
        for (int b = 0; b < s; ++b)
            for (int a = 0; a < s; ++a) kinv(b, a) = inv[static_cast<std::size_t>(b) * s + a];
        return true;
    }

    // ----- primal values -------------------------------------------------
    void compute_primal() {
        x_.assign(nv_, 0.0);
        for (int v = 0; v < nv_; ++v) {
            switch (status_[v]) {
                case VarStatus::AtLower: x_[v] = lo_[v]; break;
                case VarStatus::AtUpper: x_[v] = up_[v]; break;
                default: x_[v] = 0.0; break;
            }
        }
        const int s = static_cast<int>(J_.size());
        std::vector<double> r(s, 0.0);
        for (int a = 0; a < s; ++a) {
            const int t = T_[a];
            double acc = lp_.rhs(t) + x_[n_ + t];
            for (int p = row_start_[t]; p < row_start_[t + 1]; ++p) {
                const int j = row_col_[p];
                if (status_[j] != VarStatus::Basic) acc -= row_val_[p] * x_[j];
            }
            r[a] = acc;
        }
        for (int b = 0; b < s; ++b) {
            double acc = 0.0;
            for (int a = 0; a < s; ++a) acc += kinv(b, a) * r[a];
            x_[J_[b]] = acc;
        }
        for (int i = 0; i < m_; ++i) {
            if (posT_[i] >= 0) continue;
            x_[n_ + i] = row_activity(i) - lp_.rhs(i);
        }
    }

    double row_activity(int i) const {
        double acc = 0.0;
        for (int p = row_start_[i]; p < row_start_[i + 1]; ++p) acc += row_val_[p] * x_[row_col_[p]];
        return acc;
    }

    // ----- linear algebra with the basis ---------------------------------
    // z = B^{-1} a_q split into zJ (basic structurals) and zS (basic slacks, by row).
    void ftran(int q) {
        const int s = static_cast<int>(J_.size());
        zJ_.assign(s, 0.0);
        if (q < n_) {
            for (const auto& e : lp_.column(q)) {
                const int a = posT_[e.row];
                if (a < 0) continue;
                for (int b = 0; b < s; ++b) zJ_[b] += kinv(b, a) * e.value;
            }
        } else {
            const int a = posT_[q - n_];
            for (int b = 0; b < s; ++b) zJ_[b] = -kinv(b, a);
        }
        zS_.assign(m_, 0.0);
        for (int b = 0; b < s; ++b) {
            const double zb = zJ_[b];
            if (zb == 0.0) continue;
            for (const auto& e : lp_.column(J_[b])) zS_[e.row] += e.value * zb;
        }
        if (q < n_) {
            for (const auto& e : lp_.column(q)) zS_[e.row] -= e.value;
        }
    }

    double z_of(int v) const {
        if (v < n_) return zJ_[posJ_[v]];
        return zS_[v - n_];
    }

    // pi from basic costs cb (cost of each basic var in the current phase).
    void btran(const std::vector<double>& cb) {
        const int s = static_cast<int>(J_.size());
        pi_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            if (posT_[i] < 0) pi_[i] = -cb[n_ + i];
        }
        std::vector<double> rhs(s, 0.0);
        for (int b = 0; b < s; ++b) {
            double acc = cb[J_[b]];
            for (const auto& e : lp_.column(J_[b])) {
                if (posT_[e.row] < 0 && pi_[e.row] != 0.0) acc -= e.value * pi_[e.row];
            }
            rhs[b] = acc;
        }
        for (int a = 0; a < s; ++a) {
            double acc = 0.0;
            for (int b = 0; b < s; ++b) acc += kinv(b, a) * rhs[b];
            pi_[T_[a]] = acc;
        }
    }

    void reduced_costs(const std::vector<double>& c) {
        d_.assign(nv_, 0.0);
        for (int j = 0; j < n_; ++j) d_[j] = c[j];
        for (int i = 0; i < m_; ++i) {
            const double p = pi_[i];
            if (p == 0.0) continue;
            for (int q = row_start_[i]; q < row_start_[i + 1]; ++q) d_[row_col_[q]] -= p * row_val_[q];
            d_[n_ + i] = c[n_ + i] + p;
        }
    }

    // ----- kernel updates (one per basis change) --------------------------
    std::vector<double> row_times_kinv(int r, std::vector<double>& krow) const {
        const int s = static_cast<int>(J_.size());
        krow.assign(s, 0.0);
        for (int p = row_start_[r]; p < row_start_[r + 1]; ++p) {
            const int b = posJ_[row_col_[p]];
            if (b >= 0) krow[b] = row_val_[p];
        }
        std::vector<double> v(s, 0.0);
        for (int b = 0; b < s; ++b) {
            if (krow[b] == 0.0) continue;
            for (int a = 0; a < s; ++a) v[a] += krow[b] * kinv(b, a);
        }
        return v;
    }

    void pivot_basis(int q, int leave) {
        const int s = static_cast<int>(J_.size());
        const bool q_struct = q < n_;
        const bool l_struct = leave < n_;
        if (q_struct && !l_struct) {
            // Kernel grows: new row r, new column q.
            const int r = leave - n_;
            std::vector<double> krow;
            std::vector<double> v = row_times_kinv(r, krow);
            const double sigma = -zS_[r];
            ensure_capacity(s + 1);
            for (int b = 0; b < s; ++b) {
                const double ub = zJ_[b] / sigma;
                for (int a = 0; a < s; ++a) kinv(b, a) += ub * v[a];
                kinv(b, s) = -ub;
            }
            for (int a = 0; a < s; ++a) kinv(s, a) = -v[a] / sigma;
            kinv(s, s) = 1.0 / sigma;
            posJ_[q] = s;
            J_.push_back(q);
            posT_[r] = s;
            T_.push_back(r);
        } else if (q_struct && l_struct) {
            const int bl = posJ_[leave];
            const double piv = zJ_[bl];
            for (int a = 0; a < s; ++a) kinv(bl, a) /= piv;
            for (int b = 0; b < s; ++b) {
                if (b == bl || zJ_[b] == 0.0) continue;
                const double f = zJ_[b];
                for (int a = 0; a < s; ++a) kinv(b, a) -= f * kinv(bl, a);
            }
            J_[bl] = q;
            posJ_[leave] = -1;
            posJ_[q] = bl;
        } else if (!q_struct && !l_struct) {
            // Row t of the kernel replaced by row r.
            const int t = q - n_;
            const int r = leave - n_;
            const int at = posT_[t];
            std::vector<double> krow;
            std::vector<double> v = row_times_kinv(r, krow);
            std::vector<double> col(s);
            for (int b = 0; b < s; ++b) col[b] = kinv(b, at);
            const double denom = v[at];
            v[at] -= 1.0;
            for (int b = 0; b < s; ++b) {
                const double f = col[b] / denom;
                if (f == 0.0) continue;
                for (int a = 0; a < s; ++a) kinv(b, a) -= f * v[a];
            }
            T_[at] = r;
            posT_[t] = -1;
            posT_[r] = at;
        } else {
            // Kernel shrinks: drop row t and column `leave`.
            const int t = q - n_;
            const int at = posT_[t];
            const int bl = posJ_[leave];
            const double sv = kinv(bl, at);
            for (int b = 0; b < s; ++b) {
                if (b == bl) continue;
                const double f = kinv(b, at) / sv;
                if (f == 0.0) continue;
                for (int a = 0; a < s; ++a) {
                    if (a == at) continue;
                    kinv(b, a) -= f * kinv(bl, a);
                }
            }
            const int last = s - 1;
            if (bl != last) {
                for (int a = 0; a < s; ++a) kinv(bl, a) = kinv(last, a);
                J_[bl] = J_[last];
                posJ_[J_[bl]] = bl;
            }
            J_.pop_back();
            posJ_[leave] = -1;
            if (at != last) {
                for (int b = 0; b < last; ++b) kinv(b, at) = kinv(b, last);
                T_[at] = T_[last];
                posT_[T_[at]] = at;
            }
            T_.pop_back();
            posT_[t] = -1;
        }
        ++updates_;
    }

    // ----- main loop -----------------------------------------------------
    bool infeasible_basic(int v) const {
        return x_[v] < lo_[v] - opt_.feasibility_tol || x_[v] > up_[v] + opt_.feasibility_tol;
    }

    Status iterate() {
        long stall = 0;
        bool bland = false;
        int clean_checks = 0;
        std::vector<double> c(nv_, 0.0);
        while (true) {
            if (iterations_ >= max_iter_) return Status::IterationLimit;
            if (updates_ >= opt_.refactor_interval) {
                if (!refactor()) return Status::NumericalFailure;
                compute_primal();
            }
            // Phase selection from current basic infeasibilities.
            bool phase1 = false;
            std::fill(c.begin(), c.end(), 0.0);
            for (int b : J_) {
                if (x_[b] < lo_[b] - opt_.feasibility_tol) { c[b] = -1.0; phase1 = true; }
                else if (x_[b] > up_[b] + opt_.feasibility_tol) { c[b] = 1.0; phase1 = true; }
            }
            for (int i = 0; i < m_; ++i) {
                if (posT_[i] >= 0) continue;
                const int v = n_ + i;
                if (x_[v] < lo_[v] - opt_.feasibility_tol) { c[v] = -1.0; phase1 = true; }
                else if (x_[v] > up_[v] + opt_.feasibility_tol) { c[v] = 1.0; phase1 = true; }
            }
            if (!phase1) {
                for (int j = 0; j < n_; ++j) c[j] = cost_[j];
            }
            btran(c);
            reduced_costs(c);

            // Entering variable.
            int q = -1;
            double best = 0.0;
            int dir = 0;
            const double tol = opt_.optimality_tol;
            for (int v = 0; v < nv_; ++v) {
                const VarStatus st = status_[v];
                if (st == VarStatus::Basic) continue;
                if (lo_[v] == up_[v]) continue;
                const double dv = d_[v];
                int vdir = 0;
                if (st == VarStatus::AtLower && dv < -tol) vdir = 1;
                else if (st == VarStatus::AtUpper && dv > tol) vdir = -1;
                else if (st == VarStatus::AtZero && std::abs(dv) > tol) vdir = dv < 0 ? 1 : -1;
                if (vdir == 0) continue;
                if (bland) {
                    q = v;
                    dir = vdir;
                    break;
                }
                if (std::abs(dv) > best) {
                    best = std::abs(dv);
                    q = v;
                    dir = vdir;
                }
            }
            if (q < 0) {
                if (phase1) return Status::Infeasible;
                // Confirm on a fresh factorization before declaring optimality.
                if (updates_ > 0 && clean_checks < 3) {
                    ++clean_checks;
                    if (!refactor()) return Status::NumericalFailure;
                    compute_primal();
                    continue;
                }
                return Status::Optimal;
            }

            ftran(q);
            // Ratio test: basic v moves at rate g = -dir * z_v per unit step.
            double theta = kInf;
            int leave = -1;
            bool leave_upper = false;
            const double ptol = opt_.pivot_tol;
            const double ftol = opt_.feasibility_tol;
            auto each_basic = [&](auto&& fn) {
                for (int b : J_) fn(b);
                for (int i = 0; i < m_; ++i)
                    if (posT_[i] < 0) fn(n_ + i);
            };
            // Pass 1 (Harris): relaxed bound on the step.
            double theta_max = kInf;
            each_basic([&](int v) {
                const double g = -dir * z_of(v);
                if (std::abs(g) <= ptol) return;
                const bool below = x_[v] < lo_[v] - ftol;
                const bool above = x_[v] > up_[v] + ftol;
                double lim = kInf;
                if (below) {
                    if (g > 0) lim = (lo_[v] - x_[v]) / g;
                } else if (above) {
                    if (g < 0) lim = (x_[v] - up_[v]) / -g;
                } else if (g < 0 && std::isfinite(lo_[v])) {
                    lim = (x_[v] - lo_[v] + (bland ? 0.0 : ftol)) / -g;
                } else if (g > 0 && std::isfinite(up_[v])) {
                    lim = (up_[v] - x_[v] + (bland ? 0.0 : ftol)) / g;
                }
                theta_max = std::min(theta_max, lim);
            });
            // Pass 2: among candidates within theta_max pick the largest |g|
            // (Bland: smallest index at the minimum ratio).
            double best_g = 0.0;
            each_basic([&](int v) {
                const double g = -dir * z_of(v);
                if (std::abs(g) <= ptol) return;
                const bool below = x_[v] < lo_[v] - ftol;
                const bool above = x_[v] > up_[v] + ftol;
                double ratio = kInf;
                bool at_upper = false;
                if (below) {
                    if (g > 0) ratio = (lo_[v] - x_[v]) / g;
                } else if (above) {
                    if (g < 0) { ratio = (x_[v] - up_[v]) / -g; at_upper = true; }
                } else if (g < 0 && std::isfinite(lo_[v])) {
                    ratio = (x_[v] - lo_[v]) / -g;
                } else if (g > 0 && std::isfinite(up_[v])) {
                    ratio = (up_[v] - x_[v]) / g;
                    at_upper = true;
                }
                if (!std::isfinite(ratio) || ratio > theta_max) return;
                bool take = false;
                if (bland) {
                    take = leave < 0 || ratio < theta - 1e-15 || (ratio <= theta + 1e-15 && v < leave);
                } else {
                    take = std::abs(g) > best_g;
                }
                if (take) {
                    best_g = std::abs(g);
                    theta = std::max(ratio, 0.0);
                    leave = v;
                    leave_upper = at_upper;
                }
            });
            const double range = up_[q] - lo_[q];
            const bool flip = std::isfinite(range) && range <= theta;
            if (leave < 0 && !flip) {
                if (phase1) return Status::NumericalFailure;
                return Status::Unbounded;
            }
            if (flip) theta = range;

            // Apply the step.
            const double step = dir * theta;
            x_[q] += step;
            each_basic([&](int v) { x_[v] -= step * z_of(v); });
            ++iterations_;
            const double gain = theta * std::abs(d_[q]);
            if (gain > 1e-12) {
                stall = 0;
                bland = false;
            } else if (++stall > stall_limit_) {
                bland = true;
                used_bland_ = true;
            }
            if (flip) {
                status_[q] = dir > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
                x_[q] = dir > 0 ? up_[q] : lo_[q];
                continue;
            }
            if (std::abs(z_of(leave)) < ptol) return Status::NumericalFailure;
            x_[leave] = leave_upper ? up_[leave] : lo_[leave];
            pivot_basis(q, leave);
            status_[leave] = leave_upper ? VarStatus::AtUpper : VarStatus::AtLower;
            status_[q] = VarStatus::Basic;
            clean_checks = 0;
        }
    }

    void fill_solution(LpSolution& sol) {
        const double sign = lp_.maximize() ? -1.0 : 1.0;
        sol.primal.assign(x_.begin(), x_.begin() + n_);
        std::vector<double> c(nv_, 0.0);
        for (int j = 0; j < n_; ++j) c[j] = cost_[j];
        if (!J_.empty() || m_ > 0) {
            btran(c);
            reduced_costs(c);
        }
        sol.duals.resize(m_);
        for (int i = 0; i < m_; ++i) sol.duals[i] = sign * pi_[i];
        sol.reduced_costs.resize(n_);
        for (int j = 0; j < n_; ++j) sol.reduced_costs[j] = sign * d_[j];
        double obj = 0.0;
        for (int j = 0; j < n_; ++j) obj += lp_.cost(j) * x_[j];
        sol.objective = obj;
        sol.basis.columns.assign(status_.begin(), status_.begin() + n_);
        sol.basis.rows.assign(status_.begin() + n_, status_.end());
    }

    const LinearProgram& lp_;
    SimplexOptions opt_;
    int n_ = 0, m_ = 0, nv_ = 0;
    std::vector<double> cost_, lo_, up_;
    std::vector<int> row_start_, row_col_;
    std::vector<double> row_val_;
    std::vector<VarStatus> status_;
    std::vector<int> J_, T_, posJ_, posT_;
    std::vector<double> kinv_;
    int cap_ = 0;
    int updates_ = 0;
    std::vector<double> x_, zJ_, zS_, pi_, d_;
    long iterations_ = 0;
    long max_iter_ = 0;
    long stall_limit_ = 0;
    bool used_bland_ = false;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
    Engine engine(lp, options);
    return engine.run(nullptr);
}

LpSolution warm_start_solve(const LinearProgram& lp, const Basis& previous, const SimplexOptions& options) {
    Engine engine(lp, options);
    return engine.run(&previous);
}

}  // namespace omfloc::lp
