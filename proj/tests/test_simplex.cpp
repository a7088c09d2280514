#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>

#include "omfloc/simplex.hpp"

using namespace omfloc::lp;

namespace {

struct Dense {
    std::vector<std::vector<double>> a;  // rows
    std::vector<RowSense> sense;
    std::vector<double> b, c, lo, up;
    bool maximize = false;
};

LinearProgram to_lp(const Dense& d) {
    LinearProgram lp;
    for (std::size_t i = 0; i < d.b.size(); ++i) lp.add_row(d.sense[i], d.b[i]);
    for (std::size_t j = 0; j < d.c.size(); ++j) {
        std::vector<Entry> col;
        for (std::size_t i = 0; i < d.b.size(); ++i)
            if (d.a[i][j] != 0.0) col.push_back({static_cast<int>(i), d.a[i][j]});
        lp.add_column(d.c[j], d.lo[j], d.up[j], col);
    }
    lp.set_maximize(d.maximize);
    return lp;
}

// Solves M z = r by Gaussian elimination; false when singular.
bool solve_square(std::vector<std::vector<double>> m, std::vector<double> r, std::vector<double>& z) {
    const std::size_t n = r.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t i = c + 1; i < n; ++i)
            if (std::abs(m[i][c]) > std::abs(m[piv][c])) piv = i;
        if (std::abs(m[piv][c]) < 1e-10) return false;
        std::swap(m[piv], m[c]);
        std::swap(r[piv], r[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c) continue;
            const double f = m[i][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[i][k] -= f * m[c][k];
            r[i] -= f * r[c];
        }
    }
    z.resize(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / m[i][i];
    return true;
}

// Vertex enumeration over all choices of n active constraints (rows or finite bounds).
std::optional<double> enumerate_vertices(const Dense& d) {
    const std::size_t n = d.c.size(), m = d.b.size();
    struct Con { std::vector<double> row; double rhs; };
    std::vector<Con> cons;
    for (std::size_t i = 0; i < m; ++i) cons.push_back({d.a[i], d.b[i]});
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        if (std::isfinite(d.lo[j])) cons.push_back({e, d.lo[j]});
        if (std::isfinite(d.up[j])) cons.push_back({e, d.up[j]});
    }
    std::optional<double> best;
    std::vector<int> pick(n);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
        if (depth == n) {
            std::vector<std::vector<double>> mm;
            std::vector<double> rr;
            for (int k : pick) {
                mm.push_back(cons[k].row);
                rr.push_back(cons[k].rhs);
            }
            std::vector<double> x;
            if (!solve_square(mm, rr, x)) return;
            for (std::size_t j = 0; j < n; ++j)
                if (x[j] < d.lo[j] - 1e-8 || x[j] > d.up[j] + 1e-8) return;
            for (std::size_t i = 0; i < m; ++i) {
                double act = 0.0;
                for (std::size_t j = 0; j < n; ++j) act += d.a[i][j] * x[j];
                if (d.sense[i] == RowSense::GreaterEqual && act < d.b[i] - 1e-8) return;
                if (d.sense[i] == RowSense::LessEqual && act > d.b[i] + 1e-8) return;
                if (d.sense[i] == RowSense::Equal && std::abs(act - d.b[i]) > 1e-8) return;
            }
            double obj = 0.0;
            for (std::size_t j = 0; j < n; ++j) obj += d.c[j] * x[j];
            if (!best || (d.maximize ? obj > *best : obj < *best)) best = obj;
            return;
        }
        for (std::size_t k = start; k < cons.size(); ++k) {
            pick[depth] = static_cast<int>(k);
            rec(k + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

// Primal feasibility, dual sign feasibility, complementary slackness and zero gap.
void check_kkt(const Dense& d, const LpSolution& s) {
    const std::size_t n = d.c.size(), m = d.b.size();
    const double sg = d.maximize ? -1.0 : 1.0;  // convert to a minimization view
    double scale = 1.0;
    for (double v : d.c) scale = std::max(scale, std::abs(v));
    for (std::size_t j = 0; j < n; ++j) {
        REQUIRE(s.primal[j] >= d.lo[j] - 1e-7);
        REQUIRE(s.primal[j] <= d.up[j] + 1e-7);
    }
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double act = 0.0;
        for (std::size_t j = 0; j < n; ++j) act += d.a[i][j] * s.primal[j];
        const double y = sg * s.duals[i];
        switch (d.sense[i]) {
            case RowSense::GreaterEqual:
                REQUIRE(act >= d.b[i] - 1e-7);
                REQUIRE(y >= -1e-7 * scale);
                break;
            case RowSense::LessEqual:
                REQUIRE(act <= d.b[i] + 1e-7);
                REQUIRE(y <= 1e-7 * scale);
                break;
            case RowSense::Equal:
                REQUIRE(std::abs(act - d.b[i]) <= 1e-7);
                break;
        }
        REQUIRE(std::abs(y * (act - d.b[i])) <= 1e-6 * scale);
        dual_obj += y * d.b[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
        double rc = sg * d.c[j];
        for (std::size_t i = 0; i < m; ++i) rc -= sg * s.duals[i] * d.a[i][j];
        REQUIRE(std::abs(rc - sg * s.reduced_costs[j]) <= 1e-7 * scale);
        const bool at_lo = std::abs(s.primal[j] - d.lo[j]) <= 1e-7;
        const bool at_up = std::abs(s.primal[j] - d.up[j]) <= 1e-7;
        if (!at_lo) REQUIRE(rc <= 1e-7 * scale);
        if (!at_up) REQUIRE(rc >= -1e-7 * scale);
        if (rc > 0) dual_obj += rc * d.lo[j];
        else if (rc < 0) dual_obj += rc * d.up[j];
    }
    const double primal_obj = sg * s.objective;
    REQUIRE(std::abs(primal_obj - dual_obj) <= 1e-7 * std::max(1.0, std::abs(primal_obj)));
}

Dense random_lp(std::mt19937_64& rng, std::size_t m, std::size_t n, bool allow_free) {
    std::uniform_real_distribution<double> U(-5, 5);
    Dense d;
    d.maximize = rng() % 2;
    // A feasible point x0 keeps every generated instance feasible.
    std::vector<double> x0(n);
    for (std::size_t j = 0; j < n; ++j) {
        x0[j] = std::uniform_real_distribution<double>(0, 3)(rng);
        const int kind = static_cast<int>(rng() % (allow_free ? 4 : 3));
        if (kind == 0) { d.lo.push_back(0); d.up.push_back(kInf); }
        else if (kind == 1) { d.lo.push_back(0); d.up.push_back(4); }
        else if (kind == 2) { d.lo.push_back(-1); d.up.push_back(3); }
        else { d.lo.push_back(-kInf); d.up.push_back(kInf); }
        d.c.push_back(std::round(U(rng)));
    }
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> row(n);
        double act = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = rng() % 3 == 0 ? 0.0 : std::round(U(rng));
            act += row[j] * x0[j];
        }
        const int s = static_cast<int>(rng() % 5);
        if (s < 2) { d.sense.push_back(RowSense::LessEqual); d.b.push_back(std::ceil(act)); }
        else if (s < 4) { d.sense.push_back(RowSense::GreaterEqual); d.b.push_back(std::floor(act)); }
        else { d.sense.push_back(RowSense::Equal); d.b.push_back(act); }
        d.a.push_back(row);
    }
    return d;
}

}  // namespace

TEST_CASE("max x subject to x <= 3") {
    LinearProgram lp;
    lp.add_row(RowSense::LessEqual, 3.0);
    const Entry e{0, 1.0};
    lp.add_column(1.0, 0.0, kInf, std::span<const Entry>(&e, 1));
    lp.set_maximize(true);
    auto s = solve_lp(lp);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.primal[0] == doctest::Approx(3.0));
    CHECK(s.duals[0] == doctest::Approx(1.0));
    CHECK(s.objective == doctest::Approx(3.0));
}

TEST_CASE("single-row master skeleton") {
    LinearProgram lp;
    lp.add_row(RowSense::GreaterEqual, 2.0);
    const Entry e{0, 1.0};
    lp.add_column(1.0, -kInf, kInf, std::span<const Entry>(&e, 1));
    lp.add_column(1.0, -kInf, kInf, std::span<const Entry>(&e, 1));
    auto s = solve_lp(lp);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(2.0));
    CHECK(s.duals[0] == doctest::Approx(1.0));
}

TEST_CASE("degenerate cycling-prone LP terminates") {
    // Beale's example: textbook Dantzig pivoting cycles on it.
    Dense d;
    d.a = {{0.25, -8, -1, 9}, {0.5, -12, -0.5, 3}, {0, 0, 1, 0}};
    d.sense = {RowSense::LessEqual, RowSense::LessEqual, RowSense::LessEqual};
    d.b = {0, 0, 1};
    d.c = {-0.75, 20, -0.5, 6};
    d.lo.assign(4, 0.0);
    d.up.assign(4, kInf);
    for (long stall : {0L, 1L}) {
        SimplexOptions opt;
        opt.stall_limit = stall;
        auto s = solve_lp(to_lp(d), opt);
        REQUIRE(s.status == Status::Optimal);
        auto ref = enumerate_vertices(d);
        REQUIRE(ref.has_value());
        CHECK(s.objective == doctest::Approx(*ref).epsilon(1e-9));
        CHECK(s.objective == doctest::Approx(-1.25).epsilon(1e-9));
        check_kkt(d, s);
    }

    // Three variables, every row tight at the origin.
    Dense t;
    t.a = {{1, -1, 0}, {0, 1, -1}, {-1, 0, 1}, {1, 1, 1}};
    t.sense = {RowSense::LessEqual, RowSense::LessEqual, RowSense::LessEqual, RowSense::LessEqual};
    t.b = {0, 0, 0, 3};
    t.c = {-1, -2, -3};
    t.lo.assign(3, 0.0);
    t.up.assign(3, kInf);
    SimplexOptions opt;
    opt.stall_limit = 1;
    auto s = solve_lp(to_lp(t), opt);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(*enumerate_vertices(t)).epsilon(1e-9));
}

TEST_CASE("infeasible and unbounded are reported") {
    LinearProgram lp;
    lp.add_row(RowSense::GreaterEqual, 2.0);
    lp.add_row(RowSense::LessEqual, 1.0);
    const Entry e[] = {{0, 1.0}, {1, 1.0}};
    lp.add_column(1.0, 0.0, kInf, e);
    CHECK(solve_lp(lp).status == Status::Infeasible);

    LinearProgram u;
    u.add_row(RowSense::GreaterEqual, 1.0);
    const Entry f{0, 1.0};
    u.add_column(-1.0, 0.0, kInf, std::span<const Entry>(&f, 1));
    CHECK(solve_lp(u).status == Status::Unbounded);
}

TEST_CASE("random small LPs match vertex enumeration") {
    std::mt19937_64 rng(2024);
    int solved = 0;
    for (int t = 0; t < 300; ++t) {
        const std::size_t m = 1 + rng() % 4, n = 1 + rng() % 4;
        Dense d = random_lp(rng, m, n, false);
        // Bound everything so the enumeration sees every vertex.
        for (std::size_t j = 0; j < n; ++j)
            if (!std::isfinite(d.up[j])) d.up[j] = 6;
        auto s = solve_lp(to_lp(d));
        auto ref = enumerate_vertices(d);
        REQUIRE(ref.has_value());
        REQUIRE(s.status == Status::Optimal);
        REQUIRE(s.objective == doctest::Approx(*ref).epsilon(1e-8));
        check_kkt(d, s);
        ++solved;
    }
    CHECK(solved == 300);
}

TEST_CASE("random LPs with free variables satisfy KKT") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 60; ++t) {
        const std::size_t m = 5 + rng() % 30, n = 5 + rng() % 30;
        Dense d = random_lp(rng, m, n, true);
        // Box the free and unbounded columns loosely so the LP stays bounded.
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(d.lo[j])) d.lo[j] = -50;
            if (!std::isfinite(d.up[j])) d.up[j] = 50;
        }
        auto lp = to_lp(d);
        auto s = solve_lp(lp);
        REQUIRE(s.status == Status::Optimal);
        check_kkt(d, s);
        auto again = solve_lp(lp);
        REQUIRE(again.iterations == s.iterations);
        REQUIRE(again.primal == s.primal);
    }
}

TEST_CASE("free variables without bounds") {
    // min u + v  s.t. u + v >= 3, u - v >= 1, u, v free.
    LinearProgram lp;
    lp.add_row(RowSense::GreaterEqual, 3.0);
    lp.add_row(RowSense::GreaterEqual, 1.0);
    const Entry cu[] = {{0, 1.0}, {1, 1.0}};
    const Entry cv[] = {{0, 1.0}, {1, -1.0}};
    lp.add_column(1.0, -kInf, kInf, cu);
    lp.add_column(1.0, -kInf, kInf, cv);
    auto s = solve_lp(lp);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(3.0));
    CHECK(s.duals[0] == doctest::Approx(1.0));
    CHECK(s.duals[1] == doctest::Approx(0.0));
}

TEST_CASE("warm start after appending columns") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 40; ++t) {
        Dense d = random_lp(rng, 6 + rng() % 10, 6 + rng() % 10, false);
        d.maximize = false;
        for (std::size_t j = 0; j < d.c.size(); ++j)
            if (!std::isfinite(d.up[j])) d.up[j] = 20;
        auto lp = to_lp(d);
        auto base = solve_lp(lp);
        REQUIRE(base.status == Status::Optimal);

        // Column with nonnegative reduced cost: objective unchanged.
        std::vector<Entry> col;
        double price = 0.0;
        for (int i = 0; i < lp.num_rows(); ++i) {
            const double a = std::round(std::uniform_real_distribution<double>(-3, 3)(rng));
            if (a != 0.0) col.push_back({i, a});
            price += base.duals[i] * a;
        }
        auto lp2 = lp;
        lp2.add_column(price + 1.0, 0.0, kInf, col);
        auto w = warm_start_solve(lp2, base.basis);
        REQUIRE(w.status == Status::Optimal);
        CHECK(w.warm_started);
        CHECK(w.objective == doctest::Approx(base.objective).epsilon(1e-9));

        // Reduced cost -1 and room to move: strictly better.
        auto lp3 = lp;
        lp3.add_column(price - 1.0, 0.0, 1.0, col);
        auto w3 = warm_start_solve(lp3, base.basis);
        auto c3 = solve_lp(lp3);
        REQUIRE(w3.status == Status::Optimal);
        REQUIRE(c3.status == Status::Optimal);
        CHECK(w3.objective < base.objective - 1e-9);
        CHECK(w3.objective == doctest::Approx(c3.objective).epsilon(1e-9));
        CHECK(w3.iterations <= 2 * c3.iterations + 10);
    }
}

TEST_CASE("inconsistent warm basis falls back to a cold start") {
    LinearProgram lp;
    lp.add_row(RowSense::LessEqual, 3.0);
    const Entry e{0, 1.0};
    lp.add_column(1.0, 0.0, kInf, std::span<const Entry>(&e, 1));
    lp.set_maximize(true);
    Basis bad;
    bad.columns = {VarStatus::Basic};
    bad.rows = {VarStatus::Basic};
    auto s = warm_start_solve(lp, bad);
    REQUIRE(s.status == Status::Optimal);
    CHECK_FALSE(s.warm_started);
    CHECK_FALSE(s.diagnostics.empty());
    CHECK(s.objective == doctest::Approx(3.0));
}
