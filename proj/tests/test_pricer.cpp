#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "omfloc/objective.hpp"

using namespace omfloc;
using namespace fixtures;

namespace {

MasterDuals manual_duals(std::vector<double> alpha, double gamma, std::vector<double> c) {
    MasterDuals d;
    const std::size_t n = alpha.size();
    d.alpha = std::move(alpha);
    d.gamma = gamma;
    d.c = std::move(c);
    d.epsilon.assign(n * n, 0.0);
    return d;
}

}  // namespace

TEST_CASE("point scores") {
    Instance inst({{0, 0}, {3, 4}}, 1, NormSpec::l2(), make_lambda(LambdaKind::W, 2));
    auto zero = manual_duals({0, 0}, 0, {1, 2});
    for (double e : point_scores(inst, zero, Point{7, 1})) CHECK(e >= 0);
    auto even = manual_duals({5, 0}, 0, {1, 1});
    CHECK(point_scores(inst, even, Point{3, 4})[0] == doctest::Approx(0.0));
    auto d = manual_duals({5, 0}, 0, {1, 1});
    CHECK(point_scores(inst, d, Point{0, 2})[0] == doctest::Approx(-3.0));
}

TEST_CASE("weber examples") {
    Instance line({{0, 0}, {2, 0}, {10, 0}}, 1, NormSpec::l1(), make_lambda(LambdaKind::W, 3));
    std::vector<int> one{1};
    std::vector<double> w1{1};
    CHECK(weber_solve(line, one, w1) == Point{2, 0});
    std::vector<int> all{0, 1, 2};
    std::vector<double> w{1, 1, 1};
    CHECK(weber_solve(line, all, w)[0] == 2.0);
    std::vector<double> zero{0, 0, 0};
    CHECK(weber_solve(line, all, zero)[0] == doctest::Approx(4.0));
    std::vector<double> bad{1, -1, 1};
    CHECK_THROWS_AS(weber_solve(line, all, bad), InvalidInput);

    Instance tri({{0, 0}, {4, 0}, {0, 4}}, 1, NormSpec::l2(), make_lambda(LambdaKind::W, 3));
    auto x = weber_solve(tri, all, w);
    const double fx = weber_objective(tri, all, w, x);
    double grid = 1e300;
    for (int a = 0; a < 500; ++a)
        for (int b = 0; b < 500; ++b) {
            Point g{4.0 * a / 499, 4.0 * b / 499};
            grid = std::min(grid, weber_objective(tri, all, w, g));
        }
    CHECK(fx <= grid + 1e-9);
    CHECK(fx >= grid - 1e-3);
}

TEST_CASE("weiszfeld is monotone and handles dominant vertices") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 100; ++t) {
        auto inst = random_instance(rng, 3 + rng() % 8, 1, NormSpec::l2(), LambdaKind::W);
        std::vector<int> s(inst.n());
        std::iota(s.begin(), s.end(), 0);
        std::vector<double> w(inst.n());
        for (auto& v : w) v = std::uniform_real_distribution<double>(0, 1)(rng);
        if (t % 3 == 0) w[0] = 20.0;  // optimum at a demand point
        std::vector<double> trace;
        auto x = weber_solve(inst, s, w, &trace);
        for (std::size_t k = 1; k < trace.size(); ++k) REQUIRE(trace[k] <= trace[k - 1] * (1 + 1e-12) + 1e-12);
        const double fx = weber_objective(inst, s, w, x);
        for (std::size_t i = 0; i < inst.n(); ++i) REQUIRE(fx <= weber_objective(inst, s, w, inst.point(i)) + 1e-9);
        if (t % 3 == 0) CHECK(norm_distance(x, inst.point(0), inst.norm()) <= 1e-6);
    }
}

TEST_CASE("ltau weber beats a fine grid") {
    std::mt19937_64 rng(21);
    for (auto nm : {NormSpec::ltau(3, 2), NormSpec::ltau(3, 1)}) {
        auto inst = random_instance(rng, 6, 1, nm, LambdaKind::W);
        std::vector<int> s{0, 1, 2, 3, 4, 5};
        std::vector<double> w{1, 2, 1, 0.5, 1, 1};
        auto x = weber_solve(inst, s, w);
        const double fx = weber_objective(inst, s, w, x);
        const Box box = bounding_box(inst);
        double grid = 1e300;
        for (int a = 0; a < 300; ++a)
            for (int b = 0; b < 300; ++b) {
                Point g{box.lower[0] + (box.upper[0] - box.lower[0]) * a / 299,
                        box.lower[1] + (box.upper[1] - box.lower[1]) * b / 299};
                grid = std::min(grid, weber_objective(inst, s, w, g));
            }
        CHECK(fx <= grid + 1e-7);
    }
}

TEST_CASE("box distance bounds are valid") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-10, 10);
    const NormSpec norms[] = {NormSpec::l1(), NormSpec::l2(), NormSpec::ltau(3, 2)};
    for (int t = 0; t < 1000; ++t) {
        const std::size_t d = 1 + rng() % 3;
        Box box{Point(d), Point(d)};
        Point a(d), x(d);
        for (std::size_t l = 0; l < d; ++l) {
            double p = U(rng), q = U(rng);
            box.lower[l] = std::min(p, q);
            box.upper[l] = std::max(p, q);
            a[l] = U(rng);
            x[l] = std::uniform_real_distribution<double>(box.lower[l], box.upper[l])(rng);
        }
        const auto& nm = norms[t % 3];
        const double dx = distance(a, x, nm);
        REQUIRE(dx >= distance_lower_bound(a, box, nm) - 1e-12);
        REQUIRE(dx <= distance_upper_bound(a, box, nm) + 1e-12);
    }
}

TEST_CASE("root heuristic pricer examples") {
    std::mt19937_64 rng(1);
    auto inst = random_instance(rng, 5, 2, NormSpec::l1(), LambdaKind::W);
    auto zero = manual_duals(std::vector<double>(5, 0.0), 0.0, std::vector<double>(5, 1.0));
    CHECK(candidate_points(inst, zero, rng, 32).empty());
    std::vector<Point> some{{1, 1}, {5, 5}};
    CHECK(heuristic_price_root(inst, zero, some).empty());

    Instance single({{2, 3}}, 1, NormSpec::l2(), make_lambda(LambdaKind::W, 1));
    auto d = manual_duals({1.0}, 0.5, {1.0});
    std::vector<Point> at{{2, 3}};
    auto cols = heuristic_price_root(single, d, at);
    REQUIRE(cols.size() == 1);
    CHECK(subset_reduced_cost(single, d, cols[0].subset, cols[0].facility) == doctest::Approx(-0.5));
}

TEST_CASE("heuristic columns agree with the master reduced cost") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        auto inst = random_instance(rng, 5 + rng() % 4, 2, t % 2 ? NormSpec::l1() : NormSpec::l2(),
                                    static_cast<LambdaKind>(t % 6));
        auto duals = rrmp_duals(rng, inst, 6);
        auto cand = candidate_points(inst, duals, rng, 32);
        for (const auto& col : heuristic_price_root(inst, duals, cand)) {
            const double rc = reduced_cost(col, duals, inst.lambda());
            CHECK(rc <= -1e-6);
            CHECK(rc == doctest::Approx(subset_reduced_cost(inst, duals, col.subset, col.facility)).epsilon(1e-9));
            for (std::size_t k = 0; k < col.subset.size(); ++k)
                CHECK(col.delta[k] >= distance(inst.point(col.subset[k]), col.facility, inst.norm()) - 1e-9);
        }
    }
}

TEST_CASE("warm re-solve after a pricing round matches a cold solve") {
    std::mt19937_64 rng(6);
    auto inst = random_instance(rng, 5, 2, NormSpec::l2(), LambdaKind::A);
    RestrictedMaster master(inst);
    master.add(random_columns(rng, inst, 4));
    BranchConstraints none(inst.n());
    auto first = master.solve(none);
    auto cand = candidate_points(inst, first.duals, rng, 32);
    auto cols = heuristic_price_root(inst, first.duals, cand);
    REQUIRE_FALSE(cols.empty());
    master.add(cols);
    auto warm = master.solve(none, &first.basis);
    auto cold = lp::solve_lp(master.lp());
    REQUIRE(warm.status == lp::Status::Optimal);
    CHECK(std::abs(warm.objective - cold.objective) <= 1e-9);
    CHECK(warm.objective < first.objective);
}

TEST_CASE("mwis pieces") {
    // Same pair with scores (-3, +1) is one vertex of weight -2.
    auto bc = BranchConstraints(3).with_same(0, 1);
    std::vector<double> e{-3, 1, 0.5};
    auto g = incompatibility_graph(bc, e);
    REQUIRE(g.groups.size() == 2);
    CHECK(g.weight[0] == -2.0);
    CHECK(greedy_mwis(g) == std::vector<int>{0});

    std::mt19937_64 rng(31);
    for (int t = 0; t < 200; ++t) {
        IncompatibilityGraph h;
        const int m = 1 + static_cast<int>(rng() % 10);
        for (int v = 0; v < m; ++v) {
            h.groups.push_back({v});
            h.weight.push_back(std::uniform_real_distribution<double>(-5, 3)(rng));
        }
        h.adjacent.assign(m, {});
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b)
                if (rng() % 3 == 0) {
                    h.adjacent[a].push_back(b);
                    h.adjacent[b].push_back(a);
                }
        const double brute = brute_mwis(h);
        double ex = 0.0, gr = 0.0;
        for (int v : exact_mwis(h)) ex += h.weight[v];
        for (int v : greedy_mwis(h)) gr += h.weight[v];
        REQUIRE(ex == doctest::Approx(brute));
        REQUIRE(gr >= brute - 1e-12);
    }
}

TEST_CASE("branched heuristic pricer") {
    std::mt19937_64 rng(8);
    auto inst = random_instance(rng, 6, 2, NormSpec::l2(), LambdaKind::W);
    auto duals = rrmp_duals(rng, inst, 5);
    auto cand = candidate_points(inst, duals, rng, 8);
    // Without constraints it reproduces the sign rule.
    BranchConstraints none(inst.n());
    PricerOptions one;
    one.refine_rounds = 0;
    for (const auto& x : cand) {
        std::vector<Point> single{x};
        auto a = heuristic_price_root(inst, duals, single, one);
        auto b = heuristic_price_branched(inst, duals, none, single, one);
        REQUIRE(a.size() == b.size());
        if (!a.empty()) CHECK(a[0].subset == b[0].subset);
    }
    auto bc = BranchConstraints(inst.n()).with_different(0, 1).with_same(2, 3);
    auto d2 = rrmp_duals(rng, inst, 8, &bc);
    auto c2 = candidate_points(inst, d2, rng, 32);
    for (const auto& x : c2) {
        std::vector<Point> single{x};
        auto cols = heuristic_price_branched(inst, d2, bc, single, one);
        const double brute = d2.gamma + brute_mwis(incompatibility_graph(bc, point_scores(inst, d2, x)));
        for (const auto& col : cols) {
            CHECK(bc.allows(col.subset));
            CHECK(subset_reduced_cost(inst, d2, col.subset, col.facility) >= brute - 1e-9);
        }
    }
}

TEST_CASE("exact pricing examples") {
    std::mt19937_64 rng(2);
    auto inst = random_instance(rng, 5, 2, NormSpec::l2(), LambdaKind::W);
    auto zero = manual_duals(std::vector<double>(5, 0.0), 0.25, std::vector<double>(5, 1.0));
    auto r0 = exact_price(inst, zero, BranchConstraints(5));
    CHECK(r0.exact);
    CHECK(r0.min_reduced_cost == 0.25);
    CHECK(r0.columns.empty());

    Instance single({{0, 0}}, 1, NormSpec::l2(), make_lambda(LambdaKind::W, 1));
    auto d = manual_duals({5.0}, 0.0, {1.0});
    auto r1 = exact_price(single, d, BranchConstraints(1));
    CHECK(r1.exact);
    CHECK(r1.min_reduced_cost == doctest::Approx(-5.0));
    REQUIRE(r1.columns.size() == 1);
    CHECK(r1.columns[0].facility == Point{0, 0});
}

TEST_CASE("exact pricing matches a 200x200 grid on lattice fixtures") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 6; ++t) {
        auto inst = lattice_instance(rng, 4 + t % 3, 2, NormSpec::l1(), static_cast<LambdaKind>(t % 6));
        auto duals = rrmp_duals(rng, inst, 5);
        auto res = exact_price(inst, duals, BranchConstraints(inst.n()));
        REQUIRE(res.exact);
        const double grid = grid_pricing_min(inst, duals, BranchConstraints(inst.n()), 200);
        CHECK(std::abs(grid - res.min_reduced_cost) <= 1e-4);
        CHECK(grid >= res.lower_bound - 1e-9);
        for (const auto& col : res.columns) {
            CHECK(reduced_cost(col, duals, inst.lambda()) <= -1e-6);
            CHECK(reduced_cost(col, duals, inst.lambda()) ==
                  doctest::Approx(subset_reduced_cost(inst, duals, col.subset, col.facility)).epsilon(1e-9));
        }
    }
}

TEST_CASE("exact pricing is never beaten by grid samples") {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 10; ++t) {
        auto nm = t % 3 == 0 ? NormSpec::l2() : (t % 3 == 1 ? NormSpec::l1() : NormSpec::ltau(3, 2));
        auto inst = random_instance(rng, 4 + t % 7, 2, nm, static_cast<LambdaKind>(t % 6));
        auto duals = rrmp_duals(rng, inst, 6);
        auto res = exact_price(inst, duals, BranchConstraints(inst.n()));
        REQUIRE(res.exact);
        const double grid = grid_pricing_min(inst, duals, BranchConstraints(inst.n()), 120);
        CHECK(grid >= res.min_reduced_cost - 1e-4);
        CHECK(grid >= res.lower_bound - 1e-9);
    }
}

TEST_CASE("exact pricing under branching respects constraints and beats the grid") {
    std::mt19937_64 rng(15);
    for (int t = 0; t < 6; ++t) {
        auto inst = lattice_instance(rng, 6, 2, NormSpec::l1(), static_cast<LambdaKind>(t % 6));
        auto bc = BranchConstraints(inst.n()).with_different(0, 1).with_same(2, 3);
        if (t % 2) bc = bc.with_different(3, 4);
        auto duals = rrmp_duals(rng, inst, 8, &bc);
        auto res = exact_price(inst, duals, bc);
        REQUIRE(res.exact);
        for (const auto& col : res.columns) CHECK(bc.allows(col.subset));
        const double grid = grid_pricing_min(inst, duals, bc, 200);
        CHECK(std::abs(grid - res.min_reduced_cost) <= 1e-4);
    }
}

