#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "omfloc/master.hpp"
#include "omfloc/model.hpp"
#include "omfloc/pricer.hpp"

namespace fixtures {

using namespace omfloc;

inline LambdaVector lambda_of(LambdaKind kind, std::size_t n) {
    return make_lambda(kind, n, std::max<std::size_t>(1, n / 2), 0.9);
}

inline Instance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t p, NormSpec norm,
                                LambdaKind kind, double side = 10.0) {
    std::uniform_real_distribution<double> U(0, side);
    std::vector<Point> pts(n);
    for (auto& q : pts) q = {U(rng), U(rng)};
    return Instance(pts, p, norm, lambda_of(kind, n));
}

/// Integer points whose bounding box is exactly [0, 199]^2.
inline Instance lattice_instance(std::mt19937_64& rng, std::size_t n, std::size_t p, NormSpec norm,
                                 LambdaKind kind) {
    std::uniform_int_distribution<int> U(0, 199);
    std::vector<Point> pts(n);
    for (auto& q : pts) q = {double(U(rng)), double(U(rng))};
    pts[0][0] = 0;
    pts[1 % n][0] = 199;
    pts[2 % n][1] = 0;
    pts[3 % n][1] = 199;
    return Instance(pts, p, norm, lambda_of(kind, n));
}

inline std::vector<Column> random_columns(std::mt19937_64& rng, const Instance& inst, int count) {
    const Box box = bounding_box(inst);
    std::vector<Column> out;
    for (int c = 0; c < count; ++c) {
        std::vector<int> s;
        for (int i = 0; i < static_cast<int>(inst.n()); ++i)
            if (rng() % 3 == 0) s.push_back(i);
        if (s.empty()) s.push_back(static_cast<int>(rng() % inst.n()));
        Point x(inst.d());
        for (std::size_t l = 0; l < inst.d(); ++l)
            x[l] = std::uniform_real_distribution<double>(box.lower[l], box.upper[l] + 1e-9)(rng);
        out.push_back(make_column(inst, s, x));
    }
    return out;
}

/// Duals of an RRMP over the artificial column plus random columns.
inline MasterDuals rrmp_duals(std::mt19937_64& rng, const Instance& inst, int columns,
                              const BranchConstraints* node = nullptr) {
    RestrictedMaster master(inst);
    master.add(random_columns(rng, inst, columns), node);
    BranchConstraints bc = node ? *node : BranchConstraints(inst.n());
    return master.solve(bc).duals;
}

/// Brute-force minimum weight independent set value (vertices <= 20).
inline double brute_mwis(const IncompatibilityGraph& g) {
    const std::size_t m = g.weight.size();
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        bool ok = true;
        double v = 0.0;
        for (std::size_t a = 0; a < m && ok; ++a) {
            if (!(mask >> a & 1)) continue;
            v += g.weight[a];
            for (int b : g.adjacent[a])
                if (mask >> b & 1) ok = false;
        }
        if (ok) best = std::min(best, v);
    }
    return best;
}

/// Best reduced cost over an res x res grid spanning the bounding box (inclusive),
/// using the sign rule (or brute-force MWIS under branching) at each node.
inline double grid_pricing_min(const Instance& inst, const MasterDuals& duals, const BranchConstraints& bc,
                               int res) {
    const Box box = bounding_box(inst);
    double best = duals.gamma;
    Point x(2);
    for (int a = 0; a < res; ++a) {
        x[0] = box.lower[0] + (box.upper[0] - box.lower[0]) * a / (res - 1);
        for (int b = 0; b < res; ++b) {
            x[1] = box.lower[1] + (box.upper[1] - box.lower[1]) * b / (res - 1);
            const auto e = point_scores(inst, duals, x);
            double v = duals.gamma;
            if (bc.empty()) {
                for (double s : e) v += std::min(0.0, s);
            } else {
                v += brute_mwis(incompatibility_graph(bc, e));
            }
            best = std::min(best, v);
        }
    }
    return best;
}

}  // namespace fixtures
