#include "omfloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace omfloc {

NormSpec::NormSpec(Kind kind, int r, int s)
    : kind_(kind), r_(r), s_(s), tau_(static_cast<double>(r) / static_cast<double>(s)) {}

NormSpec NormSpec::ltau(int r, int s) {
    if (s < 1 || r <= s) {
        throw InvalidInput("l_tau norm requires r > s >= 1");
    }
    if (std::gcd(r, s) != 1) {
        throw InvalidInput("l_tau norm requires gcd(r, s) = 1");
    }
    return NormSpec(Kind::LTau, r, s);
}

std::string NormSpec::to_string() const {
    switch (kind_) {
        case Kind::L1:
            return "l1";
        case Kind::L2:
            return "l2";
        case Kind::LTau:
            return "ltau:" + std::to_string(r_) + "/" + std::to_string(s_);
    }
    return "?";
}

LambdaVector::LambdaVector(std::vector<double> weights, LambdaKind kind, std::size_t k, double alpha)
    : weights_(std::move(weights)), kind_(kind), k_(k), alpha_(alpha) {
    if (weights_.empty()) {
        throw InvalidInput("lambda vector must not be empty");
    }
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
            throw InvalidInput("lambda weights must be finite and nonnegative");
        }
        if (i > 0 && weights_[i] < weights_[i - 1]) {
            throw InvalidInput("lambda weights must be nondecreasing");
        }
    }
}

double LambdaVector::sum() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

char lambda_kind_letter(LambdaKind kind) {
    switch (kind) {
        case LambdaKind::W: return 'W';
        case LambdaKind::C: return 'C';
        case LambdaKind::K: return 'K';
        case LambdaKind::D: return 'D';
        case LambdaKind::S: return 'S';
        case LambdaKind::A: return 'A';
        case LambdaKind::Custom: return '@';
    }
    return '?';
}

LambdaVector make_lambda(LambdaKind kind, std::size_t n, std::size_t k, double alpha) {
    if (n == 0) {
        throw InvalidInput("lambda length must be positive");
    }
    const bool needs_k = kind == LambdaKind::K || kind == LambdaKind::S;
    const bool needs_alpha = kind == LambdaKind::D || kind == LambdaKind::S;
    if (needs_k && (k < 1 || k > n)) {
        throw InvalidInput("k must satisfy 1 <= k <= n");
    }
    if (needs_alpha && !(alpha >= 0.0 && alpha <= 1.0)) {
        throw InvalidInput("alpha must lie in [0, 1]");
    }
    std::vector<double> w(n, 0.0);
    switch (kind) {
        case LambdaKind::W:
            std::fill(w.begin(), w.end(), 1.0);
            break;
        case LambdaKind::C:
            w.back() = 1.0;
            break;
        case LambdaKind::K:
            std::fill(w.end() - static_cast<std::ptrdiff_t>(k), w.end(), 1.0);
            break;
        case LambdaKind::D:
            std::fill(w.begin(), w.end(), alpha);
            w.back() = 1.0;
            break;
        case LambdaKind::S:
            std::fill(w.begin(), w.end(), alpha);
            std::fill(w.end() - static_cast<std::ptrdiff_t>(k), w.end(), 1.0);
            break;
        case LambdaKind::A:
            if (n == 1) {
                w[0] = 1.0;
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    w[i] = static_cast<double>(i) / static_cast<double>(n - 1);
                }
            }
            break;
        case LambdaKind::Custom:
            throw InvalidInput("custom lambda vectors are built from explicit weights");
    }
    return LambdaVector(std::move(w), kind, needs_k ? k : 0, needs_alpha ? alpha : 0.0);
}

Instance::Instance(std::vector<Point> points, std::size_t p, NormSpec norm, LambdaVector lambda)
    : n_(points.size()), d_(points.empty() ? 0 : points.front().size()), p_(p),
      norm_(norm), lambda_(std::move(lambda)) {
    if (n_ == 0) {
        throw InvalidInput("instance needs at least one demand point");
    }
    if (d_ == 0) {
        throw InvalidInput("dimension must be positive");
    }
    if (p_ == 0) {
        throw InvalidInput("facility count p must be positive");
    }
    if (lambda_.size() != n_) {
        throw InvalidInput("lambda length must equal the number of demand points");
    }
    coords_.reserve(n_ * d_);
    for (const auto& pt : points) {
        if (pt.size() != d_) {
            throw InvalidInput("all demand points must share the same dimension");
        }
        for (double v : pt) {
            if (!std::isfinite(v)) {
                throw InvalidInput("coordinates must be finite");
            }
        }
        coords_.insert(coords_.end(), pt.begin(), pt.end());
    }
}

std::vector<Point> Instance::points() const {
    std::vector<Point> out;
    out.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        auto v = point(i);
        out.emplace_back(v.begin(), v.end());
    }
    return out;
}

Instance Instance::with_lambda(LambdaVector lambda) const {
    return Instance(points(), p_, norm_, std::move(lambda));
}

Instance Instance::with_p(std::size_t p) const { return Instance(points(), p, norm_, lambda_); }

double norm_distance(PointView a, PointView x, const NormSpec& norm) {
    const std::size_t d = a.size();
    switch (norm.kind()) {
        case NormSpec::Kind::L1: {
            double s = 0.0;
            for (std::size_t l = 0; l < d; ++l) s += std::abs(a[l] - x[l]);
            return s;
        }
        case NormSpec::Kind::L2: {
            double s = 0.0;
            for (std::size_t l = 0; l < d; ++l) {
                const double t = a[l] - x[l];
                s += t * t;
            }
            return std::sqrt(s);
        }
        case NormSpec::Kind::LTau: {
            // Scale by the largest component so the power sum cannot overflow.
            double m = 0.0;
            for (std::size_t l = 0; l < d; ++l) m = std::max(m, std::abs(a[l] - x[l]));
            if (m == 0.0) return 0.0;
            const double tau = norm.tau();
            double s = 0.0;
            for (std::size_t l = 0; l < d; ++l) s += std::pow(std::abs(a[l] - x[l]) / m, tau);
            return m * std::pow(s, 1.0 / tau);
        }
    }
    return 0.0;
}

double distance(PointView a, PointView x, const NormSpec& norm) {
    if (a.size() != x.size()) {
        throw InvalidInput("distance: dimension mismatch");
    }
    return norm_distance(a, x, norm);
}

Box bounding_box(const Instance& instance) {
    Box box{Point(instance.point(0).begin(), instance.point(0).end()),
            Point(instance.point(0).begin(), instance.point(0).end())};
    for (std::size_t i = 1; i < instance.n(); ++i) {
        auto a = instance.point(i);
        for (std::size_t l = 0; l < instance.d(); ++l) {
            box.lower[l] = std::min(box.lower[l], a[l]);
            box.upper[l] = std::max(box.upper[l], a[l]);
        }
    }
    return box;
}

double big_m(const Instance& instance) {
    double m = 0.0;
    for (std::size_t i = 0; i < instance.n(); ++i) {
        for (std::size_t k = i + 1; k < instance.n(); ++k) {
            m = std::max(m, norm_distance(instance.point(i), instance.point(k), instance.norm()));
        }
    }
    return m * (1.0 + kBigMSlack);
}

}  // namespace omfloc
