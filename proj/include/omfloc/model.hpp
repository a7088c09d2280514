#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace omfloc {

/// Raised for malformed instances, flags, or arguments that violate a precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Point = std::vector<double>;
using PointView = std::span<const double>;

/// l1, l2, or l_{r/s} with r > s >= 1 coprime.
class NormSpec {
public:
    enum class Kind { L1, L2, LTau };

    static NormSpec l1() { return NormSpec(Kind::L1, 1, 1); }
    static NormSpec l2() { return NormSpec(Kind::L2, 2, 1); }
    static NormSpec ltau(int r, int s);

    Kind kind() const { return kind_; }
    int numerator() const { return r_; }
    int denominator() const { return s_; }
    double tau() const { return tau_; }
    std::string to_string() const;

    bool operator==(const NormSpec& other) const {
        return kind_ == other.kind_ && r_ == other.r_ && s_ == other.s_;
    }

private:
    NormSpec(Kind kind, int r, int s);

    Kind kind_;
    int r_;
    int s_;
    double tau_;
};

enum class LambdaKind { W, C, K, D, S, A, Custom };

/// Nonnegative, nondecreasing ordered-median weights.
class LambdaVector {
public:
    explicit LambdaVector(std::vector<double> weights, LambdaKind kind = LambdaKind::Custom,
                          std::size_t k = 0, double alpha = 0.0);

    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    double sum() const;

    LambdaKind kind() const { return kind_; }
    /// Parameters used by make_lambda; meaningful only for K/S (k) and D/S (alpha).
    std::size_t k() const { return k_; }
    double alpha() const { return alpha_; }

private:
    std::vector<double> weights_;
    LambdaKind kind_;
    std::size_t k_;
    double alpha_;
};

char lambda_kind_letter(LambdaKind kind);

/// Builds the standard weight vectors: W, C, K, D, S, A.
LambdaVector make_lambda(LambdaKind kind, std::size_t n, std::size_t k = 0, double alpha = 0.0);

/// Demand points, facility count, norm and ordered-median weights.
class Instance {
public:
    Instance(std::vector<Point> points, std::size_t p, NormSpec norm, LambdaVector lambda);

    std::size_t n() const { return n_; }
    std::size_t d() const { return d_; }
    std::size_t p() const { return p_; }
    const NormSpec& norm() const { return norm_; }
    const LambdaVector& lambda() const { return lambda_; }

    PointView point(std::size_t i) const { return {coords_.data() + i * d_, d_}; }
    const std::vector<double>& coordinates() const { return coords_; }
    std::vector<Point> points() const;

    Instance with_lambda(LambdaVector lambda) const;
    Instance with_p(std::size_t p) const;

private:
    std::size_t n_;
    std::size_t d_;
    std::size_t p_;
    std::vector<double> coords_;
    NormSpec norm_;
    LambdaVector lambda_;
};

struct Solution {
    std::vector<Point> facilities;
    /// Demand index -> facility index.
    std::vector<int> assignment;
    double objective = 0.0;
};

struct Box {
    Point lower;
    Point upper;
};

/// Norm of a - x without dimension checks; callers guarantee equal lengths.
double norm_distance(PointView a, PointView x, const NormSpec& norm);

double distance(PointView a, PointView x, const NormSpec& norm);

Box bounding_box(const Instance& instance);

/// Multiplicative slack that turns the strict big-M inequality into a value.
inline constexpr double kBigMSlack = 1e-6;

double big_m(const Instance& instance);

}  // namespace omfloc
