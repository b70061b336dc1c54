#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace locmin {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Bad arguments or a violated precondition.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A model or objective produced something it should not (NaN, wrong size).
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bootstrap variance is zero, so a standardized statistic does not exist.
struct DegenerateVariance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Relaxation discovery met no spurious minimum to learn from.
struct EmptyCollection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-coordinate closed intervals; infinite ends mean unbounded.
struct Bounds {
  Vector lower;
  Vector upper;

  static Bounds unbounded(Index p) {
    return {Vector::Constant(p, -kInf), Vector::Constant(p, kInf)};
  }

  static Bounds box(Vector lo, Vector hi) {
    if (lo.size() != hi.size()) throw InvalidInput("bounds: size mismatch");
    for (Index i = 0; i < lo.size(); ++i) {
      if (!(lo[i] <= hi[i])) throw InvalidInput("bounds: lower > upper");
    }
    return {std::move(lo), std::move(hi)};
  }

  Index size() const { return lower.size(); }

  bool contains(const Vector& x) const {
    if (x.size() != size()) return false;
    for (Index i = 0; i < x.size(); ++i) {
      if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
    }
    return true;
  }

  Vector project(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }

  // Bounds of (a, b) given bounds of a and b.
  static Bounds concat(const Bounds& a, const Bounds& b) {
    Bounds out{Vector(a.size() + b.size()), Vector(a.size() + b.size())};
    out.lower << a.lower, b.lower;
    out.upper << a.upper, b.upper;
    return out;
  }
};

// A parameter vector, optionally carrying the box it must live in.
class ParamPoint {
 public:
  ParamPoint() = default;

  explicit ParamPoint(Vector values, std::optional<Bounds> bounds = std::nullopt)
      : values_(std::move(values)), bounds_(std::move(bounds)) {
    if (values_.size() < 1) throw InvalidInput("ParamPoint: p must be >= 1");
    if (bounds_ && !bounds_->contains(values_)) {
      throw InvalidInput("ParamPoint: value outside its bounds");
    }
  }

  static ParamPoint scalar(double v) { return ParamPoint(Vector::Constant(1, v)); }

  const Vector& values() const { return values_; }
  const std::optional<Bounds>& bounds() const { return bounds_; }
  Index size() const { return values_.size(); }
  double operator[](Index i) const { return values_[i]; }

 private:
  Vector values_;
  std::optional<Bounds> bounds_;
};

// m x n matrix whose columns are i.i.d. observations.
class Dataset {
 public:
  explicit Dataset(Matrix samples) : samples_(std::move(samples)) {
    if (samples_.rows() < 1 || samples_.cols() < 1) {
      throw InvalidInput("Dataset: need m >= 1 and n >= 1");
    }
    if (!samples_.allFinite()) throw InvalidInput("Dataset: non-finite entry");
  }

  static Dataset single(const Vector& column) { return Dataset(Matrix(column)); }

  Index dim() const { return samples_.rows(); }
  Index size() const { return samples_.cols(); }
  const Matrix& samples() const { return samples_; }
  auto column(Index k) const { return samples_.col(k); }

 private:
  Matrix samples_;
};

}  // namespace locmin
