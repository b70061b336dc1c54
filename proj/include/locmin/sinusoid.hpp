#pragma once

// Sinusoid frequency estimation in white Gaussian noise: mu(theta) = sin(theta x)
// on x = [0, 1, ..., 99] / 99, theta in [0, 4 pi]. The likelihood has many
// local minima over the domain, which makes it the running benchmark.

#include "locmin/embedding.hpp"
#include "locmin/model.hpp"
#include "locmin/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

namespace locmin {

inline constexpr Index kSinusoidSamples = 100;
inline constexpr double kSinusoidThetaMax = 4.0 * std::numbers::pi;
inline constexpr double kSinusoidTheta0 = 3.0 * std::numbers::pi;

inline Vector sinusoid_grid() {
  Vector x(kSinusoidSamples);
  for (Index i = 0; i < kSinusoidSamples; ++i) {
    x[i] = static_cast<double>(i) / static_cast<double>(kSinusoidSamples - 1);
  }
  return x;
}

// count points over [0, 4 pi]: both endpoints exactly, or cell midpoints.
inline std::vector<double> theta_grid(Index count, bool midpoints = false) {
  if (count < 1 || (!midpoints && count < 2)) throw InvalidInput("theta_grid: too few points");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    const double frac = midpoints ? (static_cast<double>(i) + 0.5) / static_cast<double>(count)
                                  : static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(i + 1 == count && !midpoints ? kSinusoidThetaMax
                                               : std::min(kSinusoidThetaMax, frac * kSinusoidThetaMax));
  }
  return out;
}

inline void check_sinusoid_theta(double theta) {
  if (!(theta >= 0.0 && theta <= kSinusoidThetaMax)) {
    throw InvalidInput("sinusoid: theta outside [0, 4 pi]");
  }
}

inline Vector sinusoid_mean(double theta) {
  check_sinusoid_theta(theta);
  return (theta * sinusoid_grid()).array().sin().matrix();
}

class SinusoidMean {
 public:
  SinusoidMean() : x_(sinusoid_grid()) {}

  Index output_dim() const { return x_.size(); }
  Index param_dim() const { return 1; }
  const Vector& grid() const { return x_; }

  Vector value(const Vector& t) const {
    check_sinusoid_theta(t[0]);
    return (t[0] * x_).array().sin().matrix();
  }
  Matrix jacobian(const Vector& t) const {
    check_sinusoid_theta(t[0]);
    return (x_.array() * (t[0] * x_).array().cos()).matrix();
  }
  Bounds domain() const {
    return {Vector::Constant(1, 0.0), Vector::Constant(1, kSinusoidThetaMax)};
  }

 private:
  Vector x_;
};

using SinusoidModel = GaussianLocationModel<SinusoidMean>;

inline SinusoidModel make_sinusoid_model(double sigma) { return {SinusoidMean{}, sigma}; }

// sin(t0 x + t1 x^2 + ... + tk x^(k+1)): lets the instantaneous frequency vary
// along the record. Extra coordinates are unbounded.
class NaivePolyEmbedding {
 public:
  explicit NaivePolyEmbedding(int k) : k_(k), x_(sinusoid_grid()) {
    if (k < 0) throw InvalidInput("naive-poly relaxation: k must be >= 0");
  }

  SinusoidMean base() const { return {}; }
  Index base_dim() const { return 1; }
  Index extra_dim() const { return k_; }
  Index param_dim() const { return 1 + k_; }
  Index output_dim() const { return x_.size(); }

  Vector value(const Vector& t) const { return phase(t).array().sin().matrix(); }
  Matrix jacobian(const Vector& t) const {
    const Eigen::ArrayXd c = phase(t).array().cos();
    Matrix jac(x_.size(), 1 + k_);
    Eigen::ArrayXd pw = x_.array();
    for (int j = 0; j <= k_; ++j) {
      jac.col(j) = (pw * c).matrix();
      pw *= x_.array();
    }
    return jac;
  }
  Bounds domain() const {
    Bounds b = Bounds::unbounded(1 + k_);
    b.lower[0] = 0.0;
    b.upper[0] = kSinusoidThetaMax;
    return b;
  }

 private:
  Vector phase(const Vector& t) const {
    check_sinusoid_theta(t[0]);
    Eigen::ArrayXd ph = t[0] * x_.array();
    Eigen::ArrayXd pw = x_.array().square();
    for (int j = 1; j <= k_; ++j) {
      ph += t[j] * pw;
      pw *= x_.array();
    }
    return ph.matrix();
  }

  int k_;
  Vector x_;
};

// sin(theta x) + R c with orthonormal directions R (e.g. learned from data).
// A single direction is normalized; several are orthonormalized in order.
class LearnedDirectionEmbedding {
 public:
  explicit LearnedDirectionEmbedding(const Vector& r) : LearnedDirectionEmbedding(Matrix(r)) {}
  explicit LearnedDirectionEmbedding(Matrix r) : x_(sinusoid_grid()), r_(std::move(r)) {
    if (r_.rows() != x_.size() || r_.cols() < 1) {
      throw InvalidInput("learned directions must have 100 entries each");
    }
    if (!r_.allFinite()) throw InvalidInput("learned direction is not finite");
    for (Index j = 0; j < r_.cols(); ++j) {
      for (Index i = 0; i < j; ++i) r_.col(j) -= r_.col(i).dot(r_.col(j)) * r_.col(i);
      const double nrm = r_.col(j).norm();
      if (!(nrm > 1e-12)) throw InvalidInput("learned directions are zero or linearly dependent");
      r_.col(j) /= nrm;
    }
  }

  Vector direction() const { return r_.col(0); }
  const Matrix& directions() const { return r_; }
  SinusoidMean base() const { return {}; }
  Index base_dim() const { return 1; }
  Index extra_dim() const { return r_.cols(); }
  Index param_dim() const { return 1 + r_.cols(); }
  Index output_dim() const { return x_.size(); }

  Vector value(const Vector& t) const {
    check_sinusoid_theta(t[0]);
    return (t[0] * x_).array().sin().matrix() + r_ * t.tail(r_.cols());
  }
  Matrix jacobian(const Vector& t) const {
    check_sinusoid_theta(t[0]);
    Matrix jac(x_.size(), param_dim());
    jac.col(0) = (x_.array() * (t[0] * x_).array().cos()).matrix();
    jac.rightCols(r_.cols()) = r_;
    return jac;
  }
  Bounds domain() const {
    Bounds b = Bounds::unbounded(param_dim());
    b.lower[0] = 0.0;
    b.upper[0] = kSinusoidThetaMax;
    return b;
  }

 private:
  Vector x_;
  Matrix r_;
};

struct NaivePoly {
  int k = 1;
};
struct LearnedDirection {
  Matrix r;  // one direction per column
};
using RelaxationSpec = std::variant<NaivePoly, LearnedDirection>;

inline AnyEmbedding make_embedding(const RelaxationSpec& spec) {
  return std::visit(
      [](const auto& s) -> AnyEmbedding {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NaivePoly>) {
          return NaivePolyEmbedding(s.k);
        } else {
          return LearnedDirectionEmbedding(s.r);
        }
      },
      spec);
}

struct ProfileRow {
  double theta;
  double negloglik;
};

// -l on a uniform grid of `resolution` points over [0, 4 pi].
template <MeanFunction F>
std::vector<ProfileRow> negloglik_profile(const GaussianLocationModel<F>& model,
                                          const Dataset& data, Index resolution) {
  if (resolution < 2) throw InvalidInput("negloglik_profile: resolution must be >= 2");
  if (model.param_dim() != 1) throw InvalidInput("negloglik_profile: scalar models only");
  const Bounds dom = model.domain();
  std::vector<ProfileRow> rows;
  rows.reserve(static_cast<std::size_t>(resolution));
  for (Index i = 0; i < resolution; ++i) {
    // endpoints hit exactly
    const double theta = i + 1 == resolution
                             ? dom.upper[0]
                             : dom.lower[0] + (dom.upper[0] - dom.lower[0]) *
                                                  static_cast<double>(i) /
                                                  static_cast<double>(resolution - 1);
    rows.push_back({theta, -model.log_likelihood(data, Vector::Constant(1, theta))});
  }
  return rows;
}

// Every discrete local minimum of the profile (including the endpoints),
// refined by bounded descent and deduplicated within `tol`. Sorted by theta.
template <MeanFunction F>
std::vector<ProfileRow> enumerate_local_minima(const GaussianLocationModel<F>& model,
                                               const Dataset& data, Index resolution = 4001,
                                               double tol = 1e-4,
                                               const OptimizerOptions& opt = {}) {
  const auto prof = negloglik_profile(model, data, resolution);
  const std::size_t n = prof.size();
  std::vector<ProfileRow> found;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || prof[i].negloglik <= prof[i - 1].negloglik;
    const bool right_ok = i + 1 == n || prof[i].negloglik <= prof[i + 1].negloglik;
    if (!(left_ok && right_ok)) continue;
    const auto fit = minimize_negloglik(model, data, Vector::Constant(1, prof[i].theta), opt);
    found.push_back({fit.minimizer[0], fit.objective_value});
  }
  std::sort(found.begin(), found.end(),
            [](const ProfileRow& a, const ProfileRow& b) { return a.theta < b.theta; });
  std::vector<ProfileRow> unique;
  for (const auto& row : found) {
    if (!unique.empty() && row.theta - unique.back().theta <= tol) {
      if (row.negloglik < unique.back().negloglik) unique.back() = row;
      continue;
    }
    unique.push_back(row);
  }
  return unique;
}

inline ProfileRow global_minimum(const std::vector<ProfileRow>& minima) {
  if (minima.empty()) throw InvalidInput("global_minimum: empty list");
  return *std::min_element(minima.begin(), minima.end(),
                           [](const ProfileRow& a, const ProfileRow& b) {
                             return a.negloglik < b.negloglik;
                           });
}

}  // namespace locmin
