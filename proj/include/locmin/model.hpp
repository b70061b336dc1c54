#pragma once

// Statistical-model abstraction and the isotropic Gaussian location family.
//
// Scale convention: log_likelihood() and score() are totals over the n
// columns of a Dataset (divide by n for the per-sample average). fisher()
// is the information of a single column; total_fisher() multiplies by n.

#include "locmin/rng.hpp"
#include "locmin/types.hpp"

#include <cmath>
#include <concepts>
#include <memory>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>

namespace locmin {

// theta -> mu(theta) in R^m, with its m x p Jacobian and parameter domain.
template <class F>
concept MeanFunction = requires(const F& f, const Vector& theta) {
  { f.output_dim() } -> std::convertible_to<Index>;
  { f.param_dim() } -> std::convertible_to<Index>;
  { f.value(theta) } -> std::convertible_to<Vector>;
  { f.jacobian(theta) } -> std::convertible_to<Matrix>;
  { f.domain() } -> std::convertible_to<Bounds>;
};

// Optional fast path for J^T v when the Jacobian is large and structured.
template <class F>
concept HasJacobianTransposeProduct = requires(const F& f, const Vector& theta, const Vector& v) {
  { f.jacobian_transpose_times(theta, v) } -> std::convertible_to<Vector>;
};

template <class M>
concept StatisticalModel =
    requires(const M& model, const Vector& theta, const Dataset& data, RandomStream& rng) {
      { model.param_dim() } -> std::convertible_to<Index>;
      { model.data_dim() } -> std::convertible_to<Index>;
      { model.domain() } -> std::convertible_to<Bounds>;
      { model.mean(theta) } -> std::convertible_to<Vector>;
      { model.sample(theta, Index{1}, rng) } -> std::same_as<Dataset>;
      { model.log_likelihood(data, theta) } -> std::convertible_to<double>;
      { model.score(data, theta) } -> std::convertible_to<Vector>;
      { model.fisher(theta) } -> std::convertible_to<Matrix>;
    };

// Type-erased MeanFunction, for choosing a forward model at run time.
class AnyMean {
 public:
  template <MeanFunction F>
    requires(!std::same_as<std::remove_cvref_t<F>, AnyMean>)
  AnyMean(F f)  // NOLINT(google-explicit-constructor)
      : self_(std::make_shared<const Model<std::remove_cvref_t<F>>>(std::move(f))) {}

  Index output_dim() const { return self_->output_dim(); }
  Index param_dim() const { return self_->param_dim(); }
  Vector value(const Vector& theta) const { return self_->value(theta); }
  Matrix jacobian(const Vector& theta) const { return self_->jacobian(theta); }
  Bounds domain() const { return self_->domain(); }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual Index output_dim() const = 0;
    virtual Index param_dim() const = 0;
    virtual Vector value(const Vector&) const = 0;
    virtual Matrix jacobian(const Vector&) const = 0;
    virtual Bounds domain() const = 0;
  };
  template <class F>
  struct Model final : Concept {
    explicit Model(F f) : fn(std::move(f)) {}
    Index output_dim() const override { return fn.output_dim(); }
    Index param_dim() const override { return fn.param_dim(); }
    Vector value(const Vector& t) const override { return fn.value(t); }
    Matrix jacobian(const Vector& t) const override { return fn.jacobian(t); }
    Bounds domain() const override { return fn.domain(); }
    F fn;
  };

  std::shared_ptr<const Concept> self_;
};

// d = mu(theta) + eps, eps ~ N(0, sigma^2 I). Every member of this family is a
// generalized location family: f(d; theta) = f(d - mu(theta)).
template <MeanFunction F>
class GaussianLocationModel {
 public:
  GaussianLocationModel(F mean_fn, double sigma) : mean_fn_(std::move(mean_fn)), sigma_(sigma) {
    if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
      throw InvalidInput("GaussianLocationModel: sigma must be positive and finite");
    }
  }

  const F& mean_function() const { return mean_fn_; }
  double sigma() const { return sigma_; }
  Index param_dim() const { return mean_fn_.param_dim(); }
  Index data_dim() const { return mean_fn_.output_dim(); }
  Bounds domain() const { return mean_fn_.domain(); }

  Vector mean(const Vector& theta) const {
    check_theta(theta);
    Vector mu = mean_fn_.value(theta);
    if (mu.size() != data_dim()) throw EvaluationError("mean function returned wrong size");
    if (!mu.allFinite()) throw EvaluationError("mean function returned a non-finite value");
    return mu;
  }

  Matrix jacobian(const Vector& theta) const {
    check_theta(theta);
    Matrix jac = mean_fn_.jacobian(theta);
    if (jac.rows() != data_dim() || jac.cols() != param_dim()) {
      throw EvaluationError("mean Jacobian has wrong shape");
    }
    if (!jac.allFinite()) throw EvaluationError("mean Jacobian is not finite");
    return jac;
  }

  Dataset sample(const Vector& theta, Index n, RandomStream& rng) const {
    if (n < 1) throw InvalidInput("sample: n must be >= 1");
    const Vector mu = mean(theta);
    Matrix d(data_dim(), n);
    for (Index k = 0; k < n; ++k) {
      for (Index i = 0; i < data_dim(); ++i) d(i, k) = mu[i] + sigma_ * rng.normal();
    }
    return Dataset(std::move(d));
  }

  // Total over columns: -sum_k |d_k - mu|^2 / (2 sigma^2) - n (m/2) ln(2 pi sigma^2).
  double log_likelihood(const Dataset& data, const Vector& theta) const {
    check_data(data);
    const Vector mu = mean(theta);
    const double rss = (data.samples().colwise() - mu).squaredNorm();
    return -0.5 * rss / (sigma_ * sigma_) -
           static_cast<double>(data.size()) * log_normalizer();
  }

  Vector score(const Dataset& data, const Vector& theta) const {
    check_data(data);
    const Vector mu = mean(theta);
    const Vector resid_sum =
        data.samples().rowwise().sum() - static_cast<double>(data.size()) * mu;
    if constexpr (HasJacobianTransposeProduct<F>) {
      check_theta(theta);
      Vector s = mean_fn_.jacobian_transpose_times(theta, resid_sum);
      if (s.size() != param_dim() || !s.allFinite()) {
        throw EvaluationError("mean Jacobian product is not finite");
      }
      return s / (sigma_ * sigma_);
    } else {
      return jacobian(theta).transpose() * resid_sum / (sigma_ * sigma_);
    }
  }

  // Single-column Fisher information J^T J / sigma^2.
  Matrix fisher(const Vector& theta) const {
    const Matrix jac = jacobian(theta);
    Matrix info = jac.transpose() * jac / (sigma_ * sigma_);
    return 0.5 * (info + info.transpose());
  }

  // (m/2) ln(2 pi sigma^2): the per-column constant in -log f.
  double log_normalizer() const {
    return 0.5 * static_cast<double>(data_dim()) *
           std::log(2.0 * std::numbers::pi * sigma_ * sigma_);
  }

 private:
  void check_theta(const Vector& theta) const {
    if (theta.size() != param_dim()) throw InvalidInput("theta has wrong dimension");
  }
  void check_data(const Dataset& data) const {
    if (data.dim() != data_dim()) {
      throw InvalidInput("data dimension " + std::to_string(data.dim()) +
                         " does not match model output dimension " +
                         std::to_string(data_dim()));
    }
  }

  F mean_fn_;
  double sigma_;
};

template <StatisticalModel M>
Matrix total_fisher(const M& model, const Vector& theta, Index n) {
  return static_cast<double>(n) * model.fisher(theta);
}

// lambda = |mu(theta_true) - mu(theta_eval)|^2 / sigma^2.
template <MeanFunction F>
double noncentrality(const GaussianLocationModel<F>& model, const Vector& theta_true,
                     const Vector& theta_eval) {
  const double s = model.sigma();
  return (model.mean(theta_true) - model.mean(theta_eval)).squaredNorm() / (s * s);
}

// E_{theta_true}[ l(D; theta_eval) ] for n columns: the log-likelihood is a
// shifted non-central chi-square with q = m degrees of freedom.
template <MeanFunction F>
double expected_loglik_gaussian(const Vector& theta_true, const Vector& theta_eval,
                                const GaussianLocationModel<F>& model, Index n = 1) {
  const double q = static_cast<double>(model.data_dim());
  const double lambda = noncentrality(model, theta_true, theta_eval);
  const double per_column = -0.5 * (q + lambda) - q * std::log(model.sigma()) -
                            0.5 * q * std::log(2.0 * std::numbers::pi);
  return static_cast<double>(n) * per_column;
}

// Var_{theta_true}[ l(D; theta_eval) ] = n (q + 2 lambda) / 2, from
// Var[chi2_q(lambda)] = 2 (q + 2 lambda).
template <MeanFunction F>
double loglik_variance_gaussian(const Vector& theta_true, const Vector& theta_eval,
                                const GaussianLocationModel<F>& model, Index n = 1) {
  const double q = static_cast<double>(model.data_dim());
  const double lambda = noncentrality(model, theta_true, theta_eval);
  return static_cast<double>(n) * 0.5 * (q + 2.0 * lambda);
}

// Linear forward model mu(theta) = H theta.
class LinearMean {
 public:
  explicit LinearMean(Matrix h) : h_(std::move(h)) {}
  LinearMean(Matrix h, Bounds domain) : h_(std::move(h)), domain_(std::move(domain)) {}

  Index output_dim() const { return h_.rows(); }
  Index param_dim() const { return h_.cols(); }
  Vector value(const Vector& theta) const { return h_ * theta; }
  Matrix jacobian(const Vector&) const { return h_; }
  Bounds domain() const { return domain_ ? *domain_ : Bounds::unbounded(h_.cols()); }

 private:
  Matrix h_;
  std::optional<Bounds> domain_;
};

}  // namespace locmin
