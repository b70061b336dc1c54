#pragma once

// Tests of H0: "theta_hat is the global optimum" against H1: "it is a
// spurious local optimum".
//
//   two-sided  ((l - m)^2 / v)        reject when above the chi2(1) quantile
//   one-sided  ((l - m) / sqrt(v))    reject when below the normal alpha-quantile
//   gap        ((g - m_g) / sqrt(v_g)) reject when above the normal (1-alpha)-quantile
//   Rao score  (s^T I^-1 s / p)       reject when above the chi2(p)/p quantile
//
// m and v are parametric-bootstrap moments at theta_hat. For location-family
// models a spurious optimum lowers E[l], so the one-sided test rejects on the
// low side; a relaxation helps a spurious optimum disproportionately, so the
// gap test rejects on the high side.

#include "locmin/embedding.hpp"
#include "locmin/model.hpp"
#include "locmin/optimizer.hpp"
#include "locmin/rng.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace locmin {

struct BootstrapMoments {
  double mean_hat = 0.0;
  double var_hat = 0.0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;     // key of the stream the replicates were drawn from
  std::vector<double> values; // replicate statistics, for empirical thresholds
};

enum class TestKind { rao, two_sided, one_sided, gap };
enum class Decision { accept_h0, reject_h0 };
enum class ThresholdMode { asymptotic, empirical };

inline std::string_view to_string(TestKind k) {
  switch (k) {
    case TestKind::rao: return "rao";
    case TestKind::two_sided: return "two-sided";
    case TestKind::one_sided: return "one-sided";
    case TestKind::gap: return "gap";
  }
  return "unknown";
}

inline std::string_view to_string(Decision d) {
  return d == Decision::reject_h0 ? "reject-H0" : "accept-H0";
}

struct TestReport {
  double statistic = 0.0;
  double threshold = 0.0;
  double alpha = 0.0;
  Decision decision = Decision::accept_h0;
  TestKind kind = TestKind::two_sided;
  std::optional<BootstrapMoments> moments;

  bool rejected() const { return decision == Decision::reject_h0; }
};

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
}

inline double chi2_quantile(double dof, double prob) {
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), prob);
}

inline double normal_quantile(double prob) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), prob);
}

// Sample mean and unbiased variance.
inline BootstrapMoments moments_from(std::vector<double> values, std::uint64_t seed = 0) {
  if (values.size() < 2) throw InvalidInput("bootstrap needs B >= 2 replicates");
  BootstrapMoments m;
  m.replicates = values.size();
  m.seed = seed;
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean_hat = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - m.mean_hat) * (v - m.mean_hat);
  m.var_hat = ss / static_cast<double>(values.size() - 1);
  m.values = std::move(values);
  return m;
}

// Empirical quantile (linear interpolation between order statistics).
inline double empirical_quantile(std::vector<double> v, double prob) {
  if (v.empty()) throw InvalidInput("empirical_quantile: no values");
  std::sort(v.begin(), v.end());
  const double pos = prob * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Replicate b is drawn from stream_for(b).
template <StatisticalModel M, class StreamFor>
  requires std::invocable<StreamFor&, std::size_t>
BootstrapMoments bootstrap_moments(const M& model, const Vector& theta_hat, std::size_t replicates,
                                   StreamFor&& stream_for, Index n = 1) {
  if (replicates < 2) throw InvalidInput("bootstrap_moments: B must be >= 2");
  std::vector<double> values(replicates);
  for (std::size_t b = 0; b < replicates; ++b) {
    RandomStream rng = stream_for(b);
    values[b] = model.log_likelihood(model.sample(theta_hat, n, rng), theta_hat);
  }
  return moments_from(std::move(values), stream_for(0).key());
}

template <StatisticalModel M>
BootstrapMoments bootstrap_moments(const M& model, const Vector& theta_hat, std::size_t replicates,
                                   const RandomStream& rng, Index n = 1) {
  auto m = bootstrap_moments(
      model, theta_hat, replicates, [&](std::size_t b) { return rng.child(b); }, n);
  m.seed = rng.key();
  return m;
}

inline void check_variance(const BootstrapMoments& m) {
  if (!(m.var_hat > 0.0)) throw DegenerateVariance("bootstrap variance is zero");
}

inline TestReport two_sided_test(double ell_obs, const BootstrapMoments& m, double alpha,
                                 ThresholdMode mode = ThresholdMode::asymptotic) {
  check_alpha(alpha);
  check_variance(m);
  TestReport r;
  r.kind = TestKind::two_sided;
  r.alpha = alpha;
  r.statistic = (ell_obs - m.mean_hat) * (ell_obs - m.mean_hat) / m.var_hat;
  if (mode == ThresholdMode::asymptotic) {
    r.threshold = chi2_quantile(1.0, 1.0 - alpha);
  } else {
    std::vector<double> stats;
    stats.reserve(m.values.size());
    for (double v : m.values) stats.push_back((v - m.mean_hat) * (v - m.mean_hat) / m.var_hat);
    r.threshold = empirical_quantile(std::move(stats), 1.0 - alpha);
  }
  r.decision = r.statistic > r.threshold ? Decision::reject_h0 : Decision::accept_h0;
  r.moments = m;
  return r;
}

inline TestReport one_sided_test(double ell_obs, const BootstrapMoments& m, double alpha,
                                 ThresholdMode mode = ThresholdMode::asymptotic) {
  check_alpha(alpha);
  check_variance(m);
  TestReport r;
  r.kind = TestKind::one_sided;
  r.alpha = alpha;
  const double sd = std::sqrt(m.var_hat);
  r.statistic = (ell_obs - m.mean_hat) / sd;
  if (mode == ThresholdMode::asymptotic) {
    r.threshold = normal_quantile(alpha);
  } else {
    std::vector<double> stats;
    stats.reserve(m.values.size());
    for (double v : m.values) stats.push_back((v - m.mean_hat) / sd);
    r.threshold = empirical_quantile(std::move(stats), alpha);
  }
  r.decision = r.statistic < r.threshold ? Decision::reject_h0 : Decision::accept_h0;
  r.moments = m;
  return r;
}

// Rao score statistic (1/p) s^T I^-1 s with total-data score and information.
template <StatisticalModel M>
TestReport rao_score_test(const M& model, const Dataset& data, const Vector& theta_hat,
                          double alpha) {
  check_alpha(alpha);
  const Vector s = model.score(data, theta_hat);
  const Matrix info = total_fisher(model, theta_hat, data.size());
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(info);
  const double largest = eig.eigenvalues().maxCoeff();
  const double smallest = eig.eigenvalues().minCoeff();
  if (!(largest > 0.0) || !(smallest > 1e-12 * largest)) {
    throw InvalidInput("rao_score_test: Fisher information is singular (eigenvalues " +
                       std::to_string(smallest) + " .. " + std::to_string(largest) + ")");
  }
  const double p = static_cast<double>(s.size());
  TestReport r;
  r.kind = TestKind::rao;
  r.alpha = alpha;
  r.statistic = s.dot(info.ldlt().solve(s)) / p;
  r.threshold = chi2_quantile(p, 1.0 - alpha) / p;
  r.decision = r.statistic > r.threshold ? Decision::reject_h0 : Decision::accept_h0;
  return r;
}

struct GapBootstrap {
  double gap = 0.0;            // observed g(d, theta_hat)
  BootstrapMoments moments;    // of the replicate gaps
  std::size_t dropped = 0;     // replicates whose optimizations failed
};

struct GapOptions {
  OptimizerOptions optimizer{};
  double max_drop_fraction = 0.10;
};

// Observed gap plus bootstrap moments of the gap at theta_hat. Each replicate
// is sampled at theta_hat, re-localized by descent from theta_hat, and relaxed.
template <MeanFunction F, Embedding E>
GapBootstrap gap_bootstrap(const GaussianLocationModel<F>& model,
                           const GaussianLocationModel<E>& relaxed, const Dataset& data,
                           const Vector& theta_hat, std::size_t replicates,
                           const RandomStream& rng, const GapOptions& opt = {}) {
  if (replicates < 2) throw InvalidInput("gap bootstrap: B must be >= 2");
  GapBootstrap out;
  out.gap = restricted_relaxed_minimize(relaxed, data, theta_hat, opt.optimizer).gap;

  std::vector<double> gaps;
  gaps.reserve(replicates);
  for (std::size_t b = 0; b < replicates; ++b) {
    RandomStream stream = rng.child(b);
    const Dataset rep = model.sample(theta_hat, data.size(), stream);
    const auto local = minimize_negloglik(model, rep, theta_hat, opt.optimizer);
    if (!local.converged()) {
      ++out.dropped;
      continue;
    }
    const auto fit =
        restricted_relaxed_minimize(relaxed, rep, local.minimizer.values(), opt.optimizer);
    if (!fit.result.converged()) {
      ++out.dropped;
      continue;
    }
    gaps.push_back(fit.gap);
  }
  if (static_cast<double>(out.dropped) > opt.max_drop_fraction * static_cast<double>(replicates)) {
    throw EvaluationError("gap bootstrap: " + std::to_string(out.dropped) + " of " +
                          std::to_string(replicates) + " replicates failed to optimize");
  }
  out.moments = moments_from(std::move(gaps), rng.key());
  return out;
}

inline TestReport gap_decision(const GapBootstrap& gb, double alpha,
                               ThresholdMode mode = ThresholdMode::asymptotic) {
  check_alpha(alpha);
  check_variance(gb.moments);
  TestReport r;
  r.kind = TestKind::gap;
  r.alpha = alpha;
  const double sd = std::sqrt(gb.moments.var_hat);
  r.statistic = (gb.gap - gb.moments.mean_hat) / sd;
  if (mode == ThresholdMode::asymptotic) {
    r.threshold = normal_quantile(1.0 - alpha);
  } else {
    std::vector<double> stats;
    stats.reserve(gb.moments.values.size());
    for (double v : gb.moments.values) stats.push_back((v - gb.moments.mean_hat) / sd);
    r.threshold = empirical_quantile(std::move(stats), 1.0 - alpha);
  }
  r.decision = r.statistic > r.threshold ? Decision::reject_h0 : Decision::accept_h0;
  r.moments = gb.moments;
  return r;
}

template <MeanFunction F, Embedding E>
TestReport gap_test(const GaussianLocationModel<F>& model, const GaussianLocationModel<E>& relaxed,
                    const Dataset& data, const Vector& theta_hat, std::size_t replicates,
                    double alpha, const RandomStream& rng, const GapOptions& opt = {},
                    ThresholdMode mode = ThresholdMode::asymptotic) {
  check_alpha(alpha);
  return gap_decision(gap_bootstrap(model, relaxed, data, theta_hat, replicates, rng, opt), alpha,
                      mode);
}

}  // namespace locmin
