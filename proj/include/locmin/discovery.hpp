#pragma once

// Learning relaxation directions from the spurious minima a descent actually
// meets. For each (nominal truth, start) pair on noise-free data, descend to
// the restricted estimate; when it misses the truth, record the whitened
// relaxed-space score at the lifted estimate. The leading left singular
// vector of those columns is the single extra degree of freedom that best
// separates the spurious minima from the truths.

#include "locmin/embedding.hpp"
#include "locmin/model.hpp"
#include "locmin/optimizer.hpp"
#include "locmin/parallel.hpp"

#include <Eigen/SVD>

#include <optional>
#include <vector>

namespace locmin {

// Symmetric inverse square root of a PSD matrix. Eigenvalues at or below
// rel_floor * lambda_max are treated as zero (pseudo-inverse).
inline Matrix inverse_sqrt_psd(const Matrix& a, double rel_floor = 1e-10) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (a + a.transpose()));
  const Vector& lam = eig.eigenvalues();
  const double cutoff = rel_floor * std::max(lam.maxCoeff(), 0.0);
  Vector inv_sqrt(lam.size());
  for (Index i = 0; i < lam.size(); ++i) {
    inv_sqrt[i] = (lam[i] > cutoff && lam[i] > 0.0) ? 1.0 / std::sqrt(lam[i]) : 0.0;
  }
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

// Flip v so its largest-magnitude entry (first one, on ties) is positive.
inline void fix_sign(Vector& v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0.0) v = -v;
}

// I~(theta0)^(-1/2) s~(d, theta_hat) over relaxed coordinates [block_begin, end).
template <MeanFunction F>
Vector whitened_score(const GaussianLocationModel<F>& relaxed, const Vector& theta_tilde_0,
                      const Dataset& data, const Vector& theta_tilde_hat, Index block_begin = 0) {
  const Index q = relaxed.param_dim();
  if (block_begin < 0 || block_begin >= q) throw InvalidInput("whitened_score: bad block");
  const Index len = q - block_begin;
  const Matrix info = relaxed.fisher(theta_tilde_0).bottomRightCorner(len, len);
  const Vector s = relaxed.score(data, theta_tilde_hat).tail(len);
  return inverse_sqrt_psd(info) * s;
}

struct RelaxationDirection {
  Vector r;                // unit norm, largest-magnitude entry positive
  Vector singular_values;  // of the collected whitened-score matrix
  Index columns_used = 0;
};

template <Embedding E>
struct DiscoveryConfig {
  std::vector<ParamPoint> nominal_set;
  std::vector<ParamPoint> start_set;
  E relaxed_space;
  double mismatch_tol = 1e-3;
  bool start_at_truth = false;  // each nominal point descends from itself; start_set unused
};

namespace detail {

template <Embedding E>
RelaxationDirection discover_in_subspace(const DiscoveryConfig<E>& cfg, const Matrix& basis,
                                         double sigma, const OptimizerOptions& opt,
                                         unsigned threads) {
  if (cfg.nominal_set.empty() || (cfg.start_set.empty() && !cfg.start_at_truth)) {
    throw InvalidInput("discovery: nominal and start sets must be nonempty");
  }
  const DeflatedEmbedding<E> relaxed_mean(cfg.relaxed_space, basis);
  const GaussianLocationModel<SubspaceRestrictedMean<E>> restricted(relaxed_mean.base(), sigma);
  const GaussianLocationModel<DeflatedEmbedding<E>> relaxed(relaxed_mean, sigma);
  const Index p = cfg.relaxed_space.base_dim();
  const Index k = basis.cols();
  const Index extra = relaxed_mean.extra_dim();

  const std::size_t n_starts = cfg.start_at_truth ? 1 : cfg.start_set.size();
  const std::size_t pairs = cfg.nominal_set.size() * n_starts;
  std::vector<std::optional<Vector>> columns(pairs);

  // The Fisher block depends only on the truth, so whiten once per nominal point.
  parallel_for(cfg.nominal_set.size(), threads, [&](std::size_t i) {
    const ParamPoint& truth = cfg.nominal_set[i];
    if (truth.size() != p) throw InvalidInput("discovery: nominal point has wrong dimension");
    const Vector truth_r = lift(truth.values(), k);
    const Dataset noise_free = Dataset::single(restricted.mean(truth_r));
    std::optional<Matrix> whitener;
    for (std::size_t j = 0; j < n_starts; ++j) {
      const ParamPoint& start = cfg.start_at_truth ? truth : cfg.start_set[j];
      if (start.size() != p) throw InvalidInput("discovery: start point has wrong dimension");
      const auto fit = minimize_negloglik(restricted, noise_free, lift(start.values(), k), opt);
      const Vector& theta_hat = fit.minimizer.values();
      if ((theta_hat - truth_r).norm() <= cfg.mismatch_tol) continue;
      if (!whitener) {
        whitener = inverse_sqrt_psd(
            relaxed.fisher(lift(truth_r, extra)).bottomRightCorner(extra, extra));
      }
      const Vector s = relaxed.score(noise_free, lift(theta_hat, extra)).tail(extra);
      columns[i * n_starts + j] = *whitener * s;
    }
  });

  Index used = 0;
  for (const auto& c : columns) used += c ? 1 : 0;
  if (used == 0) {
    throw EmptyCollection("discovery: no spurious minima encountered; no direction derivable");
  }
  Matrix delta(extra, used);
  Index j = 0;
  for (const auto& c : columns) {
    if (c) delta.col(j++) = *c;
  }

  const Eigen::BDCSVD<Matrix> svd(delta, Eigen::ComputeThinU);
  RelaxationDirection out;
  out.r = svd.matrixU().col(0);
  // Keep later rounds exactly orthogonal to earlier directions.
  for (int pass = 0; pass < 2; ++pass) out.r -= basis * (basis.transpose() * out.r);
  out.r.normalize();
  fix_sign(out.r);
  out.singular_values = svd.singularValues();
  out.columns_used = used;
  return out;
}

}  // namespace detail

template <MeanFunction F, Embedding E>
RelaxationDirection discover_relaxation_direction(const DiscoveryConfig<E>& cfg,
                                                  const GaussianLocationModel<F>& model,
                                                  const OptimizerOptions& opt = {},
                                                  unsigned threads = 1) {
  const Matrix none(cfg.relaxed_space.extra_dim(), 0);
  return detail::discover_in_subspace(cfg, none, model.sigma(), opt, threads);
}

// Repeat discovery, each round moving the directions found so far into the
// restricted model and deflating them out of the relaxed space. Stops early
// (returning what it has) when a later round meets no spurious minimum.
template <MeanFunction F, Embedding E>
std::vector<RelaxationDirection> iterate_discovery(const DiscoveryConfig<E>& cfg,
                                                   const GaussianLocationModel<F>& model,
                                                   const OptimizerOptions& opt, int dims,
                                                   unsigned threads = 1) {
  if (dims < 1) throw InvalidInput("iterate_discovery: dims must be >= 1");
  std::vector<RelaxationDirection> out;
  Matrix basis(cfg.relaxed_space.extra_dim(), 0);
  for (int round = 0; round < dims; ++round) {
    RelaxationDirection dir;
    try {
      dir = detail::discover_in_subspace(cfg, basis, model.sigma(), opt, threads);
    } catch (const EmptyCollection&) {
      if (round == 0) throw;
      break;
    }
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = dir.r;
    out.push_back(std::move(dir));
  }
  return out;
}

}  // namespace locmin
