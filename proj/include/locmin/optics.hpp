#pragma once

// Pupil-plane wavefront model. Phase screens are sums of Noll-normalized
// Zernike modes (coefficients in waves RMS); PSFs are squared magnitudes of
// the zero-padded inverse DFT of A exp(j Psi), normalized to unit sum.
//
// DFT convention: forward unscaled, inverse scaled by 1/M^2 on an M x M grid,
// so sum |IDFT(X)|^2 = sum |X|^2 / M^2.

#include "locmin/rng.hpp"
#include "locmin/types.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

namespace locmin {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

inline constexpr int kDefocusNoll = 4;

// ---------------------------------------------------------------------------
// Zernike polynomials (Noll 1976 ordering and normalization)

struct NollMode {
  int n;  // radial order
  int m;  // signed azimuthal order: > 0 cosine, < 0 sine
};

inline NollMode noll_to_nm(int j) {
  if (j < 1) throw InvalidInput("Noll index must be >= 1");
  int n = 0;
  while ((n + 1) * (n + 2) / 2 < j) ++n;
  const int k = j - n * (n + 1) / 2 - 1;  // position within radial order n
  const int m_abs = (n % 2 == 0) ? 2 * ((k + 1) / 2) : 2 * (k / 2) + 1;
  if (m_abs == 0) return {n, 0};
  return {n, (j % 2 == 0) ? m_abs : -m_abs};
}

inline double zernike_radial(int n, int m_abs, double rho) {
  double sum = 0.0;
  for (int s = 0; s <= (n - m_abs) / 2; ++s) {
    const double num = std::tgamma(n - s + 1.0);
    const double den = std::tgamma(s + 1.0) * std::tgamma((n + m_abs) / 2.0 - s + 1.0) *
                       std::tgamma((n - m_abs) / 2.0 - s + 1.0);
    sum += ((s % 2) ? -1.0 : 1.0) * num / den * std::pow(rho, n - 2 * s);
  }
  return sum;
}

// Unit-RMS Zernike mode j over the unit disk.
inline double zernike(int j, double rho, double phi) {
  const NollMode nm = noll_to_nm(j);
  const int m_abs = std::abs(nm.m);
  const double r = zernike_radial(nm.n, m_abs, rho);
  if (nm.m == 0) return std::sqrt(nm.n + 1.0) * r;
  const double ang = nm.m > 0 ? std::cos(m_abs * phi) : std::sin(m_abs * phi);
  return std::sqrt(2.0 * (nm.n + 1.0)) * r * ang;
}

// Coefficients on consecutive Noll modes first_noll, first_noll + 1, ...
struct ZernikeCoeffs {
  Vector coeffs;
  int first_noll = kDefocusNoll;

  static ZernikeCoeffs zeros(Index k, int first = kDefocusNoll) {
    return {Vector::Zero(k), first};
  }
  Index size() const { return coeffs.size(); }
  double rms() const { return coeffs.norm(); }
};

// ---------------------------------------------------------------------------
// Pupil sampling

struct PupilGrid {
  Index size = 0;                                         // N
  Matrix aperture;                                        // A, N x N, in [0, 1]
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> support;  // A_B
  double oversampling = 2.0;
  Matrix rho;  // polar coordinates of pixel centers, unit disk inscribed
  Matrix phi;

  Index padded() const { return static_cast<Index>(std::lround(size * oversampling)); }
};

inline PupilGrid make_pupil(Matrix aperture, double oversampling = 2.0) {
  const Index n = aperture.rows();
  if (n < 2 || aperture.cols() != n) throw InvalidInput("pupil: aperture must be square, N >= 2");
  if (!(oversampling >= 2.0)) throw InvalidInput("pupil: oversampling must be >= 2");
  if ((aperture.array() < 0.0).any() || (aperture.array() > 1.0).any()) {
    throw InvalidInput("pupil: aperture values must lie in [0, 1]");
  }
  PupilGrid g;
  g.size = n;
  g.oversampling = oversampling;
  g.support = (aperture.array() > 0.0);
  g.aperture = std::move(aperture);
  g.rho.resize(n, n);
  g.phi.resize(n, n);
  const double half = 0.5 * static_cast<double>(n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      const double x = (static_cast<double>(c) + 0.5 - half) / half;
      const double y = (static_cast<double>(r) + 0.5 - half) / half;
      g.rho(r, c) = std::hypot(x, y);
      g.phi(r, c) = std::atan2(y, x);
    }
  }
  return g;
}

inline PupilGrid circular_pupil(Index n, double oversampling = 2.0) {
  Matrix a = Matrix::Zero(n, n);
  const double half = 0.5 * static_cast<double>(n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      const double x = (static_cast<double>(c) + 0.5 - half) / half;
      const double y = (static_cast<double>(r) + 0.5 - half) / half;
      if (x * x + y * y <= 1.0) a(r, c) = 1.0;
    }
  }
  PupilGrid g = make_pupil(std::move(a), oversampling);
  // Unit radius = the disk with the sampled area; the inscribed radius biases
  // radial modes by ~1/N at the pixelated edge.
  const double r_eq = std::sqrt(g.aperture.sum() / std::numbers::pi) / (0.5 * static_cast<double>(n));
  g.rho /= r_eq;
  return g;
}

// Phase in radians: 2 pi * sum_j c_j Z_j over the aperture support, 0 elsewhere.
inline Matrix zernike_phase(const ZernikeCoeffs& beta, const PupilGrid& grid) {
  if (beta.size() < 1) throw InvalidInput("zernike_phase: need K >= 1 coefficients");
  Matrix phase = Matrix::Zero(grid.size, grid.size);
  for (Index r = 0; r < grid.size; ++r) {
    for (Index c = 0; c < grid.size; ++c) {
      if (!grid.support(r, c)) continue;
      double v = 0.0;
      for (Index k = 0; k < beta.size(); ++k) {
        if (beta.coeffs[k] == 0.0) continue;
        v += beta.coeffs[k] *
             zernike(beta.first_noll + static_cast<int>(k), grid.rho(r, c), grid.phi(r, c));
      }
      phase(r, c) = 2.0 * std::numbers::pi * v;
    }
  }
  return phase;
}

// RMS (radians) of a phase screen over the aperture support.
inline double phase_rms(const Matrix& phase, const PupilGrid& grid) {
  double ss = 0.0;
  Index count = 0;
  for (Index r = 0; r < grid.size; ++r) {
    for (Index c = 0; c < grid.size; ++c) {
      if (!grid.support(r, c)) continue;
      ss += phase(r, c) * phase(r, c);
      ++count;
    }
  }
  return std::sqrt(ss / static_cast<double>(count));
}

// ---------------------------------------------------------------------------
// DFT helpers

inline CMatrix fft2(const CMatrix& in, bool inverse) {
  Eigen::FFT<double> fft;
  CMatrix tmp(in.rows(), in.cols());
  std::vector<Complex> src;
  std::vector<Complex> dst;
  src.resize(static_cast<std::size_t>(in.cols()));
  for (Index r = 0; r < in.rows(); ++r) {
    for (Index c = 0; c < in.cols(); ++c) src[static_cast<std::size_t>(c)] = in(r, c);
    inverse ? fft.inv(dst, src) : fft.fwd(dst, src);
    for (Index c = 0; c < in.cols(); ++c) tmp(r, c) = dst[static_cast<std::size_t>(c)];
  }
  CMatrix out(in.rows(), in.cols());
  src.resize(static_cast<std::size_t>(in.rows()));
  for (Index c = 0; c < in.cols(); ++c) {
    for (Index r = 0; r < in.rows(); ++r) src[static_cast<std::size_t>(r)] = tmp(r, c);
    inverse ? fft.inv(dst, src) : fft.fwd(dst, src);
    for (Index r = 0; r < in.rows(); ++r) out(r, c) = dst[static_cast<std::size_t>(r)];
  }
  return out;
}

// Move the zero-frequency sample to (M/2, M/2).
template <class Derived>
auto fftshift(const Eigen::MatrixBase<Derived>& in) {
  using Plain = typename Derived::PlainObject;
  const Index rows = in.rows();
  const Index cols = in.cols();
  Plain out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) out((r + rows / 2) % rows, (c + cols / 2) % cols) = in(r, c);
  }
  return out;
}

// A e^{j phase} embedded in the top-left of the zero-padded M x M array.
inline CMatrix padded_field(const Matrix& phase, const PupilGrid& grid) {
  if (phase.rows() != grid.size || phase.cols() != grid.size) {
    throw InvalidInput("phase screen size does not match the pupil grid");
  }
  if (!phase.allFinite()) throw InvalidInput("phase screen is not finite");
  const Index m = grid.padded();
  CMatrix field = CMatrix::Zero(m, m);
  for (Index r = 0; r < grid.size; ++r) {
    for (Index c = 0; c < grid.size; ++c) {
      if (grid.aperture(r, c) > 0.0) field(r, c) = grid.aperture(r, c) * std::polar(1.0, phase(r, c));
    }
  }
  return field;
}

// Coherent PSF g = IDFT(A e^{j Psi}), unshifted (on-axis sample at (0, 0)).
inline CMatrix coherent_psf(const Matrix& phase, const PupilGrid& grid) {
  return fft2(padded_field(phase, grid), true);
}

struct PSF {
  Matrix intensity;          // nonnegative, sums to 1, on-axis at (M/2, M/2)
  double c0 = 0.0;           // normalization applied to |g|^2
  double total_power = 0.0;  // sum |g|^2 before normalization
};

inline PSF psf_from_phase(const Matrix& phase, const PupilGrid& grid) {
  const CMatrix g = coherent_psf(phase, grid);
  PSF psf;
  Matrix raw = g.cwiseAbs2();
  psf.total_power = raw.sum();
  psf.c0 = 1.0 / psf.total_power;
  psf.intensity = fftshift(raw * psf.c0);
  return psf;
}

// sum |A|^2 / M^2: what sum |g|^2 must equal by Parseval.
inline double aperture_energy(const PupilGrid& grid) {
  const double m = static_cast<double>(grid.padded());
  return grid.aperture.squaredNorm() / (m * m);
}

// ---------------------------------------------------------------------------
// Strehl ratio and max-Strehl shells

// Evaluates Strehl(beta) = |sum A e^{j phi}|^2 / |sum A|^2 and its gradient
// without a DFT, using Zernike modes sampled on the support pixels.
class StrehlEvaluator {
 public:
  StrehlEvaluator(const PupilGrid& grid, Index k, int first_noll = kDefocusNoll)
      : first_noll_(first_noll) {
    std::vector<Index> rows;
    std::vector<Index> cols;
    for (Index c = 0; c < grid.size; ++c) {
      for (Index r = 0; r < grid.size; ++r) {
        if (grid.support(r, c)) {
          rows.push_back(r);
          cols.push_back(c);
        }
      }
    }
    const auto npix = static_cast<Index>(rows.size());
    weights_.resize(npix);
    modes_.resize(npix, k);
    for (Index i = 0; i < npix; ++i) {
      const Index r = rows[static_cast<std::size_t>(i)];
      const Index c = cols[static_cast<std::size_t>(i)];
      weights_[i] = grid.aperture(r, c);
      for (Index j = 0; j < k; ++j) {
        modes_(i, j) = 2.0 * std::numbers::pi *
                       zernike(first_noll + static_cast<int>(j), grid.rho(r, c), grid.phi(r, c));
      }
    }
    norm_ = weights_.sum() * weights_.sum();
  }

  Index modes() const { return modes_.cols(); }

  double value(const Vector& beta) const {
    const Vector phase = modes_ * beta;
    Complex u{0.0, 0.0};
    for (Index i = 0; i < phase.size(); ++i) u += weights_[i] * std::polar(1.0, phase[i]);
    return std::norm(u) / norm_;
  }

  double value_and_gradient(const Vector& beta, Vector& grad) const {
    const Vector phase = modes_ * beta;
    Eigen::ArrayXd cs(phase.size());
    Eigen::ArrayXd sn(phase.size());
    for (Index i = 0; i < phase.size(); ++i) {
      cs[i] = weights_[i] * std::cos(phase[i]);
      sn[i] = weights_[i] * std::sin(phase[i]);
    }
    const double re = cs.sum();
    const double im = sn.sum();
    // d|U|^2/db = 2 Re(conj(U) dU), dU = sum w j dphi e^{j phi}
    grad = 2.0 * (modes_.transpose() * (re * sn * -1.0 + im * cs).matrix()) / norm_;
    return (re * re + im * im) / norm_;
  }

 private:
  int first_noll_;
  Vector weights_;
  Matrix modes_;  // radians per wave, support pixels x modes
  double norm_ = 1.0;
};

inline double strehl(const ZernikeCoeffs& beta, const PupilGrid& grid) {
  return StrehlEvaluator(grid, beta.size(), beta.first_noll).value(beta.coeffs);
}

struct ShellPoint {
  ZernikeCoeffs beta;
  double strehl = 1.0;
};

struct ShellOptions {
  int max_iter = 5000;
  double grad_tol = 1e-10;      // tangent-gradient norm times tau
  double dedup_rel_tol = 1e-3;  // relative to tau
};

// Local maximizers of Strehl on the sphere |beta| = tau (K modes from Noll 4),
// by projected ascent from n_points random starts; deduplicated and sorted by
// descending Strehl.
inline std::vector<ShellPoint> max_strehl_shell(double tau, Index k, const PupilGrid& grid,
                                                int n_points, const RandomStream& rng,
                                                const ShellOptions& opt = {}) {
  if (!(tau >= 0.0)) throw InvalidInput("max_strehl_shell: tau must be >= 0");
  if (k < 1 || n_points < 1) throw InvalidInput("max_strehl_shell: need K >= 1 and n_points >= 1");
  if (tau == 0.0) return {ShellPoint{ZernikeCoeffs::zeros(k), 1.0}};

  const StrehlEvaluator eval(grid, k);
  std::vector<ShellPoint> found;
  for (int s = 0; s < n_points; ++s) {
    RandomStream stream = rng.child(static_cast<std::uint64_t>(s));
    Vector x(k);
    for (Index i = 0; i < k; ++i) x[i] = stream.normal();
    x *= tau / x.norm();
    Vector grad;
    double fx = eval.value_and_gradient(x, grad);
    double step = 0.1 * tau;
    for (int it = 0; it < opt.max_iter; ++it) {
      const Vector tangent = grad - (grad.dot(x) / (tau * tau)) * x;
      if (tangent.norm() * tau <= opt.grad_tol) break;
      const Vector dir = tangent / tangent.norm();
      bool moved = false;
      while (step > 1e-14 * tau) {
        Vector y = x + step * dir;
        y *= tau / y.norm();
        Vector gy;
        const double fy = eval.value_and_gradient(y, gy);
        if (fy > fx) {
          x = std::move(y);
          fx = fy;
          grad = std::move(gy);
          step = std::min(step * 1.5, tau);
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    x *= tau / x.norm();
    found.push_back({ZernikeCoeffs{x, kDefocusNoll}, eval.value(x)});
  }

  std::stable_sort(found.begin(), found.end(),
                   [](const ShellPoint& a, const ShellPoint& b) { return a.strehl > b.strehl; });
  std::vector<ShellPoint> unique;
  for (auto& p : found) {
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const ShellPoint& q) {
      return (q.beta.coeffs - p.beta.coeffs).norm() <= opt.dedup_rel_tol * tau;
    });
    if (!dup) unique.push_back(std::move(p));
  }
  return unique;
}

// {current + beta : beta in shell}, ordered by descending Strehl of beta.
inline std::vector<ZernikeCoeffs> restart_candidates(const ZernikeCoeffs& current, double tau,
                                                     std::vector<ShellPoint> shell) {
  if (shell.empty()) throw InvalidInput("restart_candidates: empty shell");
  for (const auto& p : shell) {
    if (p.beta.size() != current.size() || p.beta.first_noll != current.first_noll) {
      throw InvalidInput("restart_candidates: shell and current use different modes");
    }
    if (std::abs(p.beta.rms() - tau) > 1e-8 * std::max(1.0, tau)) {
      throw InvalidInput("restart_candidates: shell point is not at RMS tau");
    }
  }
  std::stable_sort(shell.begin(), shell.end(),
                   [](const ShellPoint& a, const ShellPoint& b) { return a.strehl > b.strehl; });
  std::vector<ZernikeCoeffs> out;
  out.reserve(shell.size());
  for (const auto& p : shell) out.push_back({current.coeffs + p.beta.coeffs, current.first_noll});
  return out;
}

// ---------------------------------------------------------------------------
// Point-wise PSF perturbation bound
//
// For the perturbed screen Psi + beta, h = c0 |g * d|^2 with g the coherent PSF
// of Psi and d any kernel whose DFT equals e^{j beta} on the aperture support.
// We take D = 1 + A_B (e^{j beta} - 1), so d = delta when beta = 0. Then
// |h - c0 |g|^2| <= |d - a delta| (|d - a delta| + 2 |g| / |g|_2) for |a| = 1.

struct PerturbationBound {
  Matrix epsilon;  // |h - c0 |g|^2|, same layout as g
  Matrix bound;
  Complex a{1.0, 0.0};
  double kernel_distance = 0.0;  // |d - a delta|_2
};

inline PerturbationBound psf_perturbation_bound(const CMatrix& g_coherent, const ZernikeCoeffs& beta,
                                                const PupilGrid& grid,
                                                std::optional<Complex> a_fixed = std::nullopt) {
  const Index m = grid.padded();
  if (g_coherent.rows() != m || g_coherent.cols() != m) {
    throw InvalidInput("psf_perturbation_bound: coherent PSF has wrong size");
  }
  const Matrix beta_phase = zernike_phase(beta, grid);

  const CMatrix pupil = fft2(g_coherent, false);
  CMatrix perturbed = pupil;
  CMatrix kernel_dft = CMatrix::Ones(m, m);
  for (Index r = 0; r < grid.size; ++r) {
    for (Index c = 0; c < grid.size; ++c) {
      if (!grid.support(r, c)) continue;
      const Complex e = std::polar(1.0, beta_phase(r, c));
      perturbed(r, c) *= e;
      kernel_dft(r, c) = e;
    }
  }
  const CMatrix h_coh = fft2(perturbed, true);
  const CMatrix d = fft2(kernel_dft, true);

  const double g_energy = g_coherent.squaredNorm();
  const double c0 = 1.0 / g_energy;
  PerturbationBound out;
  out.epsilon = (c0 * (h_coh.cwiseAbs2() - g_coherent.cwiseAbs2())).cwiseAbs();

  const Complex d00 = d(0, 0);
  if (a_fixed) {
    out.a = *a_fixed / std::abs(*a_fixed);
  } else {
    out.a = std::abs(d00) > 0.0 ? d00 / std::abs(d00) : Complex{1.0, 0.0};
  }
  CMatrix diff = d;
  diff(0, 0) -= out.a;
  const double dist = diff.norm();
  out.kernel_distance = dist;
  const double g_norm = std::sqrt(g_energy);
  out.bound = (dist * (dist + 2.0 * g_coherent.cwiseAbs().array() / g_norm)).matrix();
  return out;
}

}  // namespace locmin
