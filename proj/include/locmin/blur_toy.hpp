#pragma once

// K-mode blur estimation toy: the measurement is flux * vec(PSF(beta)) plus
// white Gaussian noise, beta being Zernike coefficients from Noll 4. Local
// descent from the diffraction-limited screen often stalls at a spurious
// minimum; restart_search() detects that with the gap test (full-measurement
// relaxation) and restarts from max-Strehl shell candidates around the best
// point found so far.

#include "locmin/embedding.hpp"
#include "locmin/model.hpp"
#include "locmin/optics.hpp"
#include "locmin/optimizer.hpp"
#include "locmin/validation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

namespace locmin {

class PsfMean {
 public:
  PsfMean(PupilGrid grid, Index k, double flux, int first_noll = kDefocusNoll)
      : data_(std::make_shared<Data>()) {
    if (k < 1) throw InvalidInput("PsfMean: K must be >= 1");
    if (!(flux > 0.0)) throw InvalidInput("PsfMean: flux must be positive");
    data_->flux = flux;
    data_->first_noll = first_noll;
    data_->modes.reserve(static_cast<std::size_t>(k));
    for (Index j = 0; j < k; ++j) {
      ZernikeCoeffs unit = ZernikeCoeffs::zeros(k, first_noll);
      unit.coeffs[j] = 1.0;
      data_->modes.push_back(zernike_phase(unit, grid));
    }
    data_->c0 = 1.0 / aperture_energy(grid);
    data_->grid = std::move(grid);
  }

  const PupilGrid& grid() const { return data_->grid; }
  double flux() const { return data_->flux; }
  Index output_dim() const { return data_->grid.padded() * data_->grid.padded(); }
  Index param_dim() const { return static_cast<Index>(data_->modes.size()); }
  Bounds domain() const { return Bounds::unbounded(param_dim()); }

  Matrix phase(const Vector& beta) const {
    check(beta);
    Matrix ph = Matrix::Zero(data_->grid.size, data_->grid.size);
    for (Index j = 0; j < beta.size(); ++j) ph += beta[j] * data_->modes[static_cast<std::size_t>(j)];
    return ph;
  }

  // Unshifted PSF (on-axis sample at (0, 0)), flattened column-major.
  Vector value(const Vector& beta) const {
    const CMatrix g = fft2(padded_field(phase(beta), data_->grid), true);
    const Matrix h = g.cwiseAbs2() * (data_->c0 * data_->flux);
    return Eigen::Map<const Vector>(h.data(), h.size());
  }

  // d h / d beta_k = 2 c0 Re(conj(g) IDFT(X j dphi_k)), X = A e^{j phi} padded.
  Matrix jacobian(const Vector& beta) const {
    const Data& d = *data_;
    const CMatrix x = padded_field(phase(beta), d.grid);
    const CMatrix g = fft2(x, true);
    Matrix jac(output_dim(), param_dim());
    for (Index k = 0; k < param_dim(); ++k) {
      CMatrix xk = CMatrix::Zero(x.rows(), x.cols());
      const Matrix& mode = d.modes[static_cast<std::size_t>(k)];
      xk.topLeftCorner(d.grid.size, d.grid.size) =
          x.topLeftCorner(d.grid.size, d.grid.size).cwiseProduct(mode.cast<Complex>()) *
          Complex{0.0, 1.0};
      const CMatrix gk = fft2(xk, true);
      const Matrix col = (g.conjugate().cwiseProduct(gk)).real() * (2.0 * d.c0 * d.flux);
      jac.col(k) = Eigen::Map<const Vector>(col.data(), col.size());
    }
    return jac;
  }

 private:
  void check(const Vector& beta) const {
    if (beta.size() != param_dim()) throw InvalidInput("PsfMean: wrong number of coefficients");
    if (!beta.allFinite()) throw EvaluationError("PsfMean: non-finite coefficients");
  }

  struct Data {
    PupilGrid grid;
    std::vector<Matrix> modes;  // radians per wave
    double flux = 1.0;
    double c0 = 1.0;
    int first_noll = kDefocusNoll;
  };
  std::shared_ptr<Data> data_;
};

using PsfModel = GaussianLocationModel<PsfMean>;

struct RestartOptions {
  double tau = 0.2;          // restart distance, waves RMS
  int shell_points = 32;     // multi-start budget for the shell
  int max_restarts = 20;
  double alpha = 0.01;
  std::size_t gap_replicates = 50;
  OptimizerOptions optimizer{};
};

struct RestartStep {
  int restart = 0;            // 0 for the initial descent
  ZernikeCoeffs start;
  ZernikeCoeffs found;
  double negloglik = 0.0;
  OptimizeStatus status = OptimizeStatus::converged;
  std::optional<TestReport> test;  // absent when the descent did not converge
};

struct RestartOutcome {
  bool accepted = false;   // the gap test accepted some minimum
  ZernikeCoeffs estimate;  // the accepted point, else the best one seen
  int restarts = 0;
  std::vector<RestartStep> steps;
};

// Descend from `initial`; while the gap test rejects, restart from the shell
// candidates around the best minimum so far. The candidate list is rebuilt
// whenever the best point improves; once it runs out, the next-best distinct
// minimum not yet expanded supplies the candidates.
inline RestartOutcome restart_search(const PsfModel& model, const Dataset& data,
                                     const ZernikeCoeffs& initial,
                                     const std::vector<ShellPoint>& shell,
                                     const RestartOptions& opt, const RandomStream& rng) {
  const GaussianLocationModel<AdditiveEmbedding<PsfMean>> relaxed(
      AdditiveEmbedding<PsfMean>(model.mean_function()), model.sigma());
  GapOptions gap_opt;
  gap_opt.optimizer = opt.optimizer;
  // the relaxed fit is near-quadratic in the extra parameters; the cap only slows it
  gap_opt.optimizer.max_step = std::numeric_limits<double>::infinity();

  struct Visited {
    ZernikeCoeffs at;
    double negloglik;
    bool expanded;
  };
  std::vector<Visited> minima;
  const auto same_value = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a));
  };

  RestartOutcome out;
  std::vector<ZernikeCoeffs> queue;
  std::size_t next = 0;

  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    ZernikeCoeffs start = initial;
    if (restart > 0) {
      if (next >= queue.size()) {
        Visited* pick = nullptr;
        for (auto& v : minima) {
          if (!v.expanded && (!pick || v.negloglik < pick->negloglik)) pick = &v;
        }
        if (!pick) break;
        pick->expanded = true;
        queue = restart_candidates(pick->at, opt.tau, shell);
        next = 0;
      }
      start = queue[next++];
    }
    const auto fit = minimize_negloglik(model, data, start.coeffs, opt.optimizer);
    RestartStep step;
    step.restart = restart;
    step.start = start;
    step.found = {fit.minimizer.values(), initial.first_noll};
    step.negloglik = fit.objective_value;
    step.status = fit.status;
    if (fit.converged()) {
      step.test = gap_test(model, relaxed, data, fit.minimizer.values(), opt.gap_replicates,
                           opt.alpha, rng.child(static_cast<std::uint64_t>(restart)), gap_opt);
    }
    out.steps.push_back(step);
    out.restarts = restart;

    if (step.test && !step.test->rejected()) {
      out.accepted = true;
      out.estimate = step.found;
      return out;
    }
    const bool known = std::any_of(minima.begin(), minima.end(), [&](const Visited& v) {
      return same_value(v.negloglik, step.negloglik);
    });
    if (known) continue;
    const bool improves = std::all_of(minima.begin(), minima.end(), [&](const Visited& v) {
      return step.negloglik < v.negloglik;
    });
    minima.push_back({step.found, step.negloglik, improves});
    if (improves) {
      queue = restart_candidates(step.found, opt.tau, shell);
      next = 0;
    }
  }
  const auto best = std::min_element(out.steps.begin(), out.steps.end(),
                                     [](const RestartStep& a, const RestartStep& b) {
                                       return a.negloglik < b.negloglik;
                                     });
  out.estimate = best->found;
  return out;
}

}  // namespace locmin
