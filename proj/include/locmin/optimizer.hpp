#pragma once

// Bound-constrained local minimization: limited-memory BFGS directions on the
// free variables, projected onto the box, with a backtracking Armijo search.
// Accepted iterates strictly decrease the objective, which keeps the relaxed
// descent below inside the improving set around its start. Once changes are
// within 256 ulp of |f| the function value carries no information, and a step
// is taken when it reduces the projected-gradient norm instead.

#include "locmin/embedding.hpp"
#include "locmin/model.hpp"
#include "locmin/types.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

namespace locmin {

enum class OptimizeStatus { converged, max_iter, line_search_failure };

inline std::string_view to_string(OptimizeStatus s) {
  switch (s) {
    case OptimizeStatus::converged: return "converged";
    case OptimizeStatus::max_iter: return "max-iter";
    case OptimizeStatus::line_search_failure: return "line-search-failure";
  }
  return "unknown";
}

struct OptimizerOptions {
  double tol = 1e-8;  // on the projected-gradient norm
  int max_iter = 500;
  int memory = 10;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 60;
  double max_step = std::numeric_limits<double>::infinity();  // cap on the trial step length
};

struct OptimizeResult {
  ParamPoint minimizer;
  double objective_value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  OptimizeStatus status = OptimizeStatus::line_search_failure;
  std::vector<double> trace;  // objective at the start and at every accepted iterate

  bool converged() const { return status == OptimizeStatus::converged; }
};

inline Vector projected_gradient(const Vector& x, const Vector& g, const Bounds& bounds) {
  return x - bounds.project(x - g);
}

namespace detail {

template <class Fn>
double safe_value(Fn& f, const Vector& x) {
  try {
    return f(x);
  } catch (const EvaluationError&) {
    return std::nan("");
  }
}

template <class Fn>
Vector safe_gradient(Fn& g, const Vector& x) {
  try {
    return g(x);
  } catch (const EvaluationError&) {
    return Vector::Constant(x.size(), std::nan(""));
  }
}

// Two-loop recursion: approximate inverse Hessian times q.
inline Vector lbfgs_direction(const Vector& grad, const std::deque<Vector>& s,
                              const std::deque<Vector>& y, const std::deque<double>& rho) {
  Vector q = grad;
  const std::size_t k = s.size();
  std::vector<double> a(k);
  for (std::size_t i = k; i-- > 0;) {
    a[i] = rho[i] * s[i].dot(q);
    q -= a[i] * y[i];
  }
  if (k > 0) q *= s.back().dot(y.back()) / y.back().squaredNorm();
  for (std::size_t i = 0; i < k; ++i) {
    const double b = rho[i] * y[i].dot(q);
    q += (a[i] - b) * s[i];
  }
  return -q;
}

}  // namespace detail

template <class Objective, class Gradient>
OptimizeResult minimize_local(Objective&& objective, Gradient&& gradient, const ParamPoint& start,
                              const Bounds& bounds, const OptimizerOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw InvalidInput("minimize_local: tol must be positive");
  if (!(opt.max_step > 0.0)) throw InvalidInput("minimize_local: max_step must be positive");
  if (bounds.size() != start.size()) throw InvalidInput("minimize_local: bounds size mismatch");

  OptimizeResult res;
  Vector x = bounds.project(start.values());
  double fx = detail::safe_value(objective, x);
  if (!std::isfinite(fx)) throw InvalidInput("minimize_local: objective not finite at start");
  Vector g = detail::safe_gradient(gradient, x);
  res.trace.push_back(fx);

  auto finish = [&](OptimizeStatus status, int iterations) {
    res.minimizer = ParamPoint(x);
    res.objective_value = fx;
    res.gradient_norm = g.allFinite() ? projected_gradient(x, g, bounds).norm() : std::nan("");
    res.iterations = iterations;
    res.status = status;
    return res;
  };
  if (!g.allFinite()) return finish(OptimizeStatus::line_search_failure, 0);

  std::deque<Vector> s_hist;
  std::deque<Vector> y_hist;
  std::deque<double> rho_hist;
  const Index p = x.size();
  Vector prev_mask = Vector::Ones(p);

  for (int iter = 0;; ++iter) {
    if (projected_gradient(x, g, bounds).norm() <= opt.tol) {
      return finish(OptimizeStatus::converged, iter);
    }
    if (iter >= opt.max_iter) return finish(OptimizeStatus::max_iter, iter);

    // Variables pinned at a bound by the gradient do not move this step.
    Vector free_mask(p);
    for (Index i = 0; i < p; ++i) {
      const bool pinned =
          (x[i] <= bounds.lower[i] && g[i] > 0.0) || (x[i] >= bounds.upper[i] && g[i] < 0.0);
      free_mask[i] = pinned ? 0.0 : 1.0;
    }
    // Curvature pairs only describe the free subspace they were taken in.
    if (free_mask != prev_mask) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      prev_mask = free_mask;
    }

    bool accepted = false;
    bool have_g_new = false;
    Vector x_new;
    Vector g_new;
    double f_new = fx;
    const double roundoff = 256.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(fx));
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Vector dir = detail::lbfgs_direction(g.cwiseProduct(free_mask), s_hist, y_hist, rho_hist)
                       .cwiseProduct(free_mask);
      if (s_hist.empty() || !dir.allFinite() || dir.dot(g) >= 0.0) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        dir = -g.cwiseProduct(free_mask);
      }
      double t = s_hist.empty() ? std::min(1.0, 1.0 / dir.norm()) : 1.0;
      t = std::min(t, opt.max_step / dir.norm());
      for (int k = 0; k < opt.max_backtracks; ++k, t *= 0.5) {
        x_new = bounds.project(x + t * dir);
        const Vector step = x_new - x;
        if (step.squaredNorm() == 0.0) break;
        f_new = detail::safe_value(objective, x_new);
        if (!std::isfinite(f_new)) continue;
        if (f_new < fx && f_new <= fx + opt.sufficient_decrease * g.dot(step)) {
          accepted = true;
          break;
        }
        // Within rounding of fx the Armijo test cannot resolve progress; take
        // the step if the projected gradient shrank.
        if (std::abs(f_new - fx) <= roundoff) {
          g_new = detail::safe_gradient(gradient, x_new);
          if (g_new.allFinite() &&
              projected_gradient(x_new, g_new, bounds).norm() < projected_gradient(x, g, bounds).norm()) {
            accepted = true;
            have_g_new = true;
            break;
          }
        }
      }
      if (!accepted) {
        if (s_hist.empty()) break;
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
      }
    }
    if (!accepted) return finish(OptimizeStatus::line_search_failure, iter);

    if (!have_g_new) g_new = detail::safe_gradient(gradient, x_new);
    if (!g_new.allFinite()) return finish(OptimizeStatus::line_search_failure, iter);

    Vector s = (x_new - x).cwiseProduct(free_mask);
    Vector y = (g_new - g).cwiseProduct(free_mask);
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = std::move(x_new);
    fx = f_new;
    g = std::move(g_new);
    res.trace.push_back(fx);
  }
}

// Local maximum-likelihood fit: minimize -l(data; theta) over the model domain.
template <StatisticalModel M>
OptimizeResult minimize_negloglik(const M& model, const Dataset& data, const Vector& start,
                                  const OptimizerOptions& opt = {}) {
  return minimize_local([&](const Vector& t) { return -model.log_likelihood(data, t); },
                        [&](const Vector& t) { return Vector(-model.score(data, t)); },
                        ParamPoint(start), model.domain(), opt);
}

// Projected gradient of -l at theta, restricted to the model domain.
template <StatisticalModel M>
double stationarity(const M& model, const Dataset& data, const Vector& theta) {
  return projected_gradient(theta, -model.score(data, theta), model.domain()).norm();
}

struct RelaxedFit {
  OptimizeResult result;      // over (theta, theta')
  double restricted_loglik;   // l(d; mu(theta_hat))
  double relaxed_loglik;      // l(d; mu~(relaxed optimum))
  double gap;                 // relaxed_loglik - restricted_loglik, >= 0
};

// Descend in the relaxed space from (theta_hat, 0). theta_hat must be a
// stationary point of the restricted problem (projected gradient <= 10 tol).
template <Embedding E>
RelaxedFit restricted_relaxed_minimize(const GaussianLocationModel<E>& relaxed,
                                       const Dataset& data, const Vector& theta_hat,
                                       const OptimizerOptions& opt = {}) {
  const E& emb = relaxed.mean_function();
  const Index p = emb.base_dim();
  if (theta_hat.size() != p) throw InvalidInput("restricted_relaxed_minimize: wrong theta size");

  const Vector start = lift(theta_hat, emb.extra_dim());
  const Bounds dom = relaxed.domain();
  const Bounds base_dom{dom.lower.head(p), dom.upper.head(p)};
  const Vector restricted_grad = -relaxed.score(data, start).head(p);
  const double pg = projected_gradient(theta_hat, restricted_grad, base_dom).norm();
  if (!(pg <= 10.0 * opt.tol)) {
    throw InvalidInput("restricted_relaxed_minimize: theta_hat is not stationary (projected "
                       "gradient " + std::to_string(pg) + ")");
  }

  RelaxedFit fit{minimize_negloglik(relaxed, data, start, opt), 0.0, 0.0, 0.0};
  fit.restricted_loglik = fit.result.trace.empty() ? relaxed.log_likelihood(data, start)
                                                   : -fit.result.trace.front();
  fit.relaxed_loglik = -fit.result.objective_value;
  fit.gap = fit.relaxed_loglik - fit.restricted_loglik;
  return fit;
}

}  // namespace locmin
