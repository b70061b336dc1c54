#pragma once

// Monte-Carlo trials on the sinusoid benchmark: sample data at theta0,
// descend from a start, label the result against the enumerated global
// minimum, and evaluate every statistic on the same data.

#include "locmin/parallel.hpp"
#include "locmin/roc.hpp"
#include "locmin/sinusoid.hpp"
#include "locmin/validation.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace locmin {

enum class StartMode { uniform, truth };

struct NamedRelaxation {
  std::string name;
  RelaxationSpec spec;
};

struct TrialOptions {
  std::size_t trials = 2000;
  double sigma = 1.0;
  double theta0 = kSinusoidTheta0;
  std::size_t bootstrap_replicates = 1000;
  std::size_t gap_replicates = 200;
  std::vector<double> alphas{0.05, 0.1};
  ThresholdMode threshold_mode = ThresholdMode::asymptotic;
  StartMode start_mode = StartMode::uniform;
  std::vector<NamedRelaxation> relaxations;
  double label_tol = 1e-3;
  Index oracle_resolution = 4001;
  OptimizerOptions optimizer{};
};

struct TrialRecord {
  static constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

  std::size_t trial = 0;
  double start = 0.0;
  double theta_hat = 0.0;
  double theta_global = 0.0;
  double loglik = 0.0;
  OptimizeStatus status = OptimizeStatus::converged;
  bool spurious = false;  // H1 ground truth
  double stat_rao = kMissing;
  double stat_two = kMissing;
  double stat_one = kMissing;
  std::vector<double> stat_gap;  // one per relaxation
  // reject[a][t]: test t rejects at alphas[a]; t = rao, two-sided, one-sided, gap...
  std::vector<std::vector<bool>> reject;
  std::string note;  // diagnostic when a statistic could not be computed

  bool usable() const {
    if (status != OptimizeStatus::converged) return false;
    if (!std::isfinite(stat_rao) || !std::isfinite(stat_two) || !std::isfinite(stat_one)) {
      return false;
    }
    for (double g : stat_gap) {
      if (!std::isfinite(g)) return false;
    }
    return true;
  }
};

inline TrialRecord run_sinusoid_trial(const TrialOptions& opt, std::size_t index,
                                      const RandomStream& master) {
  const SinusoidModel model = make_sinusoid_model(opt.sigma);
  const RandomStream stream = master.child(index);
  TrialRecord rec;
  rec.trial = index;

  RandomStream data_rng = stream.child(0);
  const Dataset data = model.sample(Vector::Constant(1, opt.theta0), 1, data_rng);
  RandomStream start_rng = stream.child(1);
  rec.start = opt.start_mode == StartMode::truth ? opt.theta0
                                                 : start_rng.uniform(0.0, kSinusoidThetaMax);

  const auto fit = minimize_negloglik(model, data, Vector::Constant(1, rec.start), opt.optimizer);
  rec.status = fit.status;
  rec.theta_hat = fit.minimizer[0];
  const Vector theta_hat = fit.minimizer.values();
  rec.loglik = -fit.objective_value;

  const auto minima =
      enumerate_local_minima(model, data, opt.oracle_resolution, 1e-4, opt.optimizer);
  rec.theta_global = global_minimum(minima).theta;
  rec.spurious = std::abs(rec.theta_hat - rec.theta_global) > opt.label_tol;

  rec.stat_gap.assign(opt.relaxations.size(), TrialRecord::kMissing);
  const std::size_t n_tests = 3 + opt.relaxations.size();
  rec.reject.assign(opt.alphas.size(), std::vector<bool>(n_tests, false));
  if (!fit.converged()) {
    rec.note = "descent did not converge";
    return rec;
  }

  for (std::size_t a = 0; a < opt.alphas.size(); ++a) {
    const auto rao = rao_score_test(model, data, theta_hat, opt.alphas[a]);
    rec.stat_rao = rao.statistic;
    rec.reject[a][0] = rao.rejected();
  }

  try {
    const auto moments =
        bootstrap_moments(model, theta_hat, opt.bootstrap_replicates, stream.child(2));
    for (std::size_t a = 0; a < opt.alphas.size(); ++a) {
      const auto two = two_sided_test(rec.loglik, moments, opt.alphas[a], opt.threshold_mode);
      const auto one = one_sided_test(rec.loglik, moments, opt.alphas[a], opt.threshold_mode);
      rec.stat_two = two.statistic;
      rec.stat_one = one.statistic;
      rec.reject[a][1] = two.rejected();
      rec.reject[a][2] = one.rejected();
    }
  } catch (const std::exception& e) {
    rec.note += std::string("moment tests: ") + e.what() + "; ";
  }

  GapOptions gap_opt;
  gap_opt.optimizer = opt.optimizer;
  for (std::size_t k = 0; k < opt.relaxations.size(); ++k) {
    try {
      const GaussianLocationModel<AnyEmbedding> relaxed(
          make_embedding(opt.relaxations[k].spec), opt.sigma);
      const auto gb = gap_bootstrap(model, relaxed, data, theta_hat, opt.gap_replicates,
                                    stream.child(3 + k), gap_opt);
      for (std::size_t a = 0; a < opt.alphas.size(); ++a) {
        const auto rep = gap_decision(gb, opt.alphas[a], opt.threshold_mode);
        rec.stat_gap[k] = rep.statistic;
        rec.reject[a][3 + k] = rep.rejected();
      }
    } catch (const std::exception& e) {
      rec.note += opt.relaxations[k].name + ": " + e.what() + "; ";
    }
  }
  return rec;
}

inline std::vector<TrialRecord> run_sinusoid_trials(const TrialOptions& opt,
                                                    const RandomStream& master,
                                                    unsigned threads = 1) {
  if (opt.trials < 1) throw InvalidInput("trials must be >= 1");
  if (opt.alphas.empty()) throw InvalidInput("need at least one alpha");
  for (double a : opt.alphas) check_alpha(a);
  std::vector<TrialRecord> records(opt.trials);
  parallel_for(opt.trials, threads,
               [&](std::size_t i) { records[i] = run_sinusoid_trial(opt, i, master); });
  return records;
}

// Detection scores per test over usable trials, larger = more evidence of a
// spurious optimum. Test order: rao, two-sided, one-sided, then gap per relaxation.
struct RocSummary {
  std::vector<std::string> tests;
  std::vector<std::vector<double>> h0;  // [test][trial]
  std::vector<std::vector<double>> h1;
  std::vector<std::vector<RocPoint>> curves;
  std::vector<double> aucs;
  std::size_t excluded = 0;

  std::size_t n_h0() const { return h0.empty() ? 0 : h0.front().size(); }
  std::size_t n_h1() const { return h1.empty() ? 0 : h1.front().size(); }
  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < tests.size(); ++i) {
      if (tests[i] == name) return i;
    }
    throw InvalidInput("no test named " + name);
  }
};

inline std::vector<std::string> test_names(const std::vector<NamedRelaxation>& relaxations) {
  std::vector<std::string> names{"rao", "two", "one"};
  for (const auto& r : relaxations) names.push_back("gap_" + r.name);
  return names;
}

inline RocSummary summarize_roc(const std::vector<TrialRecord>& records,
                                const std::vector<NamedRelaxation>& relaxations,
                                bool build_curves = true) {
  RocSummary s;
  s.tests = test_names(relaxations);
  s.h0.resize(s.tests.size());
  s.h1.resize(s.tests.size());
  for (const auto& r : records) {
    if (!r.usable()) {
      ++s.excluded;
      continue;
    }
    std::vector<double> scores{r.stat_rao, r.stat_two, -r.stat_one};
    scores.insert(scores.end(), r.stat_gap.begin(), r.stat_gap.end());
    auto& bucket = r.spurious ? s.h1 : s.h0;
    for (std::size_t t = 0; t < scores.size(); ++t) bucket[t].push_back(scores[t]);
  }
  if (build_curves && s.n_h0() > 0 && s.n_h1() > 0) {
    for (std::size_t t = 0; t < s.tests.size(); ++t) {
      s.curves.push_back(roc_curve(s.h0[t], s.h1[t]));
      s.aucs.push_back(auc(s.h0[t], s.h1[t]));
    }
  }
  return s;
}

// Fraction of usable trials with the given label rejected by test t at alphas[a].
inline double rejection_rate(const std::vector<TrialRecord>& records, std::size_t a,
                             std::size_t t, bool spurious) {
  std::size_t n = 0;
  std::size_t rej = 0;
  for (const auto& r : records) {
    if (!r.usable() || r.spurious != spurious) continue;
    ++n;
    rej += r.reject[a][t] ? 1 : 0;
  }
  return n == 0 ? std::nan("") : static_cast<double>(rej) / static_cast<double>(n);
}

}  // namespace locmin
