#pragma once

// Experiment commands behind the locmin CLI. Each reads a resolved Config,
// writes stamped CSV files into the output directory and returns an exit
// code: 0 success, 2 completed with a degenerate or insufficient result, 1
// (via exceptions) errors.

#include "locmin/blur_toy.hpp"
#include "locmin/config.hpp"
#include "locmin/csv.hpp"
#include "locmin/discovery.hpp"
#include "locmin/optics.hpp"
#include "locmin/parallel.hpp"
#include "locmin/roc.hpp"
#include "locmin/sinusoid.hpp"
#include "locmin/trials.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace locmin {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitWarning = 2;

struct RunContext {
  Config config = Config::defaults();
  unsigned threads = 1;
  std::ostream* log = &std::cerr;

  std::filesystem::path out_dir() const {
    std::filesystem::path dir(config.get("out"));
    std::filesystem::create_directories(dir);
    return dir;
  }
  std::ostream& msg() const { return *log; }
};

inline OptimizerOptions optimizer_options(const Config& c) {
  OptimizerOptions o;
  o.tol = c.get_double("tol");
  o.max_iter = static_cast<int>(c.get_count("max_iter"));
  o.memory = static_cast<int>(c.get_count("memory"));
  if (!(o.tol > 0.0)) throw InvalidInput("tol must be positive");
  return o;
}

// ---------------------------------------------------------------------------
// Sinusoid relaxation discovery

using SinusoidRelaxedSpace = AdditiveEmbedding<SinusoidMean>;

inline DiscoveryConfig<SinusoidRelaxedSpace> sinusoid_discovery_config(Index nominal_count,
                                                                       Index start_count,
                                                                       bool starts_at_truth,
                                                                       double mismatch_tol) {
  DiscoveryConfig<SinusoidRelaxedSpace> cfg{{}, {}, SinusoidRelaxedSpace(SinusoidMean{}),
                                            mismatch_tol};
  for (double t : theta_grid(nominal_count)) cfg.nominal_set.emplace_back(Vector::Constant(1, t));
  cfg.start_at_truth = starts_at_truth;
  if (!starts_at_truth) {
    for (double t : theta_grid(start_count, true)) cfg.start_set.emplace_back(Vector::Constant(1, t));
  }
  return cfg;
}

inline std::vector<RelaxationDirection> discover_sinusoid(const Config& c, int dims,
                                                          unsigned threads) {
  const std::string mode = c.get("discovery_start");
  if (mode != "grid" && mode != "truth") {
    throw InvalidInput("discovery_start must be 'grid' or 'truth'");
  }
  const auto cfg = sinusoid_discovery_config(c.get_count("nominal_count", 1),
                                             c.get_count("start_count", 1), mode == "truth",
                                             c.get_double("mismatch_tol"));
  const SinusoidModel model = make_sinusoid_model(c.get_double("sigma"));
  return iterate_discovery(cfg, model, optimizer_options(c), dims, threads);
}

inline Matrix directions_matrix(const std::vector<RelaxationDirection>& dirs) {
  Matrix r(dirs.front().r.size(), static_cast<Index>(dirs.size()));
  for (std::size_t j = 0; j < dirs.size(); ++j) r.col(static_cast<Index>(j)) = dirs[j].r;
  return r;
}

// index,value (one direction) or index,r1,r2,... (several).
inline Matrix load_directions(const std::filesystem::path& path) {
  const auto rows = read_csv_rows(path);
  if (rows.empty() || rows.front().size() < 2) throw InvalidInput("direction file is empty");
  const auto cols = static_cast<Index>(rows.front().size() - 1);
  Matrix r(static_cast<Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Index>(rows[i].size()) != cols + 1) {
      throw InvalidInput("direction file has ragged rows");
    }
    for (Index j = 0; j < cols; ++j) {
      r(static_cast<Index>(i), j) = std::stod(rows[i][static_cast<std::size_t>(j + 1)]);
    }
  }
  return r;
}

// "learned", "learned:k", "naive:k" -> named relaxations. Learned directions
// come from direction_file when set, otherwise from an in-process discovery.
inline std::vector<NamedRelaxation> parse_relaxations(const RunContext& ctx) {
  const Config& c = ctx.config;
  const auto words = c.get_words("relaxations");
  int learned_dims = 0;
  for (const auto& w : words) {
    if (w == "learned") learned_dims = std::max(learned_dims, 1);
    if (w.rfind("learned:", 0) == 0) learned_dims = std::max(learned_dims, std::stoi(w.substr(8)));
  }
  Matrix learned;
  if (learned_dims > 0) {
    if (!c.get("direction_file").empty()) {
      learned = load_directions(c.get("direction_file"));
    } else {
      ctx.msg() << "discovering " << learned_dims << " relaxation direction(s)\n";
      learned = directions_matrix(discover_sinusoid(c, learned_dims, ctx.threads));
    }
    if (learned.cols() < learned_dims) {
      throw InvalidInput("only " + std::to_string(learned.cols()) +
                         " learned directions available, " + std::to_string(learned_dims) +
                         " requested");
    }
  }
  std::vector<NamedRelaxation> out;
  for (const auto& w : words) {
    if (w == "learned") {
      out.push_back({"learned", LearnedDirection{learned.leftCols(1)}});
    } else if (w.rfind("learned:", 0) == 0) {
      const int k = std::stoi(w.substr(8));
      if (k < 1) throw InvalidInput("learned:k needs k >= 1");
      out.push_back({"learned" + std::to_string(k), LearnedDirection{learned.leftCols(k)}});
    } else if (w.rfind("naive:", 0) == 0) {
      const int k = std::stoi(w.substr(6));
      out.push_back({"naive" + std::to_string(k), NaivePoly{k}});
    } else {
      throw InvalidInput("unknown relaxation '" + w + "' (use learned, learned:k, naive:k)");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// profile

inline int cmd_profile(const RunContext& ctx) {
  const Config& c = ctx.config;
  const SinusoidModel model = make_sinusoid_model(c.get_double("sigma"));
  const double theta0 = c.get_double("theta0");
  check_sinusoid_theta(theta0);
  RandomStream rng = RandomStream(c.get_u64("seed")).child(0);
  const Dataset data = c.get_bool("noise_free")
                           ? Dataset::single(model.mean(Vector::Constant(1, theta0)))
                           : model.sample(Vector::Constant(1, theta0), 1, rng);
  const Index resolution = c.get_count("resolution", 2);
  const auto profile = negloglik_profile(model, data, resolution);
  const auto minima = enumerate_local_minima(model, data, resolution, 1e-4, optimizer_options(c));

  const auto dir = ctx.out_dir();
  const std::string stamp = c.stamp("profile");
  {
    CsvWriter w(dir / "data.csv", stamp, {"index", "x", "value"});
    const Vector x = sinusoid_grid();
    for (Index i = 0; i < data.dim(); ++i) w.row(static_cast<long long>(i), x[i], data.samples()(i, 0));
  }
  {
    CsvWriter w(dir / "profile.csv", stamp, {"theta", "negloglik"});
    for (const auto& r : profile) w.row(r.theta, r.negloglik);
  }
  {
    CsvWriter w(dir / "minima.csv", stamp, {"theta_min", "negloglik_min"});
    for (const auto& r : minima) w.row(r.theta, r.negloglik);
  }
  const auto best = global_minimum(minima);
  ctx.msg() << "profile: " << minima.size() << " local minima, global at theta=" << best.theta
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// roc

inline TrialOptions trial_options(const RunContext& ctx) {
  const Config& c = ctx.config;
  TrialOptions o;
  o.trials = static_cast<std::size_t>(c.get_count("trials"));
  o.sigma = c.get_double("sigma");
  o.theta0 = c.get_double("theta0");
  check_sinusoid_theta(o.theta0);
  o.bootstrap_replicates = static_cast<std::size_t>(c.get_count("bootstrap_B", 2));
  o.gap_replicates = static_cast<std::size_t>(c.get_count("gap_B", 2));
  o.alphas = c.get_list("alphas");
  for (double a : o.alphas) check_alpha(a);
  const std::string thr = c.get("threshold");
  if (thr == "asymptotic") {
    o.threshold_mode = ThresholdMode::asymptotic;
  } else if (thr == "empirical") {
    o.threshold_mode = ThresholdMode::empirical;
  } else {
    throw InvalidInput("threshold must be 'asymptotic' or 'empirical'");
  }
  const std::string start = c.get("start");
  if (start == "uniform") {
    o.start_mode = StartMode::uniform;
  } else if (start == "truth") {
    o.start_mode = StartMode::truth;
  } else {
    throw InvalidInput("start must be 'uniform' or 'truth'");
  }
  o.label_tol = c.get_double("label_tol");
  o.oracle_resolution = c.get_count("oracle_resolution", 2);
  o.optimizer = optimizer_options(c);
  o.relaxations = parse_relaxations(ctx);
  return o;
}

inline std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

inline int cmd_roc(const RunContext& ctx) {
  const Config& c = ctx.config;
  const TrialOptions opt = trial_options(ctx);
  const auto records = run_sinusoid_trials(opt, RandomStream(c.get_u64("seed")), ctx.threads);
  const auto summary = summarize_roc(records, opt.relaxations);
  const auto names = summary.tests;

  const auto dir = ctx.out_dir();
  const std::string stamp = c.stamp("roc");
  {
    CsvWriter w(dir / "trials.csv", stamp,
                {"trial", "truth_label", "stat_rao", "stat_two", "stat_one", "stat_gap"});
    for (const auto& r : records) {
      w.row(static_cast<long long>(r.trial), r.spurious ? "spurious" : "global", r.stat_rao,
            r.stat_two, r.stat_one, r.stat_gap.empty() ? TrialRecord::kMissing : r.stat_gap[0]);
    }
  }
  {
    std::vector<std::string> cols{"trial", "start", "theta_hat", "theta_global", "status",
                                  "truth_label", "loglik", "stat_rao", "stat_two", "stat_one"};
    for (const auto& rel : opt.relaxations) cols.push_back("stat_gap_" + rel.name);
    for (double a : opt.alphas) {
      for (const auto& n : names) cols.push_back("reject_" + n + "@" + format_number(a));
    }
    cols.push_back("note");
    CsvWriter w(dir / "trial_details.csv", stamp, cols);
    for (const auto& r : records) {
      std::vector<std::string> cells{std::to_string(r.trial),    format_number(r.start),
                                     format_number(r.theta_hat), format_number(r.theta_global),
                                     std::string(to_string(r.status)),
                                     r.spurious ? "spurious" : "global",
                                     format_number(r.loglik),    format_number(r.stat_rao),
                                     format_number(r.stat_two),  format_number(r.stat_one)};
      for (double g : r.stat_gap) cells.push_back(format_number(g));
      for (const auto& per_alpha : r.reject) {
        for (bool rej : per_alpha) cells.push_back(rej ? "1" : "0");
      }
      cells.push_back(csv_safe(r.note));
      w.row_vector(cells);
    }
  }
  {
    CsvWriter w(dir / "summary.csv", stamp,
                {"test", "auc", "alpha", "reject_rate_global", "reject_rate_spurious", "n_global",
                 "n_spurious", "n_excluded"});
    for (std::size_t t = 0; t < names.size(); ++t) {
      const double a_uc = summary.aucs.empty() ? TrialRecord::kMissing : summary.aucs[t];
      for (std::size_t a = 0; a < opt.alphas.size(); ++a) {
        w.row(names[t], a_uc, opt.alphas[a], rejection_rate(records, a, t, false),
              rejection_rate(records, a, t, true), static_cast<long long>(summary.n_h0()),
              static_cast<long long>(summary.n_h1()), static_cast<long long>(summary.excluded));
      }
    }
  }

  ctx.msg() << "roc: " << summary.n_h0() << " global, " << summary.n_h1() << " spurious, "
            << summary.excluded << " excluded trials\n";
  const auto min_spurious = static_cast<std::size_t>(c.get_count("min_spurious", 0));
  if (summary.curves.empty()) {
    ctx.msg() << "warning: a class is empty; no ROC curve written\n";
    return kExitWarning;
  }
  const auto grid = pfa_grid(0.01);
  {
    std::vector<std::string> cols{"pfa", "pd_two", "pd_one"};
    if (!opt.relaxations.empty()) cols.push_back("pd_gap");
    CsvWriter w(dir / "roc.csv", stamp, cols);
    for (double pfa : grid) {
      std::vector<std::string> cells{format_number(pfa),
                                     format_number(pd_at_pfa(summary.curves[1], pfa)),
                                     format_number(pd_at_pfa(summary.curves[2], pfa))};
      if (!opt.relaxations.empty()) cells.push_back(format_number(pd_at_pfa(summary.curves[3], pfa)));
      w.row_vector(cells);
    }
  }
  {
    std::vector<std::string> cols{"pfa"};
    for (const auto& n : names) cols.push_back("pd_" + n);
    CsvWriter w(dir / "roc_all.csv", stamp, cols);
    for (double pfa : grid) {
      std::vector<std::string> cells{format_number(pfa)};
      for (const auto& curve : summary.curves) cells.push_back(format_number(pd_at_pfa(curve, pfa)));
      w.row_vector(cells);
    }
  }
  for (std::size_t t = 0; t < names.size(); ++t) {
    ctx.msg() << "  auc " << names[t] << " = " << summary.aucs[t] << "\n";
  }
  if (summary.n_h1() < min_spurious) {
    ctx.msg() << "warning: only " << summary.n_h1() << " spurious trials (< " << min_spurious
              << "); ROC estimates are unreliable\n";
    return kExitWarning;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// discover

inline int cmd_discover(const RunContext& ctx) {
  const Config& c = ctx.config;
  const int dims = static_cast<int>(c.get_count("dims"));
  const auto dirs = discover_sinusoid(c, dims, ctx.threads);

  const auto dir = ctx.out_dir();
  const std::string stamp = c.stamp("discover");
  {
    CsvWriter w(dir / "direction.csv", stamp, {"index", "value"});
    const Vector& r = dirs.front().r;
    for (Index i = 0; i < r.size(); ++i) w.row(static_cast<long long>(i), r[i]);
  }
  if (dirs.size() > 1) {
    std::vector<std::string> cols{"index"};
    for (std::size_t j = 0; j < dirs.size(); ++j) cols.push_back("r" + std::to_string(j + 1));
    CsvWriter w(dir / "directions.csv", stamp, cols);
    for (Index i = 0; i < dirs.front().r.size(); ++i) {
      std::vector<std::string> cells{std::to_string(i)};
      for (const auto& d : dirs) cells.push_back(format_number(d.r[i]));
      w.row_vector(cells);
    }
  }
  {
    CsvWriter w(dir / "singular_values.csv", stamp, {"round", "index", "value"});
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const Vector& sv = dirs[k].singular_values;
      for (Index i = 0; i < sv.size(); ++i) {
        w.row(static_cast<long long>(k + 1), static_cast<long long>(i), sv[i]);
      }
    }
  }
  {
    CsvWriter w(dir / "discovery_summary.csv", stamp, {"round", "columns_used", "leading_singular_value"});
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      w.row(static_cast<long long>(k + 1), static_cast<long long>(dirs[k].columns_used),
            dirs[k].singular_values[0]);
    }
  }
  ctx.msg() << "discover: " << dirs.size() << " direction(s), " << dirs.front().columns_used
            << " spurious columns in round 1\n";
  if (static_cast<int>(dirs.size()) < dims) {
    ctx.msg() << "warning: only " << dirs.size() << " of " << dims
              << " directions found before the spurious minima ran out\n";
    return kExitWarning;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// wavefront

inline Vector random_rms_coeffs(Index k, double rms, RandomStream rng) {
  Vector v(k);
  for (Index i = 0; i < k; ++i) v[i] = rng.normal();
  return v * (rms / v.norm());
}

inline void write_grid(const std::filesystem::path& path, const std::string& stamp, const Matrix& m) {
  std::vector<std::string> cols;
  for (Index j = 0; j < m.cols(); ++j) cols.push_back("c" + std::to_string(j));
  CsvWriter w(path, stamp, cols);
  for (Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> cells;
    for (Index j = 0; j < m.cols(); ++j) cells.push_back(format_number(m(i, j)));
    w.row_vector(cells);
  }
}

struct BoundTrial {
  double max_epsilon = 0.0;
  double max_bound = 0.0;
  double min_slack = 0.0;
  long long violations = 0;
  double kernel_distance = 0.0;
  bool aligned_not_worse = true;  // bound with the on-axis phase <= bound with a = 1
};

inline BoundTrial check_bound(const PupilGrid& grid, const ZernikeCoeffs& screen,
                              const ZernikeCoeffs& beta) {
  const CMatrix g = coherent_psf(zernike_phase(screen, grid), grid);
  const auto aligned = psf_perturbation_bound(g, beta, grid);
  const auto plain = psf_perturbation_bound(g, beta, grid, Complex{1.0, 0.0});
  BoundTrial t;
  t.max_epsilon = aligned.epsilon.maxCoeff();
  t.max_bound = aligned.bound.maxCoeff();
  const Matrix slack = aligned.bound - aligned.epsilon;
  t.min_slack = slack.minCoeff();
  // a rounding allowance far below any pixel value of interest
  const double eps_tol = 1e-13 * std::max(1.0, t.max_bound);
  t.violations = (slack.array() < -eps_tol).count();
  t.kernel_distance = aligned.kernel_distance;
  t.aligned_not_worse = ((aligned.bound - plain.bound).array() <= eps_tol).all();
  return t;
}

inline int cmd_wavefront(const RunContext& ctx) {
  const Config& c = ctx.config;
  const RandomStream master(c.get_u64("seed"));
  const PupilGrid grid =
      circular_pupil(c.get_count("grid_size", 2), c.get_double("oversampling"));
  const Index k = c.get_count("modes");
  const auto taus = c.get_list("tau");
  const int points = static_cast<int>(c.get_count("shell_points"));
  int code = kExitOk;

  const auto dir = ctx.out_dir();
  const std::string stamp = c.stamp("wavefront");

  // Shells depend on (tau, K, grid) and the seed only, not on the other taus listed.
  std::vector<std::vector<ShellPoint>> shells(taus.size());
  parallel_for(taus.size(), ctx.threads, [&](std::size_t i) {
    shells[i] = max_strehl_shell(taus[i], k, grid, points, master.child(1));
  });
  {
    CsvWriter w(dir / "shells.csv", stamp, {"tau", "point_index", "noll_index", "coefficient", "strehl"});
    for (std::size_t i = 0; i < taus.size(); ++i) {
      for (std::size_t p = 0; p < shells[i].size(); ++p) {
        const auto& sp = shells[i][p];
        for (Index j = 0; j < sp.beta.size(); ++j) {
          w.row(taus[i], static_cast<long long>(p), static_cast<long long>(sp.beta.first_noll + j),
                sp.beta.coeffs[j], sp.strehl);
        }
      }
    }
  }

  if (c.get_bool("psf_dump")) {
    write_grid(dir / "psf_diffraction.csv", stamp,
               psf_from_phase(Matrix::Zero(grid.size, grid.size), grid).intensity);
    if (!taus.empty()) {
      const auto widest = static_cast<std::size_t>(
          std::max_element(taus.begin(), taus.end()) - taus.begin());
      write_grid(dir / "psf_shell.csv", stamp,
                 psf_from_phase(zernike_phase(shells[widest].front().beta, grid), grid).intensity);
    }
  }

  const auto bound_trials = static_cast<std::size_t>(c.get_count("bound_trials", 0));
  const double bound_tau = c.get_double("bound_tau");
  const double screen_rms = c.get_double("bound_screen_rms");
  std::vector<BoundTrial> bounds(bound_trials);
  parallel_for(bound_trials, ctx.threads, [&](std::size_t i) {
    const RandomStream s = master.child(2).child(i);
    const ZernikeCoeffs screen{random_rms_coeffs(k, screen_rms, s.child(0))};
    const ZernikeCoeffs beta{random_rms_coeffs(k, bound_tau, s.child(1))};
    bounds[i] = check_bound(grid, screen, beta);
  });
  long long violations = 0;
  {
    CsvWriter w(dir / "bound_report.csv", stamp,
                {"trial", "screen_rms", "tau", "max_epsilon", "max_bound", "min_slack",
                 "violations", "kernel_distance", "aligned_not_worse"});
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      const auto& b = bounds[i];
      violations += b.violations;
      w.row(static_cast<long long>(i), screen_rms, bound_tau, b.max_epsilon, b.max_bound,
            b.min_slack, b.violations, b.kernel_distance, b.aligned_not_worse);
    }
  }
  ctx.msg() << "wavefront: " << taus.size() << " shells, " << violations
            << " bound violations over " << bound_trials << " perturbations\n";
  if (violations > 0) code = kExitWarning;

  if (c.get_bool("toy")) {
    const Index toy_k = c.get_count("toy_modes");
    const PsfModel model(PsfMean(circular_pupil(c.get_count("toy_grid", 2)), toy_k,
                                 c.get_double("toy_flux")),
                         c.get_double("toy_sigma"));
    const ZernikeCoeffs truth{random_rms_coeffs(toy_k, c.get_double("toy_rms"), master.child(3))};
    const Dataset data = Dataset::single(model.mean(truth.coeffs));

    RestartOptions ro;
    ro.tau = c.get_double("toy_tau");
    ro.shell_points = static_cast<int>(c.get_count("toy_shell_points"));
    ro.max_restarts = static_cast<int>(c.get_count("toy_restarts", 0));
    ro.alpha = c.get_double("toy_alpha");
    check_alpha(ro.alpha);
    ro.gap_replicates = static_cast<std::size_t>(c.get_count("toy_gap_B", 2));
    ro.optimizer = optimizer_options(c);
    // waves; without a cap the quasi-Newton steps hop across phase-wrapping basins
    ro.optimizer.max_step = c.get_double("toy_max_step");
    ro.optimizer.tol = c.get_double("toy_tol");  // gradients scale as 1/sigma^2
    if (!(ro.optimizer.tol > 0.0)) throw InvalidInput("toy_tol must be positive");
    if (!(ro.optimizer.max_step > 0.0)) throw InvalidInput("toy_max_step must be positive");
    const auto shell = max_strehl_shell(ro.tau, toy_k, model.mean_function().grid(),
                                        ro.shell_points, master.child(1));
    const auto outcome =
        restart_search(model, data, ZernikeCoeffs::zeros(toy_k), shell, ro, master.child(4));

    const Vector truth_mean = model.mean(truth.coeffs);
    const auto psf_error = [&](const ZernikeCoeffs& b) {
      return (model.mean(b.coeffs) - truth_mean).norm();
    };
    {
      CsvWriter w(dir / "restart_log.csv", stamp,
                  {"step", "restart", "negloglik", "status", "statistic", "threshold", "decision",
                   "psf_error"});
      for (std::size_t i = 0; i < outcome.steps.size(); ++i) {
        const auto& s = outcome.steps[i];
        w.row(static_cast<long long>(i), static_cast<long long>(s.restart), s.negloglik,
              std::string(to_string(s.status)),
              s.test ? s.test->statistic : TrialRecord::kMissing,
              s.test ? s.test->threshold : TrialRecord::kMissing,
              s.test ? std::string(to_string(s.test->decision)) : std::string("none"),
              psf_error(s.found));
      }
    }
    {
      CsvWriter w(dir / "toy_coefficients.csv", stamp, {"noll_index", "truth", "estimate"});
      for (Index j = 0; j < toy_k; ++j) {
        w.row(static_cast<long long>(kDefocusNoll + j), truth.coeffs[j], outcome.estimate.coeffs[j]);
      }
    }
    const double err = psf_error(outcome.estimate);
    {
      CsvWriter w(dir / "toy_summary.csv", stamp,
                  {"accepted", "restarts", "psf_error", "relative_psf_error", "tolerance"});
      w.row(outcome.accepted, static_cast<long long>(outcome.restarts), err,
            err / truth_mean.norm(), ro.optimizer.tol);
    }
    ctx.msg() << "toy: " << (outcome.accepted ? "accepted" : "not accepted") << " after "
              << outcome.restarts << " restarts, PSF error " << err << "\n";
    if (!outcome.accepted) code = kExitWarning;
  }
  return code;
}

inline int run_command(const std::string& command, const RunContext& ctx) {
  if (command == "profile") return cmd_profile(ctx);
  if (command == "roc") return cmd_roc(ctx);
  if (command == "discover") return cmd_discover(ctx);
  if (command == "wavefront") return cmd_wavefront(ctx);
  throw InvalidInput("unknown command '" + command + "'");
}

}  // namespace locmin
