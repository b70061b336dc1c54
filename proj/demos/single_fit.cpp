// One noisy sinusoid data set, fit from a few starts, each minimum checked by
// every test. Usage: single_fit [seed]

#include "locmin/locmin.hpp"

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
  using namespace locmin;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;
  const RandomStream master(seed);

  const SinusoidModel model = make_sinusoid_model(1.0);
  RandomStream data_rng = master.child(0);
  const Dataset data = model.sample(Vector::Constant(1, kSinusoidTheta0), 1, data_rng);
  const auto minima = enumerate_local_minima(model, data);
  const double theta_global = global_minimum(minima).theta;
  std::printf("local minima of -l: %zu, global at theta=%.6f\n", minima.size(), theta_global);

  std::printf("learning a relaxation direction...\n");
  const auto cfg = sinusoid_discovery_config(100, 64, false, 1e-3);
  const Vector r = discover_relaxation_direction(cfg, model).r;
  const GaussianLocationModel<AnyEmbedding> relaxed(
      make_embedding(LearnedDirection{Matrix(r)}), model.sigma());

  const double alpha = 0.05;
  std::printf("%8s %10s %9s %9s %9s %9s\n", "start", "theta_hat", "global?", "two", "one", "gap");
  for (double start : {0.5, 4.0, 8.0, 11.0}) {
    const auto fit = minimize_negloglik(model, data, Vector::Constant(1, start));
    const Vector th = fit.minimizer.values();
    const double ell = -fit.objective_value;
    const auto moments = bootstrap_moments(model, th, 500, master.child(1));
    const auto two = two_sided_test(ell, moments, alpha);
    const auto one = one_sided_test(ell, moments, alpha);
    const auto gap = gap_test(model, relaxed, data, th, 200, alpha, master.child(2));
    std::printf("%8.2f %10.5f %9s %9s %9s %9s\n", start, th[0],
                std::abs(th[0] - theta_global) < 1e-3 ? "yes" : "no",
                two.rejected() ? "reject" : "accept", one.rejected() ? "reject" : "accept",
                gap.rejected() ? "reject" : "accept");
  }
  return 0;
}
