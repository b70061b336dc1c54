// Slow: many noisy sinusoid fits from uniform starts.
#include "locmin/experiment.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace locmin;

TEST(MonteCarlo, LearnedGapDetectsMoreSpuriousMinimaThanTwoSided) {
  RunContext ctx;
  std::ostringstream sink;
  ctx.log = &sink;
  ctx.config.set("trials", "1000");
  ctx.config.set("bootstrap_B", "200");
  ctx.config.set("gap_B", "100");
  ctx.config.set("alphas", "0.05");
  ctx.config.set("relaxations", "learned");
  const TrialOptions opt = trial_options(ctx);
  const auto records = run_sinusoid_trials(opt, RandomStream(77), 1);
  const auto s = summarize_roc(records, opt.relaxations);
  ASSERT_GE(s.n_h1(), 300u);
  ASSERT_GE(s.n_h0(), 300u);
  const std::size_t two = s.index_of("two");
  const std::size_t gap = s.index_of("gap_learned");
  const double pd_two = rejection_rate(records, 0, two, true);
  const double pd_gap = rejection_rate(records, 0, gap, true);
  EXPECT_GT(pd_gap, pd_two);
  EXPECT_LE(rejection_rate(records, 0, gap, false), 0.1);
  EXPECT_GT(s.aucs[gap], s.aucs[two]);
}
