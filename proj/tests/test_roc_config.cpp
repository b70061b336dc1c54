#include "locmin/config.hpp"
#include "locmin/csv.hpp"
#include "locmin/roc.hpp"
#include "locmin/trials.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace locmin;

TEST(Roc, PerfectSeparation) {
  const std::vector<double> h0{0.1, 0.2, 0.3};
  const std::vector<double> h1{0.5, 0.9};
  EXPECT_DOUBLE_EQ(auc(h0, h1), 1.0);
  const auto curve = roc_curve(h0, h1);
  EXPECT_EQ(curve.front().pfa, 0.0);
  EXPECT_EQ(curve.front().pd, 0.0);
  EXPECT_EQ(curve.back().pfa, 1.0);
  EXPECT_EQ(curve.back().pd, 1.0);
  EXPECT_DOUBLE_EQ(pd_at_pfa(curve, 0.0), 1.0);
}

TEST(Roc, IdenticalScoresGiveHalf) {
  const std::vector<double> s{1.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(auc(s, s), 0.5);
  const auto curve = roc_curve(s, s);
  ASSERT_EQ(curve.size(), 2u);  // one tie block moves both rates together
  EXPECT_DOUBLE_EQ(pd_at_pfa(curve, 0.5), 0.0);
}

TEST(Roc, MonotoneCurveAndAucMatchesTrapezoid) {
  RandomStream rng(3);
  std::vector<double> h0;
  std::vector<double> h1;
  for (int i = 0; i < 300; ++i) h0.push_back(std::round(rng.normal() * 4.0) / 4.0);
  for (int i = 0; i < 200; ++i) h1.push_back(std::round((rng.normal() + 1.0) * 4.0) / 4.0);
  const auto curve = roc_curve(h0, h1);
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_GE(curve[i].pfa, curve[i - 1].pfa);
    EXPECT_GE(curve[i].pd, curve[i - 1].pd);
    area += (curve[i].pfa - curve[i - 1].pfa) * (curve[i].pd + curve[i - 1].pd) / 2.0;
  }
  EXPECT_NEAR(auc(h0, h1), area, 1e-12);
  const auto grid = pfa_grid(0.01);
  double prev = 0.0;
  for (double p : grid) {
    const double pd = pd_at_pfa(curve, p);
    EXPECT_GE(pd, prev);
    prev = pd;
  }
}

TEST(Roc, Errors) {
  EXPECT_THROW(roc_curve({}, {1.0}), EmptyCollection);
  EXPECT_THROW(auc({1.0}, {}), EmptyCollection);
  EXPECT_THROW(roc_curve({std::nan("")}, {1.0}), InvalidInput);
  EXPECT_THROW(pfa_grid(0.0), InvalidInput);
  EXPECT_EQ(pfa_grid(0.25).size(), 5u);
}

TEST(RocSummary, ScoresOrientedAndUnusableExcluded) {
  std::vector<TrialRecord> recs(4);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i].trial = i;
    recs[i].spurious = i >= 2;
    recs[i].stat_rao = 0.1;
    recs[i].stat_two = recs[i].spurious ? 9.0 : 0.5;
    recs[i].stat_one = recs[i].spurious ? -3.0 : 0.2;
    recs[i].stat_gap = {recs[i].spurious ? 5.0 : -1.0};
    recs[i].reject = {{false, recs[i].spurious, recs[i].spurious, recs[i].spurious}};
  }
  recs[3].status = OptimizeStatus::max_iter;
  const std::vector<NamedRelaxation> rel{{"learned", NaivePoly{1}}};
  const auto s = summarize_roc(recs, rel);
  EXPECT_EQ(s.excluded, 1u);
  EXPECT_EQ(s.n_h0(), 2u);
  EXPECT_EQ(s.n_h1(), 1u);
  EXPECT_EQ(s.tests, (std::vector<std::string>{"rao", "two", "one", "gap_learned"}));
  EXPECT_DOUBLE_EQ(s.aucs[s.index_of("one")], 1.0);
  EXPECT_DOUBLE_EQ(s.aucs[s.index_of("rao")], 0.5);
  EXPECT_DOUBLE_EQ(rejection_rate(recs, 0, 1, false), 0.0);
  EXPECT_DOUBLE_EQ(rejection_rate(recs, 0, 1, true), 1.0);
}

TEST(Config, DefaultsAndOverrides) {
  Config c = Config::defaults();
  EXPECT_EQ(c.get_int("trials"), 2000);
  c.set_assignment(" trials = 12 ");
  EXPECT_EQ(c.get_count("trials"), 12);
  EXPECT_THROW(c.set("no_such_key", "1"), InvalidInput);
  EXPECT_THROW(c.set_assignment("trials"), InvalidInput);
  c.set("alphas", "0.05, 0.1,0.2");
  EXPECT_EQ(c.get_list("alphas"), (std::vector<double>{0.05, 0.1, 0.2}));
  c.set("trials", "abc");
  EXPECT_THROW(c.get_int("trials"), InvalidInput);
  c.set("trials", "0");
  EXPECT_THROW(c.get_count("trials"), InvalidInput);
  EXPECT_TRUE(c.get_bool("toy"));
  c.set("toy", "maybe");
  EXPECT_THROW(c.get_bool("toy"), InvalidInput);
}

TEST(Config, FileLoadingReportsLine) {
  std::istringstream good("# comment\nseed = 9  # trailing\n\ntrials=5\n");
  Config c = Config::defaults();
  c.load(good, "good.cfg");
  EXPECT_EQ(c.get_u64("seed"), 9u);
  EXPECT_EQ(c.get_int("trials"), 5);
  std::istringstream bad("seed = 1\nbogus = 2\n");
  try {
    c.load(bad, "bad.cfg");
    FAIL() << "unknown key accepted";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("bad.cfg:2"), std::string::npos);
  }
}

TEST(Config, HashIgnoresOutputDirectory) {
  Config a = Config::defaults();
  Config b = Config::defaults();
  b.set("out", "elsewhere");
  EXPECT_EQ(a.hash(), b.hash());
  b.set("seed", "2");
  EXPECT_NE(a.hash(), b.hash());
  const std::string stamp = a.stamp("roc");
  EXPECT_EQ(stamp.rfind("# locmin roc\n# config_hash=" + a.hash_hex() + "\n# seed=1\n", 0), 0u);
  EXPECT_NE(stamp.find("# trials=2000\n"), std::string::npos);
}

TEST(Csv, RoundTripAndFormatting) {
  const auto dir = std::filesystem::temp_directory_path() / "locmin_csv_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "t.csv";
  {
    CsvWriter w(path, "# stamp\n", {"a", "b", "c", "d"});
    w.row(1, 0.1, true, std::string("x"));
    w.row(2LL, std::nan(""), false, "y");
  }
  const auto rows = read_csv_rows(path);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"1", "0.1", "1", "x"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"2", "nan", "0", "y"}));
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_number(-kInf), "-inf");
  std::filesystem::remove_all(dir);
  EXPECT_THROW(read_csv_rows(dir / "missing.csv"), InvalidInput);
}
