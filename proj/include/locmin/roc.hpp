#pragma once

// Empirical ROC curves from detection scores (larger score = more evidence
// that the optimum is spurious), built by sweeping the threshold over the
// observed scores.

#include "locmin/types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace locmin {

struct RocPoint {
  double pfa = 0.0;
  double pd = 0.0;
};

// Operating points for every distinct threshold, from (0, 0) to (1, 1).
// Ties between classes move pfa and pd together.
inline std::vector<RocPoint> roc_curve(const std::vector<double>& scores_h0,
                                       const std::vector<double>& scores_h1) {
  if (scores_h0.empty() || scores_h1.empty()) {
    throw EmptyCollection("roc_curve: need scores from both classes");
  }
  struct Item {
    double score;
    bool h1;
  };
  std::vector<Item> items;
  items.reserve(scores_h0.size() + scores_h1.size());
  for (double s : scores_h0) items.push_back({s, false});
  for (double s : scores_h1) items.push_back({s, true});
  for (const auto& it : items) {
    if (std::isnan(it.score)) throw InvalidInput("roc_curve: NaN score");
  }
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.score > b.score; });

  const double n0 = static_cast<double>(scores_h0.size());
  const double n1 = static_cast<double>(scores_h1.size());
  std::vector<RocPoint> curve{{0.0, 0.0}};
  std::size_t fa = 0;
  std::size_t det = 0;
  for (std::size_t i = 0; i < items.size();) {
    const double s = items[i].score;
    while (i < items.size() && items[i].score == s) {
      (items[i].h1 ? det : fa) += 1;
      ++i;
    }
    curve.push_back({static_cast<double>(fa) / n0, static_cast<double>(det) / n1});
  }
  return curve;
}

// Best detection probability with false-alarm probability <= pfa.
inline double pd_at_pfa(const std::vector<RocPoint>& curve, double pfa) {
  double best = 0.0;
  for (const auto& p : curve) {
    if (p.pfa <= pfa + 1e-12) best = std::max(best, p.pd);
  }
  return best;
}

// Area under the curve as the Mann-Whitney probability P(s1 > s0) + P(s1 = s0) / 2.
inline double auc(const std::vector<double>& scores_h0, const std::vector<double>& scores_h1) {
  if (scores_h0.empty() || scores_h1.empty()) {
    throw EmptyCollection("auc: need scores from both classes");
  }
  std::vector<double> s0 = scores_h0;
  std::sort(s0.begin(), s0.end());
  double sum = 0.0;
  for (double s : scores_h1) {
    const auto lo = std::lower_bound(s0.begin(), s0.end(), s);
    const auto hi = std::upper_bound(s0.begin(), s0.end(), s);
    sum += static_cast<double>(lo - s0.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return sum / (static_cast<double>(s0.size()) * static_cast<double>(scores_h1.size()));
}

// pfa = 0, step, 2 step, ..., 1.
inline std::vector<double> pfa_grid(double step = 0.01) {
  if (!(step > 0.0 && step <= 1.0)) throw InvalidInput("pfa_grid: step must lie in (0, 1]");
  std::vector<double> grid;
  const auto n = static_cast<int>(std::llround(1.0 / step));
  for (int i = 0; i <= n; ++i) grid.push_back(std::min(1.0, i * step));
  return grid;
}

}  // namespace locmin
