#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "advdet/common.hpp"

namespace advdet {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct RocResult {
  double auroc = 0.5;
  std::vector<RocPoint> points;
};

/// Separation of clean (expected high) from adversarial (expected low)
/// scores. AUROC is the tie-corrected Mann-Whitney statistic: the
/// probability that a random clean score exceeds a random adversarial one,
/// counting ties as one half. Points trace (FPR, TPR) of the
/// flag-below-threshold detector over every candidate threshold.
inline RocResult evaluate_detector(const std::vector<double>& clean_scores,
                                   const std::vector<double>& adv_scores) {
  require(!clean_scores.empty() && !adv_scores.empty(), ErrorCode::InvalidArgument,
          "evaluate_detector: both score sets must be nonempty");

  struct Tagged {
    double score;
    bool clean;
  };
  std::vector<Tagged> all;
  all.reserve(clean_scores.size() + adv_scores.size());
  for (double s : clean_scores) all.push_back({s, true});
  for (double s : adv_scores) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Tagged& a, const Tagged& b) { return a.score < b.score; });

  // Average ranks across ties, sum the clean ranks.
  double clean_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based inclusive mean
    for (std::size_t t = i; t < j; ++t) {
      if (all[t].clean) clean_rank_sum += avg_rank;
    }
    i = j;
  }
  const double n1 = static_cast<double>(clean_scores.size());
  const double n2 = static_cast<double>(adv_scores.size());
  const double u = clean_rank_sum - n1 * (n1 + 1.0) / 2.0;

  RocResult result;
  result.auroc = u / (n1 * n2);

  // Candidate thresholds: every distinct score, plus one past the maximum so
  // the curve reaches (1,1). Flagged = score < T.
  std::vector<double> thresholds;
  for (const auto& t : all) {
    if (thresholds.empty() || thresholds.back() != t.score) thresholds.push_back(t.score);
  }
  thresholds.push_back(std::nextafter(thresholds.back(), std::numeric_limits<double>::max()));

  result.points.push_back({0.0, 0.0, thresholds.front()});
  for (double t : thresholds) {
    const auto below = [t](const std::vector<double>& xs) {
      return static_cast<double>(std::count_if(xs.begin(), xs.end(),
                                               [t](double x) { return x < t; }));
    };
    result.points.push_back({below(clean_scores) / n1, below(adv_scores) / n2, t});
  }
  return result;
}

}  // namespace advdet
