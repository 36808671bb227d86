#pragma once

#include <algorithm>
#include <vector>

#include "advdet/detect/scores.hpp"

namespace advdet {

/// Decision rule: score >= T is normal, score < T is adversarial.
struct ThresholdPolicy {
  DetectionMetric metric = DetectionMetric::KernelDensity;
  double threshold = 0.0;
  double target_fpr = 0.05;
  int calibration_set_size = 0;
};

enum class Verdict { Clean, Adversarial };

inline const char* to_string(Verdict v) { return v == Verdict::Clean ? "clean" : "adversarial"; }

struct DetectionReport {
  DetectionScores scores;
  ThresholdPolicy policy;
  Verdict verdict = Verdict::Clean;
  double margin = 0.0;  // score - threshold; clean iff margin >= 0
};

/// Linear-interpolation quantile between order statistics (position
/// p * (N - 1) over the sorted sample).
inline double interpolated_quantile(std::vector<double> values, double q) {
  require(!values.empty(), ErrorCode::InvalidArgument, "quantile of empty sample");
  require(q >= 0.0 && q <= 1.0, ErrorCode::InvalidArgument, "quantile level outside [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

/// Sets T at the lower-tail target_fpr quantile of clean scores, so the
/// fraction of clean calibration inputs falling strictly below T (and hence
/// flagged) stays within target_fpr + 1/N.
inline ThresholdPolicy calibrate_threshold(const std::vector<double>& clean_scores,
                                           double target_fpr, DetectionMetric metric) {
  require(clean_scores.size() >= 20, ErrorCode::InvalidArgument,
          "calibration needs at least 20 clean scores, got " +
              std::to_string(clean_scores.size()));
  require(target_fpr > 0.0 && target_fpr < 1.0, ErrorCode::InvalidArgument,
          "target_fpr must lie in (0,1)");
  ThresholdPolicy policy;
  policy.metric = metric;
  policy.target_fpr = target_fpr;
  policy.calibration_set_size = static_cast<int>(clean_scores.size());
  policy.threshold = interpolated_quantile(clean_scores, target_fpr);
  return policy;
}

inline DetectionReport render_verdict(const DetectionScores& scores,
                                      const ThresholdPolicy& policy) {
  DetectionReport report;
  report.scores = scores;
  report.policy = policy;
  report.margin = scores.get(policy.metric) - policy.threshold;
  report.verdict = report.margin >= 0.0 ? Verdict::Clean : Verdict::Adversarial;
  return report;
}

/// Scores x with the policy's metric and renders the verdict.
template <typename Scalar>
DetectionReport detect(const TensorImage<Scalar>& x, const ClassifierModel<Scalar>& model,
                       const ReferenceSet& ref, const ThresholdPolicy& policy) {
  for (const auto& [cls, bank] : ref.per_class) {
    require(cls >= 0 && cls < model.num_classes(), ErrorCode::InvalidArgument,
            "reference set class " + std::to_string(cls) + " outside the model's class space");
    require(bank.rows() == model.feature_dim(), ErrorCode::InvalidArgument,
            "reference set feature dimension does not match the model");
  }
  return render_verdict(score_input(model, x, ref), policy);
}

}  // namespace advdet
