#pragma once

#include <cmath>

#include "advdet/detect/reference.hpp"
#include "advdet/model/classifier.hpp"

namespace advdet {

enum class DetectionMetric { Confidence, NonMaxEntropy, KernelDensity };

inline const char* to_string(DetectionMetric m) {
  switch (m) {
    case DetectionMetric::Confidence: return "confidence";
    case DetectionMetric::NonMaxEntropy: return "non_me";
    case DetectionMetric::KernelDensity: return "k_density";
  }
  return "unknown";
}

inline DetectionMetric detection_metric_from_string(const std::string& s) {
  if (s == "confidence") return DetectionMetric::Confidence;
  if (s == "non_me" || s == "non-me") return DetectionMetric::NonMaxEntropy;
  if (s == "k_density" || s == "kd") return DetectionMetric::KernelDensity;
  fail(ErrorCode::InvalidArgument, "unknown detection metric: " + s);
}

/// Probability assigned to the predicted class.
inline double confidence_score(const Eigen::VectorXd& p) {
  validate_prob_vector(p);
  return p[argmax(p)];
}

/// Sum over non-predicted classes of p * ln(p), with 0 * ln(0) = 0. The
/// formula carries no leading minus, so the result is <= 0 and larger (nearer
/// zero) values indicate cleaner inputs under the above-threshold-is-normal
/// rule — except at one-hot inputs where it attains exactly 0.
inline double non_max_entropy(const Eigen::VectorXd& p) {
  validate_prob_vector(p);
  const int top = argmax(p);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (static_cast<int>(i) == top || p[i] <= 0.0) continue;
    sum += p[i] * std::log(p[i]);
  }
  return sum;
}

/// RBF kernel density of z against the stored clean features of class
/// y_hat: sum_i exp(-||z_i - z||^2 / (2 sigma^2)).
inline double kernel_density(const Eigen::VectorXd& z, int y_hat, const ReferenceSet& ref) {
  ref.validate();
  auto it = ref.per_class.find(y_hat);
  require(it != ref.per_class.end(), ErrorCode::Validation,
          "no reference features for class " + std::to_string(y_hat) +
              " (untrained or unknown class)");
  const Eigen::MatrixXd& bank = it->second;
  require(bank.rows() == z.size(), ErrorCode::InvalidArgument,
          "kernel_density: feature dimension mismatch");
  const double inv = 1.0 / (2.0 * ref.bandwidth * ref.bandwidth);
  const Eigen::MatrixXd diff = bank.colwise() - z;
  const Eigen::ArrayXd sq = diff.colwise().squaredNorm().transpose().array();
  return (-sq * inv).exp().sum();
}

struct DetectionScores {
  double confidence = 0.0;
  double non_me = 0.0;
  double k_density = 0.0;
  int predicted_class = -1;

  double get(DetectionMetric m) const {
    switch (m) {
      case DetectionMetric::Confidence: return confidence;
      case DetectionMetric::NonMaxEntropy: return non_me;
      case DetectionMetric::KernelDensity: return k_density;
    }
    return 0.0;
  }
};

/// All three statistics for one input. The kernel density is evaluated
/// against the reference bank of the *predicted* class.
template <typename Scalar>
DetectionScores score_input(const ClassifierModel<Scalar>& model, const TensorImage<Scalar>& x,
                            const ReferenceSet& ref) {
  const ForwardResult<Scalar> fwd = model.forward(x);
  const Eigen::VectorXd p = softmax(fwd.logits).template cast<double>();
  DetectionScores s;
  s.predicted_class = argmax(p);
  s.confidence = confidence_score(p);
  s.non_me = non_max_entropy(p);
  s.k_density = kernel_density(fwd.z.template cast<double>(), s.predicted_class, ref);
  return s;
}

}  // namespace advdet
