#pragma once

#include <cstdint>
#include <Eigen/Dense>

#include "advdet/common.hpp"

namespace advdet {

inline constexpr int kIgnoreLabel = 255;

/// Dense H x W label assignment. Entries are class ids in [0, num_classes)
/// or ignore_value, which is excluded from every loss and metric.
struct LabelMap {
  Eigen::MatrixXi labels;  // H x W
  int num_classes = 0;
  int ignore_value = kIgnoreLabel;

  LabelMap() = default;
  LabelMap(int h, int w, int k, int ignore = kIgnoreLabel)
      : labels(Eigen::MatrixXi::Zero(h, w)), num_classes(k), ignore_value(ignore) {}

  int height() const { return static_cast<int>(labels.rows()); }
  int width() const { return static_cast<int>(labels.cols()); }

  void validate() const {
    require(num_classes >= 1, ErrorCode::Validation, "LabelMap needs num_classes >= 1");
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
      int v = labels.data()[i];
      require((v >= 0 && v < num_classes) || v == ignore_value, ErrorCode::Validation,
              "LabelMap entry " + std::to_string(v) + " outside [0, " +
                  std::to_string(num_classes) + ") and not the ignore value");
    }
  }
};

/// K x K integer tally with rows indexing ground truth and columns indexing
/// prediction. All ratio metrics in this module derive from it.
struct ConfusionMatrix {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
  std::int64_t ignored_pixels = 0;

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int num_classes)
      : counts(Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(num_classes,
                                                                                 num_classes)) {}

  int num_classes() const { return static_cast<int>(counts.rows()); }
  std::int64_t total() const { return counts.sum(); }
  std::int64_t row_sum(int c) const { return counts.row(c).sum(); }
  std::int64_t col_sum(int c) const { return counts.col(c).sum(); }
};

/// Tallies one prediction/truth pair into cm. Pixels where truth carries the
/// ignore value bump ignored_pixels and contribute to nothing else.
inline ConfusionMatrix& accumulate(ConfusionMatrix& cm, const LabelMap& pred,
                                   const LabelMap& truth) {
  require(cm.num_classes() == truth.num_classes && cm.num_classes() == pred.num_classes,
          ErrorCode::InvalidArgument, "confusion accumulation: class-count mismatch");
  require(pred.labels.rows() == truth.labels.rows() && pred.labels.cols() == truth.labels.cols(),
          ErrorCode::InvalidArgument, "confusion accumulation: shape mismatch");
  const int k = cm.num_classes();
  for (Eigen::Index i = 0; i < truth.labels.size(); ++i) {
    const int t = truth.labels.data()[i];
    if (t == truth.ignore_value) {
      ++cm.ignored_pixels;
      continue;
    }
    const int p = pred.labels.data()[i];
    require(t >= 0 && t < k, ErrorCode::Validation, "truth label out of range");
    require(p >= 0 && p < k, ErrorCode::Validation, "predicted label out of range");
    ++cm.counts(t, p);
  }
  return cm;
}

/// Elementwise-additive merge; enables sharded accumulation.
inline ConfusionMatrix merge(const ConfusionMatrix& a, const ConfusionMatrix& b) {
  require(a.num_classes() == b.num_classes(), ErrorCode::InvalidArgument,
          "confusion merge: class-count mismatch");
  ConfusionMatrix out(a.num_classes());
  out.counts = a.counts + b.counts;
  out.ignored_pixels = a.ignored_pixels + b.ignored_pixels;
  return out;
}

}  // namespace advdet
