#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "advdet/metrics/confusion.hpp"

namespace advdet {

// Classes whose denominator is zero (absent from both prediction and truth,
// or empty row/column) are excluded from macro means and reported as
// std::nullopt rather than being scored as zero.

inline std::vector<std::optional<double>> iou_per_class(const ConfusionMatrix& cm) {
  const int k = cm.num_classes();
  std::vector<std::optional<double>> out(k);
  for (int c = 0; c < k; ++c) {
    const std::int64_t tp = cm.counts(c, c);
    const std::int64_t uni = cm.row_sum(c) + cm.col_sum(c) - tp;
    if (uni > 0) out[c] = static_cast<double>(tp) / static_cast<double>(uni);
  }
  return out;
}

inline std::optional<double> mean_of_defined(const std::vector<std::optional<double>>& xs) {
  double sum = 0.0;
  int n = 0;
  for (const auto& x : xs) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

inline std::optional<double> miou(const ConfusionMatrix& cm) {
  return mean_of_defined(iou_per_class(cm));
}

inline std::vector<std::optional<double>> dice_per_class(const ConfusionMatrix& cm) {
  const int k = cm.num_classes();
  std::vector<std::optional<double>> out(k);
  for (int c = 0; c < k; ++c) {
    const std::int64_t tp = cm.counts(c, c);
    const std::int64_t fp = cm.col_sum(c) - tp;
    const std::int64_t fn = cm.row_sum(c) - tp;
    const std::int64_t denom = 2 * tp + fp + fn;
    if (denom > 0) out[c] = 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  }
  return out;
}

/// Macro-averaged Dice over classes with nonzero denominator; the `mF1`
/// report column.
inline std::optional<double> dice_f1(const ConfusionMatrix& cm) {
  return mean_of_defined(dice_per_class(cm));
}

inline std::optional<double> pixel_accuracy(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (total == 0) return std::nullopt;
  return static_cast<double>(cm.counts.trace()) / static_cast<double>(total);
}

/// Mean per-class recall; rows with no support are excluded.
inline std::optional<double> mean_class_accuracy(const ConfusionMatrix& cm) {
  const int k = cm.num_classes();
  std::vector<std::optional<double>> acc(k);
  for (int c = 0; c < k; ++c) {
    const std::int64_t row = cm.row_sum(c);
    if (row > 0) acc[c] = static_cast<double>(cm.counts(c, c)) / static_cast<double>(row);
  }
  return mean_of_defined(acc);
}

/// Mean per-class precision; columns never predicted are excluded. Used by
/// the epoch logger alongside mean_class_accuracy (macro recall) and dice_f1.
inline std::optional<double> macro_precision(const ConfusionMatrix& cm) {
  const int k = cm.num_classes();
  std::vector<std::optional<double>> p(k);
  for (int c = 0; c < k; ++c) {
    const std::int64_t col = cm.col_sum(c);
    if (col > 0) p[c] = static_cast<double>(cm.counts(c, c)) / static_cast<double>(col);
  }
  return mean_of_defined(p);
}

/// Mean of -ln p[target] over non-ignore pixels. `probs` holds one row per
/// pixel in row-major (y * W + x) order and K columns; rows must lie on the
/// probability simplex within 1e-5. Returns nullopt when every pixel is
/// ignored.
inline std::optional<double> ce_loss(const Eigen::MatrixXd& probs, const LabelMap& target) {
  const Eigen::Index pixels = static_cast<Eigen::Index>(target.height()) * target.width();
  require(probs.rows() == pixels, ErrorCode::InvalidArgument,
          "ce_loss: probability rows do not match target pixel count");
  require(probs.cols() == target.num_classes, ErrorCode::InvalidArgument,
          "ce_loss: probability columns do not match class count");
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    require(std::abs(probs.row(i).sum() - 1.0) <= 1e-5, ErrorCode::Validation,
            "ce_loss: probability row does not sum to 1");
  }
  double sum = 0.0;
  std::int64_t n = 0;
  for (int y = 0; y < target.height(); ++y) {
    for (int x = 0; x < target.width(); ++x) {
      const int t = target.labels(y, x);
      if (t == target.ignore_value) continue;
      require(t >= 0 && t < target.num_classes, ErrorCode::Validation,
              "ce_loss: target label out of range");
      const double p = probs(static_cast<Eigen::Index>(y) * target.width() + x, t);
      sum += -std::log(std::max(p, 1e-300));
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

/// Class ids present in baseline predictions but absent from adversarial
/// predictions, unioned over the whole batch.
inline std::set<int> lost_classes(const std::vector<LabelMap>& baseline_pred,
                                  const std::vector<LabelMap>& adv_pred) {
  require(baseline_pred.size() == adv_pred.size(), ErrorCode::InvalidArgument,
          "lost_classes: image sets differ in size");
  auto collect = [](const std::vector<LabelMap>& maps) {
    std::set<int> classes;
    for (const auto& m : maps) {
      for (Eigen::Index i = 0; i < m.labels.size(); ++i) {
        const int v = m.labels.data()[i];
        if (v != m.ignore_value) classes.insert(v);
      }
    }
    return classes;
  };
  for (std::size_t i = 0; i < baseline_pred.size(); ++i) {
    require(baseline_pred[i].labels.rows() == adv_pred[i].labels.rows() &&
                baseline_pred[i].labels.cols() == adv_pred[i].labels.cols(),
            ErrorCode::InvalidArgument, "lost_classes: image shapes differ at index " +
                std::to_string(i));
  }
  const std::set<int> base = collect(baseline_pred);
  const std::set<int> adv = collect(adv_pred);
  std::set<int> lost;
  for (int c : base) {
    if (!adv.count(c)) lost.insert(c);
  }
  return lost;
}

/// One row of the attack-degradation report.
struct MetricBundle {
  std::optional<double> pixel_acc;
  std::vector<std::optional<double>> per_class_iou;
  std::optional<double> miou;       // mean over images of per-image mIoU
  std::optional<double> miou_agg;   // mIoU of the aggregated confusion matrix
  std::optional<double> macc;
  std::optional<double> dice_f1;
  std::set<int> lost;
};

}  // namespace advdet
