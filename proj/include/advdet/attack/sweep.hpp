#pragma once

#include <set>
#include <vector>

#include "advdet/attack/fgsm.hpp"
#include "advdet/core/parallel.hpp"
#include "advdet/metrics/bundle.hpp"
#include "advdet/model/train.hpp"

namespace advdet {

enum class SweepBaseline { Predictions, GroundTruth };

struct SweepOptions {
  LossTarget loss_target = LossTarget::TrueLabel;
  bool clamp = true;
  SweepBaseline baseline = SweepBaseline::Predictions;
  int workers = 1;
};

/// One attack-strength record in the degradation report's column order.
struct SweepRow {
  double epsilon = 0.0;
  double pixel_acc = 0.0;
  double miou = 0.0;
  double pa = 0.0;
  double macc = 0.0;
  double miou_agg = 0.0;
  double mf1 = 0.0;
};

inline constexpr const char* kSweepCsvHeader = "epsilon,pixel_acc,mIoU,PA,mAcc,mIoU_agg,mF1";

struct SweepImageDetail {
  std::string path;
  int baseline_pred = -1;
  int adv_pred = -1;
  double linf_achieved = 0.0;
  bool flipped = false;
};

struct SweepEpsilonDetail {
  double epsilon = 0.0;
  std::set<int> lost;
  std::vector<SweepImageDetail> images;
  ConfusionMatrix aggregate;
  std::vector<std::optional<double>> per_class_iou;
  std::vector<std::optional<double>> per_class_dice;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepEpsilonDetail> details;
  std::vector<int> baseline_predictions;
};

/// Attacks every sample at every budget in eps_list and scores predictions
/// against the baseline (the model's own eps = 0 predictions by default, or
/// ground-truth labels). Each classification sample enters the confusion
/// machinery as a one-pixel label map, so the eps = 0 row is exactly
/// all-ones under the predictions baseline.
template <typename Scalar>
SweepResult epsilon_sweep(const ClassifierModel<Scalar>& model,
                          const std::vector<LabeledSample<Scalar>>& data,
                          const std::vector<double>& eps_list, const SweepOptions& opt) {
  require(!data.empty(), ErrorCode::InvalidArgument, "epsilon_sweep: empty dataset");
  require(!eps_list.empty(), ErrorCode::InvalidArgument, "epsilon_sweep: empty epsilon grid");
  require(eps_list.front() == 0.0, ErrorCode::InvalidArgument,
          "epsilon_sweep: grid must start at 0");
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    require(eps_list[i] > eps_list[i - 1], ErrorCode::InvalidArgument,
            "epsilon_sweep: grid must be strictly ascending");
  }

  const int k = model.num_classes();
  const std::size_t n = data.size();

  // Baseline predictions are computed once and reused for every row.
  std::vector<int> baseline(n);
  parallel_for_ordered(n, opt.workers,
                       [&](std::size_t i) { baseline[i] = model.predict(data[i].image); });

  auto as_map = [&](int label) {
    LabelMap m(1, 1, k);
    m.labels(0, 0) = label;
    return m;
  };

  SweepResult result;
  result.baseline_predictions = baseline;

  std::vector<LabelMap> reference_maps(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int truth =
        opt.baseline == SweepBaseline::Predictions ? baseline[i] : data[i].label;
    require(truth >= 0 && truth < k, ErrorCode::Validation,
            "sweep baseline label out of range: " + data[i].path);
    reference_maps[i] = as_map(truth);
  }
  std::vector<LabelMap> baseline_maps(n);
  for (std::size_t i = 0; i < n; ++i) baseline_maps[i] = as_map(baseline[i]);

  for (double eps : eps_list) {
    SweepEpsilonDetail detail;
    detail.epsilon = eps;
    detail.images.resize(n);

    std::vector<int> adv_pred(n);
    std::vector<double> linf(n, 0.0);
    if (eps == 0.0) {
      adv_pred = baseline;  // zero budget is the identity attack
    } else {
      AttackSpec spec;
      spec.epsilon = eps;
      spec.loss_target = opt.loss_target;
      spec.clamp = opt.clamp;
      parallel_for_ordered(n, opt.workers, [&](std::size_t i) {
        const int y =
            opt.loss_target == LossTarget::TrueLabel ? data[i].label : baseline[i];
        auto pair = fgsm(model, data[i].image, y, spec);
        adv_pred[i] = model.predict(pair.adversarial);
        linf[i] = pair.linf_achieved;
      });
    }

    ConfusionMatrix aggregate(k);
    double per_image_miou_sum = 0.0;
    std::size_t per_image_defined = 0;
    std::vector<LabelMap> adv_maps(n);
    for (std::size_t i = 0; i < n; ++i) {
      adv_maps[i] = as_map(adv_pred[i]);
      ConfusionMatrix single(k);
      accumulate(single, adv_maps[i], reference_maps[i]);
      accumulate(aggregate, adv_maps[i], reference_maps[i]);
      if (auto m = miou(single)) {
        per_image_miou_sum += *m;
        ++per_image_defined;
      }
      detail.images[i] = {data[i].path, baseline[i], adv_pred[i], linf[i],
                          adv_pred[i] != baseline[i]};
    }

    SweepRow row;
    row.epsilon = eps;
    row.pixel_acc = pixel_accuracy(aggregate).value_or(0.0);
    row.pa = row.pixel_acc;  // one quantity, two report columns
    row.miou = per_image_defined > 0
                   ? per_image_miou_sum / static_cast<double>(per_image_defined)
                   : 0.0;
    row.macc = mean_class_accuracy(aggregate).value_or(0.0);
    row.miou_agg = miou(aggregate).value_or(0.0);
    row.mf1 = dice_f1(aggregate).value_or(0.0);
    result.rows.push_back(row);

    detail.lost = lost_classes(baseline_maps, adv_maps);
    detail.per_class_iou = iou_per_class(aggregate);
    detail.per_class_dice = dice_per_class(aggregate);
    detail.aggregate = std::move(aggregate);
    result.details.push_back(std::move(detail));
  }
  return result;
}

}  // namespace advdet
