#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "advdet/metrics/bundle.hpp"
#include "advdet/model/classifier.hpp"

namespace advdet {

struct TrainConfig {
  double learning_rate = 0.001;
  double momentum = 0.9;
  int batch_size = 4;
  int epochs = 0;
  int num_classes = 102;
  std::uint64_t rng_seed = 0;

  void validate() const {
    require(learning_rate > 0.0, ErrorCode::InvalidArgument, "learning_rate must be positive");
    require(momentum >= 0.0 && momentum < 1.0, ErrorCode::InvalidArgument,
            "momentum must be in [0,1)");
    require(batch_size >= 1, ErrorCode::InvalidArgument, "batch_size must be positive");
    require(epochs >= 0, ErrorCode::InvalidArgument, "epochs must be non-negative");
    require(num_classes >= 1, ErrorCode::InvalidArgument, "num_classes must be positive");
  }
};

enum class Phase { Train, Val };

inline const char* to_string(Phase p) { return p == Phase::Train ? "train" : "val"; }

struct EpochLogRow {
  int epoch = 0;
  Phase phase = Phase::Train;
  double loss = 0.0;
  double accuracy = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
};

template <typename Scalar>
struct LabeledSample {
  TensorImage<Scalar> image;
  int label = -1;
  std::string path;
};

template <typename Scalar>
struct TrainResult {
  std::vector<EpochLogRow> log;
  LinearHead<Scalar> best_head;  // highest validation accuracy (earliest on ties)
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
};

namespace detail {

struct EpochStats {
  double loss_sum = 0.0;
  ConfusionMatrix cm;

  explicit EpochStats(int k) : cm(k) {}

  void add(int truth, int pred, double loss) {
    loss_sum += loss;
    ++cm.counts(truth, pred);
  }

  EpochLogRow row(int epoch, Phase phase) const {
    EpochLogRow r;
    r.epoch = epoch;
    r.phase = phase;
    const auto n = cm.total();
    r.loss = n > 0 ? loss_sum / static_cast<double>(n) : 0.0;
    r.accuracy = pixel_accuracy(cm).value_or(0.0);
    r.precision_macro = macro_precision(cm).value_or(0.0);
    r.recall_macro = mean_class_accuracy(cm).value_or(0.0);
    r.f1_macro = dice_f1(cm).value_or(0.0);
    return r;
  }
};

}  // namespace detail

/// Trains the linear head with minibatch SGD (classical momentum, constant
/// rate) on cross-entropy, leaving the frozen backbone untouched. Features
/// are extracted once per sample up front, which is exact for a frozen
/// backbone. Logs one row per (epoch, phase); train rows use running
/// statistics over the epoch's minibatches, val rows a full pass with the
/// weights as of the epoch's end.
template <typename Scalar>
TrainResult<Scalar> train_head(ClassifierModel<Scalar>& model,
                               const std::vector<LabeledSample<Scalar>>& train_data,
                               const std::vector<LabeledSample<Scalar>>& val_data,
                               const TrainConfig& cfg) {
  cfg.validate();
  require(model.backbone_frozen, ErrorCode::InvalidArgument,
          "train_head requires a frozen backbone");
  require(!train_data.empty(), ErrorCode::InvalidArgument, "train_head: empty dataset");
  require(model.head.num_classes() == cfg.num_classes, ErrorCode::InvalidArgument,
          "train_head: head width does not match cfg.num_classes");
  for (const auto& s : train_data) {
    require(s.label >= 0 && s.label < cfg.num_classes, ErrorCode::Validation,
            "label " + std::to_string(s.label) + " out of range: " + s.path);
  }
  for (const auto& s : val_data) {
    require(s.label >= 0 && s.label < cfg.num_classes, ErrorCode::Validation,
            "label " + std::to_string(s.label) + " out of range: " + s.path);
  }

  using Matrix = typename LinearHead<Scalar>::WeightMatrix;
  const int k = cfg.num_classes;

  std::vector<Eigen::VectorX<Scalar>> train_z(train_data.size());
  for (std::size_t i = 0; i < train_data.size(); ++i) {
    train_z[i] = model.forward(train_data[i].image).z;
  }
  std::vector<Eigen::VectorX<Scalar>> val_z(val_data.size());
  for (std::size_t i = 0; i < val_data.size(); ++i) {
    val_z[i] = model.forward(val_data[i].image).z;
  }

  Matrix vel_w = Matrix::Zero(model.head.weight.rows(), model.head.weight.cols());
  Eigen::VectorX<Scalar> vel_b = Eigen::VectorX<Scalar>::Zero(model.head.bias.size());

  auto rng = make_rng(cfg.rng_seed);
  std::vector<std::size_t> order(train_data.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult<Scalar> result;
  result.best_head = model.head;
  result.best_epoch = 0;
  result.best_val_accuracy = -1.0;

  auto eval_pass = [&](const std::vector<LabeledSample<Scalar>>& data,
                       const std::vector<Eigen::VectorX<Scalar>>& zs, int epoch) {
    detail::EpochStats stats(k);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const Eigen::VectorX<Scalar> logits = model.head(zs[i]);
      const Eigen::VectorX<Scalar> p = softmax(logits);
      stats.add(data[i].label, argmax(logits),
                -std::log(std::max(static_cast<double>(p[data[i].label]), 1e-300)));
    }
    return stats.row(epoch, Phase::Val);
  };

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    detail::EpochStats stats(k);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      Matrix grad_w = Matrix::Zero(vel_w.rows(), vel_w.cols());
      Eigen::VectorX<Scalar> grad_b = Eigen::VectorX<Scalar>::Zero(vel_b.size());
      for (std::size_t i = start; i < end; ++i) {
        const auto& z = train_z[order[i]];
        const int y = train_data[order[i]].label;
        const Eigen::VectorX<Scalar> logits = model.head(z);
        Eigen::VectorX<Scalar> p = softmax(logits);
        stats.add(y, argmax(logits),
                  -std::log(std::max(static_cast<double>(p[y]), 1e-300)));
        p[y] -= Scalar(1);  // dL/dlogits for softmax cross-entropy
        grad_w.noalias() += static_cast<Scalar>(inv_batch) * (p * z.transpose());
        grad_b += static_cast<Scalar>(inv_batch) * p;
      }
      vel_w = static_cast<Scalar>(cfg.momentum) * vel_w + grad_w;
      vel_b = static_cast<Scalar>(cfg.momentum) * vel_b + grad_b;
      model.head.weight -= static_cast<Scalar>(cfg.learning_rate) * vel_w;
      model.head.bias -= static_cast<Scalar>(cfg.learning_rate) * vel_b;
    }
    result.log.push_back(stats.row(epoch, Phase::Train));
    if (!val_data.empty()) {
      EpochLogRow vrow = eval_pass(val_data, val_z, epoch);
      result.log.push_back(vrow);
      if (vrow.accuracy > result.best_val_accuracy) {
        result.best_val_accuracy = vrow.accuracy;
        result.best_head = model.head;
        result.best_epoch = epoch;
      }
    }
  }
  if (val_data.empty()) {
    result.best_head = model.head;
    result.best_epoch = cfg.epochs;
    result.best_val_accuracy = 0.0;
  }
  return result;
}

}  // namespace advdet
