#pragma once

#include "advdet/model/classifier.hpp"

namespace advdet {

enum class AttackMethod { Fgsm };
enum class LossTarget { TrueLabel, PredictedLabel };

/// One-step sign attack configuration. epsilon is an L-infinity budget in
/// [0,1] pixel units; it is converted into normalized space per channel at
/// application time.
struct AttackSpec {
  AttackMethod method = AttackMethod::Fgsm;
  double epsilon = 0.0;
  LossTarget loss_target = LossTarget::TrueLabel;
  bool clamp = true;

  void validate() const {
    require(epsilon >= 0.0, ErrorCode::InvalidArgument, "epsilon must be non-negative");
  }
};

template <typename Scalar>
struct AdversarialPair {
  TensorImage<Scalar> clean;
  TensorImage<Scalar> adversarial;
  double epsilon = 0.0;
  double linf_achieved = 0.0;  // measured in [0,1] pixel space
  int label_used = -1;
  bool zero_gradient = false;
};

/// x_adv = x + eps * sign(dL/dx) with cross-entropy loss, computed in
/// normalized space with the per-channel budget eps / std_c, then clamped to
/// the valid pixel range. An identically zero gradient yields the clean
/// input back with zero_gradient set.
template <typename Scalar>
AdversarialPair<Scalar> fgsm(const ClassifierModel<Scalar>& model, const TensorImage<Scalar>& x,
                             int y, const AttackSpec& spec) {
  spec.validate();
  model.validate_input(x);

  AdversarialPair<Scalar> pair;
  pair.clean = x;
  pair.epsilon = spec.epsilon;

  typename Backbone<Scalar>::ForwardCache cache;
  ForwardResult<Scalar> fwd = model.forward(x, cache);
  const int k = model.num_classes();
  int label = y;
  if (spec.loss_target == LossTarget::PredictedLabel) {
    label = argmax(fwd.logits);
  }
  require(label >= 0 && label < k, ErrorCode::InvalidArgument,
          "attack label " + std::to_string(label) + " out of range");
  pair.label_used = label;

  if (spec.epsilon == 0.0) {
    pair.adversarial = x;  // zero budget: exact identity
    return pair;
  }

  // dL/dlogits of softmax cross-entropy, then back through head and trunk.
  Eigen::VectorX<Scalar> grad_logits = softmax(fwd.logits);
  grad_logits[label] -= Scalar(1);
  const Eigen::VectorX<Scalar> grad_z = model.head.weight.transpose() * grad_logits;
  Tensor3<Scalar> grad_x = model.backbone->input_gradient(cache, grad_z);

  if ((grad_x.data == Scalar(0)).all()) {
    pair.adversarial = x;
    pair.zero_gradient = true;
    return pair;
  }

  TensorImage<Scalar> adv = x;
  for (int c = 0; c < 3; ++c) {
    const Scalar step = static_cast<Scalar>(spec.epsilon / x.norm.std[c]);
    adv.data.plane(c) += step * grad_x.plane(c).sign();
  }
  if (spec.clamp) {
    // Clamp in pixel space, keep the result normalized.
    for (int c = 0; c < 3; ++c) {
      const Scalar mean = static_cast<Scalar>(x.norm.mean[c]);
      const Scalar stddev = static_cast<Scalar>(x.norm.std[c]);
      adv.data.plane(c) =
          ((adv.data.plane(c) * stddev + mean).cwiseMax(Scalar(0)).cwiseMin(Scalar(1)) - mean) /
          stddev;
    }
  }
  pair.adversarial = std::move(adv);

  double linf = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double stddev = x.norm.std[c];
    const double channel_max =
        ((pair.adversarial.data.plane(c) - x.data.plane(c)).abs().maxCoeff()) * stddev;
    linf = std::max(linf, channel_max);
  }
  pair.linf_achieved = linf;
  return pair;
}

}  // namespace advdet
