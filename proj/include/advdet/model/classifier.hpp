#pragma once

#include <memory>
#include <string>

#include "advdet/core/image.hpp"
#include "advdet/model/backbone.hpp"

namespace advdet {

/// Replaceable linear classification head: logits = weight * z + bias.
template <typename Scalar>
struct LinearHead {
  // Row-major so the flat view is (class, feature) order.
  using WeightMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  WeightMatrix weight;
  Eigen::VectorX<Scalar> bias;

  int num_classes() const { return static_cast<int>(weight.rows()); }
  int feature_dim() const { return static_cast<int>(weight.cols()); }

  Eigen::VectorX<Scalar> operator()(const Eigen::VectorX<Scalar>& z) const {
    return weight * z + bias;
  }
};

/// Uniform fan-in initialization in [-1/sqrt(D), 1/sqrt(D)], seeded.
template <typename Scalar>
LinearHead<Scalar> make_linear_head(int num_classes, int feature_dim, std::uint64_t seed) {
  require(num_classes >= 1 && feature_dim >= 1, ErrorCode::InvalidArgument,
          "head dimensions must be positive");
  LinearHead<Scalar> head;
  head.weight.resize(num_classes, feature_dim);
  head.bias.resize(num_classes);
  const double bound = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> uniform(-bound, bound);
  for (Eigen::Index i = 0; i < head.weight.size(); ++i) {
    head.weight.data()[i] = static_cast<Scalar>(uniform(rng));
  }
  for (Eigen::Index i = 0; i < head.bias.size(); ++i) {
    head.bias[i] = static_cast<Scalar>(uniform(rng));
  }
  return head;
}

template <typename Scalar>
Eigen::VectorX<Scalar> softmax(const Eigen::VectorX<Scalar>& logits) {
  const Scalar m = logits.maxCoeff();
  Eigen::ArrayX<Scalar> e = (logits.array() - m).exp();
  return (e / e.sum()).matrix();
}

/// First index of the maximal entry (the documented tie-break).
template <typename Scalar>
int argmax(const Eigen::VectorX<Scalar>& v) {
  require(v.size() > 0, ErrorCode::InvalidArgument, "argmax of empty vector");
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

inline void validate_prob_vector(const Eigen::VectorXd& p) {
  require(p.size() >= 1, ErrorCode::Validation, "empty probability vector");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    require(p[i] >= 0.0 && p[i] <= 1.0, ErrorCode::Validation,
            "probability entry outside [0,1]");
  }
  require(std::abs(p.sum() - 1.0) <= 1e-6, ErrorCode::Validation,
          "probability vector does not sum to 1");
}

template <typename Scalar>
struct ForwardResult {
  Eigen::VectorX<Scalar> logits;
  Eigen::VectorX<Scalar> z;  // penultimate, post-global-pool features
  static constexpr const char* kSourceLayer = "global_avg_pool";
};

/// Frozen-backbone classifier. Only the head ever receives gradient
/// updates; the backbone is shared immutably, which is also what makes the
/// sliced 2-class variant cheap.
template <typename Scalar>
struct ClassifierModel {
  std::shared_ptr<const Backbone<Scalar>> backbone;
  LinearHead<Scalar> head;
  bool backbone_frozen = true;
  NormSpec norm;
  int input_size = 224;
  std::uint64_t head_seed = 0;

  int num_classes() const { return head.num_classes(); }
  int feature_dim() const { return backbone->feature_dim(); }

  void validate_input(const TensorImage<Scalar>& x) const {
    require(x.is_normalized, ErrorCode::InvalidArgument,
            "model input must be normalized");
    require(x.data.height == input_size && x.data.width == input_size,
            ErrorCode::InvalidArgument,
            "input spatial size " + std::to_string(x.data.height) + "x" +
                std::to_string(x.data.width) + " does not match expected " +
                std::to_string(input_size));
    require(x.data.channels == backbone->in_channels(), ErrorCode::InvalidArgument,
            "input channel count mismatch");
  }

  ForwardResult<Scalar> forward(const TensorImage<Scalar>& x) const {
    typename Backbone<Scalar>::ForwardCache cache;
    return forward(x, cache);
  }

  ForwardResult<Scalar> forward(const TensorImage<Scalar>& x,
                                typename Backbone<Scalar>::ForwardCache& cache) const {
    validate_input(x);
    ForwardResult<Scalar> out;
    out.z = backbone->features(x.data, cache);
    require(out.z.allFinite(), ErrorCode::Validation, "non-finite feature vector");
    out.logits = head(out.z);
    return out;
  }

  int predict(const TensorImage<Scalar>& x) const { return argmax(forward(x).logits); }
};

template <typename Scalar>
ClassifierModel<Scalar> make_classifier(BackboneId id, int num_classes, const NormSpec& norm,
                                        int input_size, std::uint64_t seed,
                                        const TinyCnnConfig& tiny_cfg = {}) {
  ClassifierModel<Scalar> model;
  model.backbone = make_backbone<Scalar>(id, seed, tiny_cfg);
  model.head_seed = mix_seed(seed, 0x11ead);
  model.head = make_linear_head<Scalar>(num_classes, model.backbone->feature_dim(),
                                        model.head_seed);
  model.norm = norm;
  model.input_size = input_size;
  return model;
}

/// Binary variant built by copying rows 0 and 1 of the trained head; the
/// backbone is shared, so its logits equal the first two full-head logits
/// exactly.
template <typename Scalar>
ClassifierModel<Scalar> slice_head(const ClassifierModel<Scalar>& model, int keep = 2) {
  require(model.head.num_classes() >= keep, ErrorCode::InvalidArgument,
          "slice_head: source head has fewer than " + std::to_string(keep) + " classes");
  ClassifierModel<Scalar> sliced = model;
  sliced.head.weight = model.head.weight.topRows(keep);
  sliced.head.bias = model.head.bias.head(keep);
  return sliced;
}

/// FNV-1a over the backbone parameter bytes in collect order; changes iff
/// some backbone parameter changes.
template <typename Scalar>
std::uint64_t backbone_checksum(const ClassifierModel<Scalar>& model) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& p : model.backbone->params()) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p.data);
    for (Eigen::Index i = 0; i < p.size * static_cast<Eigen::Index>(sizeof(Scalar)); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace advdet
