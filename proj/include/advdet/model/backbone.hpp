#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "advdet/core/rng.hpp"
#include "advdet/model/layers.hpp"

namespace advdet {

enum class BackboneId : std::uint8_t { TinyCnn = 0, ResNet18 = 1, ResNet50 = 2 };

inline std::string to_string(BackboneId id) {
  switch (id) {
    case BackboneId::TinyCnn: return "tiny-cnn";
    case BackboneId::ResNet18: return "resnet18";
    case BackboneId::ResNet50: return "resnet50";
  }
  return "unknown";
}

inline BackboneId backbone_from_string(const std::string& s) {
  if (s == "tiny-cnn" || s == "tiny_cnn" || s == "tinycnn") return BackboneId::TinyCnn;
  if (s == "resnet18") return BackboneId::ResNet18;
  if (s == "resnet50") return BackboneId::ResNet50;
  fail(ErrorCode::InvalidArgument, "unknown backbone: " + s);
}

/// Desk-scale convolutional stack: per width, conv3x3 + ReLU + maxpool2,
/// then global average pooling. The feature dimension is the last width.
struct TinyCnnConfig {
  std::vector<int> widths = {8, 16, 32};
  int in_channels = 3;

  void validate() const {
    require(!widths.empty(), ErrorCode::InvalidArgument, "tiny-cnn needs at least one block");
    for (int w : widths) {
      require(w >= 1, ErrorCode::InvalidArgument, "tiny-cnn widths must be positive");
    }
    require(in_channels >= 1, ErrorCode::InvalidArgument, "tiny-cnn needs input channels");
  }
};

/// Frozen feature extractor: a convolutional trunk followed by global
/// average pooling. Produces the penultimate feature vector z and, on
/// request, the gradient of any scalar loss with respect to the input image.
template <typename Scalar>
class Backbone {
 public:
  struct ForwardCache {
    Cache<Scalar> trunk;
    int map_height = 0;
    int map_width = 0;
  };

  Backbone(BackboneId id, std::unique_ptr<Layer<Scalar>> trunk, int feature_dim,
           int in_channels, TinyCnnConfig tiny_cfg, std::uint64_t init_seed)
      : id_(id), trunk_(std::move(trunk)), feature_dim_(feature_dim),
        in_channels_(in_channels), tiny_cfg_(std::move(tiny_cfg)), init_seed_(init_seed) {}

  BackboneId id() const { return id_; }
  int feature_dim() const { return feature_dim_; }
  int in_channels() const { return in_channels_; }
  std::uint64_t init_seed() const { return init_seed_; }
  const TinyCnnConfig& tiny_config() const { return tiny_cfg_; }
  const std::string& weights_ref() const { return weights_ref_; }
  void set_weights_ref(std::string ref) { weights_ref_ = std::move(ref); }

  /// Pooled feature scale: 1 for the mean-pooled resnets; the tiny-cnn
  /// pools as sum / sqrt(area) instead, which keeps feature magnitude
  /// roughly resolution-independent and makes the fixed desk-scale learning
  /// rate effective.
  Scalar pool_gain(int h, int w) const {
    return id_ == BackboneId::TinyCnn ? std::sqrt(static_cast<Scalar>(h) * w) : Scalar(1);
  }

  Eigen::VectorX<Scalar> features(const Tensor3<Scalar>& x, ForwardCache& cache) const {
    Tensor3<Scalar> fmap = trunk_->forward(x, cache.trunk);
    require(fmap.channels == feature_dim_, ErrorCode::Validation,
            "backbone produced unexpected feature depth");
    cache.map_height = fmap.height;
    cache.map_width = fmap.width;
    const Scalar gain = pool_gain(fmap.height, fmap.width);
    Eigen::VectorX<Scalar> z(feature_dim_);
    for (int c = 0; c < feature_dim_; ++c) z[c] = fmap.plane(c).mean() * gain;
    return z;
  }

  Eigen::VectorX<Scalar> features(const Tensor3<Scalar>& x) const {
    ForwardCache cache;
    return features(x, cache);
  }

  /// Backpropagates grad_z through the pooling and the trunk, returning the
  /// gradient with respect to the input image.
  Tensor3<Scalar> input_gradient(const ForwardCache& cache,
                                 const Eigen::VectorX<Scalar>& grad_z) const {
    require(grad_z.size() == feature_dim_, ErrorCode::InvalidArgument,
            "input_gradient: grad_z size mismatch");
    Tensor3<Scalar> grad_map(feature_dim_, cache.map_height, cache.map_width);
    const Scalar scale = pool_gain(cache.map_height, cache.map_width) /
                         static_cast<Scalar>(cache.map_height * cache.map_width);
    for (int c = 0; c < feature_dim_; ++c) {
      grad_map.plane(c).setConstant(grad_z[c] * scale);
    }
    return trunk_->backward(grad_map, cache.trunk);
  }

  std::vector<ParamRef<Scalar>> params() const {
    std::vector<ParamRef<Scalar>> out;
    trunk_->collect_params("", out);
    return out;
  }

 private:
  BackboneId id_;
  std::unique_ptr<Layer<Scalar>> trunk_;
  int feature_dim_;
  int in_channels_;
  TinyCnnConfig tiny_cfg_;
  std::uint64_t init_seed_ = 0;
  std::string weights_ref_;  // external named-tensor file, empty = seeded init
};

template <typename Scalar>
std::shared_ptr<Backbone<Scalar>> make_tiny_cnn(const TinyCnnConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  auto trunk = std::make_unique<NamedSequential<Scalar>>();
  int prev = cfg.in_channels;
  for (std::size_t i = 0; i < cfg.widths.size(); ++i) {
    auto block = std::make_unique<NamedSequential<Scalar>>();
    block->add("conv", std::make_unique<Conv2d<Scalar>>(prev, cfg.widths[i], 3, 1, 1, true));
    block->add("relu", std::make_unique<ReLU<Scalar>>());
    block->add("pool", std::make_unique<MaxPool2d<Scalar>>(2, 2, 0));
    trunk->add("block" + std::to_string(i + 1), std::move(block));
    prev = cfg.widths[i];
  }
  auto rng = make_rng(seed);
  trunk->init(rng);
  return std::make_shared<Backbone<Scalar>>(BackboneId::TinyCnn, std::move(trunk),
                                            cfg.widths.back(), cfg.in_channels, cfg, seed);
}

template <typename Scalar>
std::shared_ptr<Backbone<Scalar>> make_resnet(BackboneId id, std::uint64_t seed) {
  require(id == BackboneId::ResNet18 || id == BackboneId::ResNet50, ErrorCode::InvalidArgument,
          "make_resnet: expected a resnet id");
  const bool bottleneck = (id == BackboneId::ResNet50);
  const std::vector<int> block_counts =
      bottleneck ? std::vector<int>{3, 4, 6, 3} : std::vector<int>{2, 2, 2, 2};
  const std::vector<int> stage_widths = {64, 128, 256, 512};

  auto trunk = std::make_unique<NamedSequential<Scalar>>();
  std::vector<Conv2d<Scalar>*> convs;
  {
    auto conv = std::make_unique<Conv2d<Scalar>>(3, 64, 7, 2, 3, false);
    convs.push_back(conv.get());
    trunk->add("conv1", std::move(conv));
  }
  trunk->add("bn1", std::make_unique<BatchNorm2d<Scalar>>(64));
  trunk->add("relu", std::make_unique<ReLU<Scalar>>());
  trunk->add("maxpool", std::make_unique<MaxPool2d<Scalar>>(3, 2, 1));

  int in_ch = 64;
  for (int stage = 0; stage < 4; ++stage) {
    auto stage_seq = std::make_unique<NamedSequential<Scalar>>();
    for (int b = 0; b < block_counts[stage]; ++b) {
      const int stride = (b == 0 && stage > 0) ? 2 : 1;
      if (bottleneck) {
        stage_seq->add(std::to_string(b), std::make_unique<Bottleneck<Scalar>>(
                                              in_ch, stage_widths[stage], stride));
        in_ch = stage_widths[stage] * Bottleneck<Scalar>::kExpansion;
      } else {
        stage_seq->add(std::to_string(b), std::make_unique<BasicBlock<Scalar>>(
                                              in_ch, stage_widths[stage], stride));
        in_ch = stage_widths[stage];
      }
    }
    trunk->add("layer" + std::to_string(stage + 1), std::move(stage_seq));
  }

  auto rng = make_rng(seed);
  trunk->init(rng);
  return std::make_shared<Backbone<Scalar>>(id, std::move(trunk), in_ch, 3, TinyCnnConfig{},
                                            seed);
}

template <typename Scalar>
std::shared_ptr<Backbone<Scalar>> make_backbone(BackboneId id, std::uint64_t seed,
                                                const TinyCnnConfig& tiny_cfg = {}) {
  if (id == BackboneId::TinyCnn) return make_tiny_cnn<Scalar>(tiny_cfg, seed);
  return make_resnet<Scalar>(id, seed);
}

}  // namespace advdet
