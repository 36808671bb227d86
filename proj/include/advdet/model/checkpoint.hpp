#pragma once

#include <optional>
#include <string>

#include "advdet/model/classifier.hpp"
#include "advdet/model/train.hpp"

namespace advdet {

// Checkpoint container (all integers and floats little-endian):
//   magic          char[8]  "ADVCKPT\0"
//   version        u32      1
//   backbone_id    u8       0 tiny-cnn, 1 resnet18, 2 resnet50
//   reserved       u8[3]
//   num_classes    u32      head rows
//   feature_dim    u32      head cols / backbone D
//   input_size     u32      expected square input extent
//   norm mean      f32[3]
//   norm std       f32[3]
//   learning_rate  f32      training configuration as trained:
//   momentum       f32
//   batch_size     u32
//   epochs         u32
//   cfg_classes    u32
//   train_seed     u64
//   init_seed      u64      backbone initialization seed
//   head_seed      u64      head initialization seed
//   weights_ref    u32 len + bytes   external backbone weights file ("" = seeded)
//   tiny_in_ch     u32      tiny-cnn input channels (0 for resnet)
//   tiny_n_widths  u32      followed by u32 widths[n]
//   n_tensors      u32      embedded backbone tensors (tiny-cnn only)
//     per tensor:  u32 name len + bytes, u64 numel, f32 data[numel]
//   head weight    f32[num_classes * feature_dim]  row-major
//   head bias      f32[num_classes]

inline constexpr char kCheckpointMagic[8] = {'A', 'D', 'V', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const ClassifierModel<float>& model, const TrainConfig& cfg,
                     const std::string& path);

ClassifierModel<float> load_checkpoint(const std::string& path,
                                       std::optional<BackboneId> expected_backbone = {},
                                       TrainConfig* cfg_out = nullptr);

/// Expected checkpoint byte size for a given model, straight from the layout
/// above.
std::uint64_t checkpoint_size_bytes(const ClassifierModel<float>& model);

// Named-tensor weights container for externally converted backbone weights:
//   magic "ADVWTS\0\0", u32 version 1, u32 count,
//   per tensor: u32 name len + bytes, u32 ndim, u64 dims[ndim], f32 data.
// Tensor names follow the backbone parameter namespace (conv1.weight,
// layer1.0.bn1.running_mean, ...).
void save_named_tensors(const std::vector<ParamRef<float>>& params, const std::string& path);
void load_named_tensors_into(const std::vector<ParamRef<float>>& params,
                             const std::string& path);

}  // namespace advdet
