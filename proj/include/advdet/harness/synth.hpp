#pragma once

#include <string>

#include "advdet/core/image.hpp"

namespace advdet {

/// Bundled synthetic dataset: one colored geometric shape per image on a
/// textured background, one class per shape kind with a class-linked hue.
/// Drop-in compatible with the classification tree and mask-pair loaders,
/// so experiments run with zero downloads.
struct SynthSpec {
  int num_classes = 5;       // up to 8 shape kinds
  int image_size = 64;
  int train_per_class = 60;
  int val_per_class = 20;
  int test_per_class = 40;
  std::uint64_t seed = 0;
  double hue_jitter = 0.08;      // class hue wobble, fraction of the wheel
  double texture_amplitude = 0.25;  // background noise strength
  bool emit_masks = true;        // also writes seg/images + seg/masks pairs

  void validate() const {
    require(num_classes >= 2 && num_classes <= 8, ErrorCode::InvalidArgument,
            "synthetic dataset supports 2..8 classes");
    require(image_size >= 16, ErrorCode::InvalidArgument, "image_size must be at least 16");
    require(train_per_class >= 1 && val_per_class >= 0 && test_per_class >= 0,
            ErrorCode::InvalidArgument, "per-class counts must be non-negative");
  }
};

/// One generated sample, before encoding.
struct SynthSample {
  RawImage image;
  LabelMap mask;  // shape pixels = class id, background = ignore
  int label = 0;
};

/// Deterministic per (spec.seed, class, index) regardless of generation
/// order.
SynthSample make_synth_sample(const SynthSpec& spec, int cls, int index);

/// Writes root/{train,val,test}/<class_name>/*.png and, when emit_masks is
/// set, root/seg/{images,masks}/*.png pairs mirroring the test split.
void generate_synth_dataset(const SynthSpec& spec, const std::string& root);

}  // namespace advdet
