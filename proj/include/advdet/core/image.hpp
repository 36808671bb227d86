#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advdet/core/rng.hpp"
#include "advdet/core/tensor.hpp"
#include "advdet/metrics/confusion.hpp"

namespace advdet {

/// Decoded 8-bit RGB image in interleaved H x W x C order.
struct RawImage {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;  // height * width * channels
  std::string source_path;
  std::optional<int> label;
  std::optional<LabelMap> label_map;

  std::uint8_t at(int y, int x, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t& at(int y, int x, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  void validate(int num_classes = 0) const {
    require(height >= 1 && width >= 1, ErrorCode::Validation,
            "degenerate image (zero height or width): " + source_path);
    require(channels == 3, ErrorCode::Validation,
            "expected 3 RGB channels, got " + std::to_string(channels) + ": " + source_path);
    require(pixels.size() == static_cast<std::size_t>(height) * width * channels,
            ErrorCode::Validation, "pixel buffer size mismatch: " + source_path);
    if (label && num_classes > 0) {
      require(*label >= 0 && *label < num_classes, ErrorCode::Validation,
              "label " + std::to_string(*label) + " out of range for " +
                  std::to_string(num_classes) + " classes: " + source_path);
    }
  }
};

/// Per-channel normalization constants. Defaults are the standard RGB
/// statistics used by ImageNet-pretrained backbones.
struct NormSpec {
  std::array<double, 3> mean{0.485, 0.456, 0.406};
  std::array<double, 3> std{0.229, 0.224, 0.225};

  void validate() const {
    for (double s : std) {
      require(s > 0.0, ErrorCode::Validation, "NormSpec std components must be positive");
    }
  }
  bool operator==(const NormSpec&) const = default;
};

enum class AugmentMode { Train, Eval };

/// Crop/flip policy. Eval mode is fully deterministic: short-side resize to
/// resize_short, then center crop. Train mode is a random resized crop plus
/// Bernoulli horizontal flip, driven solely by rng_seed.
struct AugmentSpec {
  int crop_size = 224;
  int resize_short = 256;  // eval-path short-side target; a convention, kept in config
  double flip_probability = 0.5;
  AugmentMode mode = AugmentMode::Eval;
  std::uint64_t rng_seed = 0;
  double scale_min = 0.08;
  double scale_max = 1.0;
  double aspect_min = 3.0 / 4.0;
  double aspect_max = 4.0 / 3.0;

  void validate() const {
    require(crop_size >= 1, ErrorCode::InvalidArgument, "crop_size must be positive");
    require(resize_short >= 1, ErrorCode::InvalidArgument, "resize_short must be positive");
    require(flip_probability >= 0.0 && flip_probability <= 1.0, ErrorCode::InvalidArgument,
            "flip_probability must be in [0,1]");
    require(scale_min > 0.0 && scale_min <= scale_max && scale_max <= 1.0,
            ErrorCode::InvalidArgument, "invalid random-crop scale range");
    require(aspect_min > 0.0 && aspect_min <= aspect_max, ErrorCode::InvalidArgument,
            "invalid random-crop aspect range");
  }
};

/// C x H x W real image plus the normalization contract it currently obeys.
/// Unnormalized data lives in [0, 1].
template <typename Scalar>
struct TensorImage {
  Tensor3<Scalar> data;
  NormSpec norm;
  bool is_normalized = false;
};

using TensorImagef = TensorImage<float>;
using TensorImaged = TensorImage<double>;

namespace detail {

struct FilterTaps {
  int start = 0;
  std::vector<double> weights;
};

/// Triangle-filter taps for one resampled axis. When downscaling the filter
/// support widens with the scale factor, which is what makes the resize
/// antialiased; upscaling keeps the classic two-tap bilinear kernel. An
/// identity resize produces exact single-tap weights.
inline std::vector<FilterTaps> linear_taps(int in_size, int out_size) {
  const double scale = static_cast<double>(in_size) / out_size;
  const double filter_scale = std::max(scale, 1.0);
  const double support = filter_scale;
  std::vector<FilterTaps> taps(out_size);
  for (int i = 0; i < out_size; ++i) {
    const double center = (i + 0.5) * scale;
    int lo = static_cast<int>(std::floor(center - support + 0.5));
    int hi = static_cast<int>(std::floor(center + support + 0.5));
    lo = std::max(lo, 0);
    hi = std::min(hi, in_size);
    FilterTaps t;
    t.start = lo;
    t.weights.resize(hi - lo);
    double sum = 0.0;
    for (int j = lo; j < hi; ++j) {
      const double x = (j + 0.5 - center) / filter_scale;
      const double w = std::max(0.0, 1.0 - std::abs(x));
      t.weights[j - lo] = w;
      sum += w;
    }
    require(sum > 0.0, ErrorCode::InvalidArgument, "resize produced an empty filter window");
    for (double& w : t.weights) w /= sum;
    taps[i] = t;
  }
  return taps;
}

}  // namespace detail

/// Separable antialiased bilinear resize of a [0,1]-range tensor.
template <typename Scalar>
Tensor3<Scalar> resize_bilinear(const Tensor3<Scalar>& in, int out_h, int out_w) {
  require(out_h >= 1 && out_w >= 1, ErrorCode::InvalidArgument, "resize target must be positive");
  if (out_h == in.height && out_w == in.width) return in;
  const auto xtaps = detail::linear_taps(in.width, out_w);
  const auto ytaps = detail::linear_taps(in.height, out_h);

  Tensor3<Scalar> mid(in.channels, in.height, out_w);
  for (int c = 0; c < in.channels; ++c) {
    for (int y = 0; y < in.height; ++y) {
      for (int x = 0; x < out_w; ++x) {
        const auto& t = xtaps[x];
        double acc = 0.0;
        for (std::size_t j = 0; j < t.weights.size(); ++j) {
          acc += t.weights[j] * static_cast<double>(in(c, y, t.start + static_cast<int>(j)));
        }
        mid(c, y, x) = static_cast<Scalar>(acc);
      }
    }
  }
  Tensor3<Scalar> out(in.channels, out_h, out_w);
  for (int c = 0; c < in.channels; ++c) {
    for (int y = 0; y < out_h; ++y) {
      const auto& t = ytaps[y];
      for (int x = 0; x < out_w; ++x) {
        double acc = 0.0;
        for (std::size_t j = 0; j < t.weights.size(); ++j) {
          acc += t.weights[j] * static_cast<double>(mid(c, t.start + static_cast<int>(j), x));
        }
        out(c, y, x) = static_cast<Scalar>(acc);
      }
    }
  }
  return out;
}

template <typename Scalar>
Tensor3<Scalar> crop(const Tensor3<Scalar>& in, int top, int left, int h, int w) {
  require(top >= 0 && left >= 0 && top + h <= in.height && left + w <= in.width,
          ErrorCode::InvalidArgument, "crop window out of bounds");
  Tensor3<Scalar> out(in.channels, h, w);
  for (int c = 0; c < in.channels; ++c) {
    out.plane(c) = in.plane(c).block(top, left, h, w);
  }
  return out;
}

template <typename Scalar>
Tensor3<Scalar> hflip(const Tensor3<Scalar>& in) {
  Tensor3<Scalar> out(in.channels, in.height, in.width);
  for (int c = 0; c < in.channels; ++c) {
    out.plane(c) = in.plane(c).rowwise().reverse();
  }
  return out;
}

/// RawImage bytes to a [0,1] C x H x W tensor.
template <typename Scalar = float>
Tensor3<Scalar> to_unit_tensor(const RawImage& img) {
  img.validate();
  Tensor3<Scalar> out(img.channels, img.height, img.width);
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        out(c, y, x) = static_cast<Scalar>(img.at(y, x, c) / 255.0);
      }
    }
  }
  return out;
}

template <typename Scalar>
TensorImage<Scalar> normalize(TensorImage<Scalar> t) {
  t.norm.validate();
  require(!t.is_normalized, ErrorCode::InvalidArgument,
          "normalize: input is already normalized");
  require(t.data.channels == 3, ErrorCode::Validation, "normalize expects 3 channels");
  for (int c = 0; c < 3; ++c) {
    t.data.plane(c) = (t.data.plane(c) - static_cast<Scalar>(t.norm.mean[c])) /
                      static_cast<Scalar>(t.norm.std[c]);
  }
  t.is_normalized = true;
  return t;
}

/// Inverse of normalize; output clamped to the displayable [0,1] range.
template <typename Scalar>
TensorImage<Scalar> denormalize(TensorImage<Scalar> t) {
  require(t.is_normalized, ErrorCode::InvalidArgument,
          "denormalize: input is not normalized (double denormalization?)");
  for (int c = 0; c < 3; ++c) {
    t.data.plane(c) = (t.data.plane(c) * static_cast<Scalar>(t.norm.std[c]) +
                       static_cast<Scalar>(t.norm.mean[c]))
                          .cwiseMax(Scalar(0))
                          .cwiseMin(Scalar(1));
  }
  t.is_normalized = false;
  return t;
}

/// Crop/flip/normalize front end shared by training, attack, and detection.
/// Train mode: random resized crop + Bernoulli flip, a pure function of
/// (img, aug, norm). Eval mode: short-side resize then center crop, no
/// randomness at all.
template <typename Scalar = float>
TensorImage<Scalar> preprocess(const RawImage& img, const AugmentSpec& aug, const NormSpec& norm) {
  img.validate();
  aug.validate();
  norm.validate();

  Tensor3<Scalar> unit = to_unit_tensor<Scalar>(img);
  Tensor3<Scalar> patch;

  if (aug.mode == AugmentMode::Eval) {
    const int short_side = std::min(unit.height, unit.width);
    const double scale = static_cast<double>(aug.resize_short) / short_side;
    const int rh = static_cast<int>(std::round(unit.height * scale));
    const int rw = static_cast<int>(std::round(unit.width * scale));
    require(aug.crop_size <= std::min(rh, rw), ErrorCode::InvalidArgument,
            "crop_size " + std::to_string(aug.crop_size) + " exceeds resized extent " +
                std::to_string(std::min(rh, rw)));
    Tensor3<Scalar> resized = resize_bilinear(unit, rh, rw);
    const int top = (rh - aug.crop_size) / 2;
    const int left = (rw - aug.crop_size) / 2;
    patch = crop(resized, top, left, aug.crop_size, aug.crop_size);
  } else {
    auto rng = make_rng(aug.rng_seed);
    const double area = static_cast<double>(unit.height) * unit.width;
    int ch = -1, cw = -1, top = 0, left = 0;
    for (int attempt = 0; attempt < 10; ++attempt) {
      std::uniform_real_distribution<double> scale_d(aug.scale_min, aug.scale_max);
      std::uniform_real_distribution<double> ratio_d(std::log(aug.aspect_min),
                                                     std::log(aug.aspect_max));
      const double target_area = area * scale_d(rng);
      const double ratio = std::exp(ratio_d(rng));
      const int w = static_cast<int>(std::round(std::sqrt(target_area * ratio)));
      const int h = static_cast<int>(std::round(std::sqrt(target_area / ratio)));
      if (w >= 1 && h >= 1 && w <= unit.width && h <= unit.height) {
        std::uniform_int_distribution<int> top_d(0, unit.height - h);
        std::uniform_int_distribution<int> left_d(0, unit.width - w);
        top = top_d(rng);
        left = left_d(rng);
        ch = h;
        cw = w;
        break;
      }
    }
    if (ch < 0) {  // fall back to the largest centered square
      const int side = std::min(unit.height, unit.width);
      ch = cw = side;
      top = (unit.height - side) / 2;
      left = (unit.width - side) / 2;
    }
    Tensor3<Scalar> window = crop(unit, top, left, ch, cw);
    patch = resize_bilinear(window, aug.crop_size, aug.crop_size);
    std::bernoulli_distribution flip_d(aug.flip_probability);
    if (aug.flip_probability > 0.0 && flip_d(rng)) patch = hflip(patch);
  }

  // Resampling of [0,1] data stays in [0,1] up to rounding; snap it exactly.
  patch.data = patch.data.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));

  TensorImage<Scalar> out{std::move(patch), norm, false};
  return normalize(std::move(out));
}

}  // namespace advdet
