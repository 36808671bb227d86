#pragma once

#include <string>

#include "advdet/core/image.hpp"
#include "advdet/metrics/confusion.hpp"

namespace advdet {

/// Decodes a PNG or JPEG file (by extension) into 8-bit RGB.
RawImage load_image(const std::string& path);

/// Decodes a single-channel PNG mask; pixel values are class ids with 255
/// reserved as the ignore label.
LabelMap load_mask(const std::string& path, int num_classes);

/// Writes 8-bit RGB as PNG.
void save_png(const RawImage& img, const std::string& path);

/// Writes a single-channel PNG mask.
void save_mask_png(const LabelMap& mask, const std::string& path);

/// Converts a [0,1] C x H x W tensor to 8-bit RGB (values are clamped and
/// rounded).
RawImage to_raw_image(const Tensor3<float>& unit);

}  // namespace advdet
