#include "advdet/harness/synth.hpp"

#include <array>
#include <cmath>
#include <filesystem>

#include "advdet/core/image_io.hpp"
#include "advdet/core/rng.hpp"

namespace advdet {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 8> kShapeNames = {
    "circle", "square", "triangle", "cross", "ring", "diamond", "hbar", "vbar"};

struct Rgb {
  double r, g, b;
};

Rgb hsv_to_rgb(double h, double s, double v) {
  h = h - std::floor(h);
  const double i = std::floor(h * 6.0);
  const double f = h * 6.0 - i;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - f * s);
  const double t = v * (1.0 - (1.0 - f) * s);
  switch (static_cast<int>(i) % 6) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

/// Smooth value noise: a coarse random grid bilinearly upsampled.
Tensor3<float> value_noise(int size, int cells, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int grid = cells + 1;
  std::vector<double> nodes(static_cast<std::size_t>(grid) * grid);
  for (auto& n : nodes) n = u(rng);
  Tensor3<float> out(1, size, size);
  for (int y = 0; y < size; ++y) {
    const double gy = static_cast<double>(y) / size * cells;
    const int y0 = static_cast<int>(gy);
    const double fy = gy - y0;
    for (int x = 0; x < size; ++x) {
      const double gx = static_cast<double>(x) / size * cells;
      const int x0 = static_cast<int>(gx);
      const double fx = gx - x0;
      const double n00 = nodes[static_cast<std::size_t>(y0) * grid + x0];
      const double n01 = nodes[static_cast<std::size_t>(y0) * grid + x0 + 1];
      const double n10 = nodes[static_cast<std::size_t>(y0 + 1) * grid + x0];
      const double n11 = nodes[static_cast<std::size_t>(y0 + 1) * grid + x0 + 1];
      const double top = n00 + (n01 - n00) * fx;
      const double bot = n10 + (n11 - n10) * fx;
      out(0, y, x) = static_cast<float>(top + (bot - top) * fy);
    }
  }
  return out;
}

bool inside_shape(int shape, double dx, double dy, double radius) {
  const double ax = std::abs(dx);
  const double ay = std::abs(dy);
  const double rr = dx * dx + dy * dy;
  switch (shape) {
    case 0:  // circle
      return rr <= radius * radius;
    case 1:  // square
      return ax <= radius * 0.82 && ay <= radius * 0.82;
    case 2:  // triangle (upward)
      return dy <= radius * 0.7 && dy >= -radius * 0.9 + 1e-9 &&
             ax <= (dy + radius * 0.9) * 0.62;
    case 3:  // cross
      return (ax <= radius * 0.3 && ay <= radius) || (ay <= radius * 0.3 && ax <= radius);
    case 4:  // ring
      return rr <= radius * radius && rr >= (radius * 0.55) * (radius * 0.55);
    case 5:  // diamond
      return ax + ay <= radius * 1.1;
    case 6:  // horizontal bar
      return ax <= radius && ay <= radius * 0.35;
    default:  // vertical bar
      return ay <= radius && ax <= radius * 0.35;
  }
}

}  // namespace

SynthSample make_synth_sample(const SynthSpec& spec, int cls, int index) {
  spec.validate();
  require(cls >= 0 && cls < spec.num_classes, ErrorCode::InvalidArgument,
          "synthetic class out of range");
  auto rng = make_rng(spec.seed, (static_cast<std::uint64_t>(cls) << 32) |
                                     static_cast<std::uint32_t>(index));
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const int s = spec.image_size;
  SynthSample sample;
  sample.label = cls;
  sample.image.height = s;
  sample.image.width = s;
  sample.image.channels = 3;
  sample.image.pixels.resize(static_cast<std::size_t>(s) * s * 3);
  sample.mask = LabelMap(s, s, spec.num_classes);
  sample.mask.labels.setConstant(kIgnoreLabel);

  // Textured background: desaturated random base color plus smooth value
  // noise, so the class-linked shape color carries the signal.
  const Rgb base = hsv_to_rgb(u01(rng), 0.05 + 0.15 * u01(rng), 0.30 + 0.30 * u01(rng));
  Tensor3<float> noise = value_noise(s, 8, rng);
  std::uniform_real_distribution<double> grain(-0.03, 0.03);

  // Shape geometry and class-linked color.
  const double cx = s * (0.5 + 0.12 * (u01(rng) - 0.5));
  const double cy = s * (0.5 + 0.12 * (u01(rng) - 0.5));
  const double radius = s * (0.30 + 0.10 * u01(rng));
  const double hue = static_cast<double>(cls) / spec.num_classes +
                     spec.hue_jitter * (u01(rng) - 0.5);
  const Rgb shape_color = hsv_to_rgb(hue, 0.8 + 0.2 * u01(rng), 0.75 + 0.25 * u01(rng));

  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      const bool hit = inside_shape(cls, (x - cx) / 1.0, (y - cy) / 1.0, radius);
      Rgb px;
      if (hit) {
        px = shape_color;
        sample.mask.labels(y, x) = cls;
      } else {
        const double n = spec.texture_amplitude * noise(0, y, x);
        px = {base.r + n, base.g + n, base.b + n};
      }
      for (int c = 0; c < 3; ++c) {
        const double channel = (c == 0 ? px.r : c == 1 ? px.g : px.b) + grain(rng);
        sample.image.at(y, x, c) = static_cast<std::uint8_t>(
            std::lround(std::clamp(channel, 0.0, 1.0) * 255.0));
      }
    }
  }
  return sample;
}

void generate_synth_dataset(const SynthSpec& spec, const std::string& root) {
  spec.validate();
  const struct {
    const char* split;
    int count;
    int index_base;
  } splits[] = {{"train", spec.train_per_class, 0},
                {"val", spec.val_per_class, 100000},
                {"test", spec.test_per_class, 200000}};

  char name[64];
  for (const auto& sp : splits) {
    if (sp.count == 0) continue;
    for (int cls = 0; cls < spec.num_classes; ++cls) {
      const fs::path dir = fs::path(root) / sp.split / kShapeNames[cls];
      fs::create_directories(dir);
      for (int i = 0; i < sp.count; ++i) {
        SynthSample sample = make_synth_sample(spec, cls, sp.index_base + i);
        std::snprintf(name, sizeof(name), "%s_%04d.png", kShapeNames[cls], i);
        save_png(sample.image, (dir / name).string());
        if (spec.emit_masks && std::string(sp.split) == "test") {
          std::snprintf(name, sizeof(name), "%s_%04d.png", kShapeNames[cls], i);
          save_png(sample.image, (fs::path(root) / "seg" / "images" / name).string());
          save_mask_png(sample.mask, (fs::path(root) / "seg" / "masks" / name).string());
        }
      }
    }
  }
}

}  // namespace advdet
