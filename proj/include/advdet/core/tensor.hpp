#pragma once

#include <Eigen/Dense>

#include "advdet/common.hpp"

namespace advdet {

/// Dense C x H x W tensor with channel-major storage (each channel is a
/// contiguous row-major H x W plane). The image, activation, and gradient
/// type used throughout the toolkit.
template <typename Scalar>
struct Tensor3 {
  using Storage = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using PlaneMap =
      Eigen::Map<Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstPlaneMap =
      Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

  int channels = 0;
  int height = 0;
  int width = 0;
  Storage data;

  Tensor3() = default;
  Tensor3(int c, int h, int w)
      : channels(c), height(h), width(w),
        data(Storage::Zero(static_cast<Eigen::Index>(c) * h * w)) {
    require(c >= 1 && h >= 1 && w >= 1, ErrorCode::InvalidArgument,
            "Tensor3 dimensions must be positive");
  }

  Eigen::Index size() const { return data.size(); }
  Eigen::Index plane_size() const { return static_cast<Eigen::Index>(height) * width; }

  Scalar& operator()(int c, int y, int x) {
    return data[(static_cast<Eigen::Index>(c) * height + y) * width + x];
  }
  Scalar operator()(int c, int y, int x) const {
    return data[(static_cast<Eigen::Index>(c) * height + y) * width + x];
  }

  PlaneMap plane(int c) {
    return PlaneMap(data.data() + static_cast<Eigen::Index>(c) * plane_size(), height, width);
  }
  ConstPlaneMap plane(int c) const {
    return ConstPlaneMap(data.data() + static_cast<Eigen::Index>(c) * plane_size(), height,
                         width);
  }

  bool same_shape(const Tensor3& other) const {
    return channels == other.channels && height == other.height && width == other.width;
  }

  template <typename Other>
  Tensor3<Other> cast() const {
    Tensor3<Other> out(channels, height, width);
    out.data = data.template cast<Other>();
    return out;
  }
};

using Tensor3f = Tensor3<float>;
using Tensor3d = Tensor3<double>;

}  // namespace advdet
