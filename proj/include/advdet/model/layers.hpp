#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "advdet/core/tensor.hpp"

namespace advdet {

/// Per-call activation record. Each layer owns one node and stores only what
/// its input-gradient backward pass needs (ReLU outputs, pool argmax
/// indices); forward is re-entrant because nothing is written to the layer
/// itself.
template <typename Scalar>
struct Cache {
  std::vector<Tensor3<Scalar>> saved;
  std::vector<std::vector<int>> indices;
  std::vector<Cache<Scalar>> children;
};

/// Named view into a layer's mutable parameter storage. Pointers alias the
/// layer; callers that only read (hashing, saving) must not write through.
template <typename Scalar>
struct ParamRef {
  std::string name;
  Scalar* data = nullptr;
  Eigen::Index size = 0;
};

template <typename Scalar>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor3<Scalar> forward(const Tensor3<Scalar>& x, Cache<Scalar>& cache) const = 0;
  /// Gradient with respect to the layer input given the gradient with
  /// respect to the layer output. Weight gradients are deliberately absent:
  /// backbones are frozen, so only the input path is ever differentiated.
  virtual Tensor3<Scalar> backward(const Tensor3<Scalar>& grad_out,
                                   const Cache<Scalar>& cache) const = 0;
  virtual void collect_params(const std::string& prefix,
                              std::vector<ParamRef<Scalar>>& out) const = 0;
  /// Seeded parameter fill in layer order. Draws are taken in double so
  /// float and double instantiations of one seed agree to float precision.
  virtual void init(std::mt19937_64&) {}
};

namespace detail {

inline std::string join_name(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

template <typename Scalar>
void im2col(const Tensor3<Scalar>& in, int k, int stride, int pad, int oh, int ow,
            Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& col) {
  col.setZero(static_cast<Eigen::Index>(in.channels) * k * k,
              static_cast<Eigen::Index>(oh) * ow);
  Eigen::Index row = 0;
  for (int c = 0; c < in.channels; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx, ++row) {
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= in.height) continue;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix < 0 || ix >= in.width) continue;
            col(row, static_cast<Eigen::Index>(oy) * ow + ox) = in(c, iy, ix);
          }
        }
      }
    }
  }
}

template <typename Scalar>
void col2im_add(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& col, int k,
                int stride, int pad, int oh, int ow, Tensor3<Scalar>& out) {
  Eigen::Index row = 0;
  for (int c = 0; c < out.channels; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx, ++row) {
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= out.height) continue;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix < 0 || ix >= out.width) continue;
            out(c, iy, ix) += col(row, static_cast<Eigen::Index>(oy) * ow + ox);
          }
        }
      }
    }
  }
}

}  // namespace detail

template <typename Scalar>
class Conv2d : public Layer<Scalar> {
 public:
  // Row-major so the flat parameter view has (out, in, kh, kw) order.
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using ColMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using RowMajorMap =
      Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstRowMajorMap =
      Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

  Conv2d(int in_channels, int out_channels, int kernel, int stride, int pad, bool has_bias)
      : in_channels_(in_channels), out_channels_(out_channels), kernel_(kernel),
        stride_(stride), pad_(pad), has_bias_(has_bias),
        weight_(Matrix::Zero(out_channels, static_cast<Eigen::Index>(in_channels) * kernel *
                                               kernel)),
        bias_(Eigen::VectorX<Scalar>::Zero(has_bias ? out_channels : 0)) {}

  Tensor3<Scalar> forward(const Tensor3<Scalar>& x, Cache<Scalar>& cache) const override {
    require(x.channels == in_channels_, ErrorCode::InvalidArgument,
            "Conv2d: channel mismatch");
    const int oh = (x.height + 2 * pad_ - kernel_) / stride_ + 1;
    const int ow = (x.width + 2 * pad_ - kernel_) / stride_ + 1;
    require(oh >= 1 && ow >= 1, ErrorCode::InvalidArgument, "Conv2d: input too small");
    cache.indices.assign(1, {x.height, x.width});

    ColMatrix col;
    detail::im2col(x, kernel_, stride_, pad_, oh, ow, col);
    Tensor3<Scalar> out(out_channels_, oh, ow);
    RowMajorMap out_mat(out.data.data(), out_channels_, static_cast<Eigen::Index>(oh) * ow);
    out_mat.noalias() = weight_ * col;
    if (has_bias_) out_mat.colwise() += bias_;
    return out;
  }

  Tensor3<Scalar> backward(const Tensor3<Scalar>& grad_out,
                           const Cache<Scalar>& cache) const override {
    const int ih = cache.indices[0][0];
    const int iw = cache.indices[0][1];
    ConstRowMajorMap g(grad_out.data.data(), out_channels_,
                       static_cast<Eigen::Index>(grad_out.height) * grad_out.width);
    ColMatrix col_grad = weight_.transpose() * g;
    Tensor3<Scalar> grad_in(in_channels_, ih, iw);
    detail::col2im_add(col_grad, kernel_, stride_, pad_, grad_out.height, grad_out.width,
                       grad_in);
    return grad_in;
  }

  void collect_params(const std::string& prefix,
                      std::vector<ParamRef<Scalar>>& out) const override {
    auto* self = const_cast<Conv2d*>(this);
    out.push_back({detail::join_name(prefix, "weight"), self->weight_.data(), weight_.size()});
    if (has_bias_) {
      out.push_back({detail::join_name(prefix, "bias"), self->bias_.data(), bias_.size()});
    }
  }

  void init(std::mt19937_64& rng) override {
    const double stddev = std::sqrt(2.0 / fan_in());
    std::normal_distribution<double> normal(0.0, stddev);
    for (Eigen::Index i = 0; i < weight_.size(); ++i) {
      weight_.data()[i] = static_cast<Scalar>(normal(rng));
    }
    bias_.setZero();
  }

  Matrix& weight() { return weight_; }
  Eigen::VectorX<Scalar>& bias() { return bias_; }
  int fan_in() const { return in_channels_ * kernel_ * kernel_; }

 private:
  int in_channels_, out_channels_, kernel_, stride_, pad_;
  bool has_bias_;
  Matrix weight_;  // out_channels x (in_channels * k * k)
  Eigen::VectorX<Scalar> bias_;
};

/// Inference-mode batch normalization: a fixed per-channel affine map built
/// from running statistics. Backbones are frozen, so no batch statistics are
/// ever collected.
template <typename Scalar>
class BatchNorm2d : public Layer<Scalar> {
 public:
  explicit BatchNorm2d(int channels, Scalar eps = Scalar(1e-5))
      : channels_(channels), eps_(eps),
        gamma_(Eigen::VectorX<Scalar>::Ones(channels)),
        beta_(Eigen::VectorX<Scalar>::Zero(channels)),
        running_mean_(Eigen::VectorX<Scalar>::Zero(channels)),
        running_var_(Eigen::VectorX<Scalar>::Ones(channels)) {}

  Tensor3<Scalar> forward(const Tensor3<Scalar>& x, Cache<Scalar>&) const override {
    require(x.channels == channels_, ErrorCode::InvalidArgument, "BatchNorm2d: channel mismatch");
    Tensor3<Scalar> out(x.channels, x.height, x.width);
    for (int c = 0; c < channels_; ++c) {
      const Scalar scale = gamma_[c] / std::sqrt(running_var_[c] + eps_);
      const Scalar shift = beta_[c] - running_mean_[c] * scale;
      out.plane(c) = x.plane(c) * scale + shift;
    }
    return out;
  }

  Tensor3<Scalar> backward(const Tensor3<Scalar>& grad_out,
                           const Cache<Scalar>&) const override {
    Tensor3<Scalar> grad_in(grad_out.channels, grad_out.height, grad_out.width);
    for (int c = 0; c < channels_; ++c) {
      const Scalar scale = gamma_[c] / std::sqrt(running_var_[c] + eps_);
      grad_in.plane(c) = grad_out.plane(c) * scale;
    }
    return grad_in;
  }

  void collect_params(const std::string& prefix,
                      std::vector<ParamRef<Scalar>>& out) const override {
    auto* self = const_cast<BatchNorm2d*>(this);
    out.push_back({detail::join_name(prefix, "weight"), self->gamma_.data(), gamma_.size()});
    out.push_back({detail::join_name(prefix, "bias"), self->beta_.data(), beta_.size()});
    out.push_back({detail::join_name(prefix, "running_mean"), self->running_mean_.data(),
                   running_mean_.size()});
    out.push_back({detail::join_name(prefix, "running_var"), self->running_var_.data(),
                   running_var_.size()});
  }

  void init(std::mt19937_64&) override {
    gamma_.setOnes();
    beta_.setZero();
    running_mean_.setZero();
    running_var_.setOnes();
  }

 private:
  int channels_;
  Scalar eps_;
  Eigen::VectorX<Scalar> gamma_, beta_, running_mean_, running_var_;
};

template <typename Scalar>
class ReLU : public Layer<Scalar> {
 public:
  Tensor3<Scalar> forward(const Tensor3<Scalar>& x, Cache<Scalar>& cache) const override {
    Tensor3<Scalar> out(x.channels, x.height, x.width);
    out.data = x.data.cwiseMax(Scalar(0));
    cache.saved.assign(1, out);
    return out;
  }

  Tensor3<Scalar> backward(const Tensor3<Scalar>& grad_out,
                           const Cache<Scalar>& cache) const override {
    Tensor3<Scalar> grad_in(grad_out.channels, grad_out.height, grad_out.width);
    grad_in.data =
        grad_out.data * (cache.saved[0].data > Scalar(0)).template cast<Scalar>();
    return grad_in;
  }

  void collect_params(const std::string&, std::vector<ParamRef<Scalar>>&) const override {}
};

template <typename Scalar>
class MaxPool2d : public Layer<Scalar> {
 public:
  MaxPool2d(int kernel, int stride, int pad) : kernel_(kernel), stride_(stride), pad_(pad) {}

  Tensor3<Scalar> forward(const Tensor3<Scalar>& x, Cache<Scalar>& cache) const override {
    const int oh = (x.height + 2 * pad_ - kernel_) / stride_ + 1;
    const int ow = (x.width + 2 * pad_ - kernel_) / stride_ + 1;
    require(oh >= 1 && ow >= 1, ErrorCode::InvalidArgument, "MaxPool2d: input too small");
    Tensor3<Scalar> out(x.channels, oh, ow);
    std::vector<int> argmax(static_cast<std::size_t>(x.channels) * oh * ow);
    std::size_t idx = 0;
    for (int c = 0; c < x.channels; ++c) {
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox, ++idx) {
          Scalar best = std::numeric_limits<Scalar>::lowest();
          int best_pos = -1;
          for (int ky = 0; ky < kernel_; ++ky) {
            const int iy = oy * stride_ - pad_ + ky;
            if (iy < 0 || iy >= x.height) continue;
            for (int kx = 0; kx < kernel_; ++kx) {
              const int ix = ox * stride_ - pad_ + kx;
              if (ix < 0 || ix >= x.width) continue;
              const Scalar v = x(c, iy, ix);
              if (v > best) {
                best = v;
                best_pos = (c * x.height + iy) * x.width + ix;
              }
            }
          }
          require(best_pos >= 0, ErrorCode::InvalidArgument,
                  "MaxPool2d: empty pooling window");
          out(c, oy, ox) = best;
          argmax[idx] = best_pos;
        }
      }
    }
    cache.indices.assign(1, std::move(argmax));
    cache.indices.push_back({x.height, x.width});
    return out;
  }

  Tensor3<Scalar> backward(const Tensor3<Scalar>& grad_out,
                           const Cache<Scalar>& cache) const override {
    const auto& argmax = cache.indices[0];
    Tensor3<Scalar> grad_in(grad_out.channels, cache.indices[1][0], cache.indices[1][1]);
    for (std::size_t i = 0; i < argmax.size(); ++i) {
      grad_in.data[argmax[i]] += grad_out.data[static_cast<Eigen::Index>(i)];
    }
    return grad_in;
  }

  void collect_params(const std::string&, std::vector<ParamRef<Scalar>>&) const override {}

 private:
  int kernel_, stride_, pad_;
};

/// Ordered container of named sub-layers; names join with '.' to form the
/// checkpoint parameter namespace.
template <typename Scalar>
class NamedSequential : public Layer<Scalar> {
 public:
  void add(const std::string& name, std::unique_ptr<Layer<Scalar>> layer) {
    names_.push_back(name);
    layers_.push_back(std::move(layer));
  }

  Tensor3<Scalar> forward(const Tensor3<Scalar>& x, Cache<Scalar>& cache) const override {
    cache.children.resize(layers_.size());
    Tensor3<Scalar> cur = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      cur = layers_[i]->forward(cur, cache.children[i]);
    }
    return cur;
  }

  Tensor3<Scalar> backward(const Tensor3<Scalar>& grad_out,
                           const Cache<Scalar>& cache) const override {
    Tensor3<Scalar> g = grad_out;
    for (std::size_t i = layers_.size(); i-- > 0;) {
      g = layers_[i]->backward(g, cache.children[i]);
    }
    return g;
  }

  void collect_params(const std::string& prefix,
                      std::vector<ParamRef<Scalar>>& out) const override {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      layers_[i]->collect_params(detail::join_name(prefix, names_[i]), out);
    }
  }

  void init(std::mt19937_64& rng) override {
    for (auto& layer : layers_) layer->init(rng);
  }

  std::size_t size() const { return layers_.size(); }

 private:
  std::vector<std::string> names_;
  std::vector<std::unique_ptr<Layer<Scalar>>> layers_;
};

namespace detail {

/// Shared residual-block plumbing: main branch, optional projection
/// shortcut, joining ReLU.
template <typename Scalar>
struct ResidualCore {
  NamedSequential<Scalar> main;
  std::unique_ptr<NamedSequential<Scalar>> downsample;  // null = identity shortcut

  Tensor3<Scalar> forward(const Tensor3<Scalar>& x, Cache<Scalar>& cache) const {
    cache.children.resize(2);
    Tensor3<Scalar> y = main.forward(x, cache.children[0]);
    Tensor3<Scalar> s = downsample ? downsample->forward(x, cache.children[1]) : x;
    require(y.same_shape(s), ErrorCode::InvalidArgument, "residual branch shape mismatch");
    Tensor3<Scalar> out(y.channels, y.height, y.width);
    out.data = (y.data + s.data).cwiseMax(Scalar(0));
    cache.saved.assign(1, out);
    return out;
  }

  Tensor3<Scalar> backward(const Tensor3<Scalar>& grad_out, const Cache<Scalar>& cache) const {
    Tensor3<Scalar> g(grad_out.channels, grad_out.height, grad_out.width);
    g.data = grad_out.data * (cache.saved[0].data > Scalar(0)).template cast<Scalar>();
    Tensor3<Scalar> g_main = main.backward(g, cache.children[0]);
    if (downsample) {
      Tensor3<Scalar> g_short = downsample->backward(g, cache.children[1]);
      g_main.data += g_short.data;
    } else {
      g_main.data += g.data;
    }
    return g_main;
  }

  void collect_params(const std::string& prefix, std::vector<ParamRef<Scalar>>& out) const {
    main.collect_params(prefix, out);
    if (downsample) downsample->collect_params(detail::join_name(prefix, "downsample"), out);
  }

  void init(std::mt19937_64& rng) {
    main.init(rng);
    if (downsample) downsample->init(rng);
  }
};

}  // namespace detail

/// Two 3x3 convolutions with a residual shortcut (the 18-layer block).
template <typename Scalar>
class BasicBlock : public Layer<Scalar> {
 public:
  BasicBlock(int in_channels, int out_channels, int stride) {
    core_.main.add("conv1", std::make_unique<Conv2d<Scalar>>(in_channels, out_channels, 3,
                                                             stride, 1, false));
    core_.main.add("bn1", std::make_unique<BatchNorm2d<Scalar>>(out_channels));
    core_.main.add("relu1", std::make_unique<ReLU<Scalar>>());
    core_.main.add("conv2",
                   std::make_unique<Conv2d<Scalar>>(out_channels, out_channels, 3, 1, 1, false));
    core_.main.add("bn2", std::make_unique<BatchNorm2d<Scalar>>(out_channels));
    if (stride != 1 || in_channels != out_channels) {
      core_.downsample = std::make_unique<NamedSequential<Scalar>>();
      core_.downsample->add(
          "0", std::make_unique<Conv2d<Scalar>>(in_channels, out_channels, 1, stride, 0, false));
      core_.downsample->add("1", std::make_unique<BatchNorm2d<Scalar>>(out_channels));
    }
  }

  Tensor3<Scalar> forward(const Tensor3<Scalar>& x, Cache<Scalar>& cache) const override {
    return core_.forward(x, cache);
  }
  Tensor3<Scalar> backward(const Tensor3<Scalar>& g, const Cache<Scalar>& cache) const override {
    return core_.backward(g, cache);
  }
  void collect_params(const std::string& prefix,
                      std::vector<ParamRef<Scalar>>& out) const override {
    core_.collect_params(prefix, out);
  }
  void init(std::mt19937_64& rng) override { core_.init(rng); }

 private:
  detail::ResidualCore<Scalar> core_;
};

/// 1x1 / 3x3 / 1x1 bottleneck with expansion 4; the stride sits on the 3x3
/// convolution.
template <typename Scalar>
class Bottleneck : public Layer<Scalar> {
 public:
  static constexpr int kExpansion = 4;

  Bottleneck(int in_channels, int mid_channels, int stride) {
    const int out_channels = mid_channels * kExpansion;
    core_.main.add("conv1",
                   std::make_unique<Conv2d<Scalar>>(in_channels, mid_channels, 1, 1, 0, false));
    core_.main.add("bn1", std::make_unique<BatchNorm2d<Scalar>>(mid_channels));
    core_.main.add("relu1", std::make_unique<ReLU<Scalar>>());
    core_.main.add("conv2", std::make_unique<Conv2d<Scalar>>(mid_channels, mid_channels, 3,
                                                             stride, 1, false));
    core_.main.add("bn2", std::make_unique<BatchNorm2d<Scalar>>(mid_channels));
    core_.main.add("relu2", std::make_unique<ReLU<Scalar>>());
    core_.main.add("conv3",
                   std::make_unique<Conv2d<Scalar>>(mid_channels, out_channels, 1, 1, 0, false));
    core_.main.add("bn3", std::make_unique<BatchNorm2d<Scalar>>(out_channels));
    if (stride != 1 || in_channels != out_channels) {
      core_.downsample = std::make_unique<NamedSequential<Scalar>>();
      core_.downsample->add(
          "0", std::make_unique<Conv2d<Scalar>>(in_channels, out_channels, 1, stride, 0, false));
      core_.downsample->add("1", std::make_unique<BatchNorm2d<Scalar>>(out_channels));
    }
  }

  Tensor3<Scalar> forward(const Tensor3<Scalar>& x, Cache<Scalar>& cache) const override {
    return core_.forward(x, cache);
  }
  Tensor3<Scalar> backward(const Tensor3<Scalar>& g, const Cache<Scalar>& cache) const override {
    return core_.backward(g, cache);
  }
  void collect_params(const std::string& prefix,
                      std::vector<ParamRef<Scalar>>& out) const override {
    core_.collect_params(prefix, out);
  }
  void init(std::mt19937_64& rng) override { core_.init(rng); }

 private:
  detail::ResidualCore<Scalar> core_;
};

}  // namespace advdet
