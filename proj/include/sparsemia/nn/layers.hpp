// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/butterfly/factorized_matrix.hpp"
#include "sparsemia/nn/parameter.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace sparsemia::nn {

enum class LayerKind : std::uint32_t {
  dense = 0,
  conv2d = 1,
  butterfly_linear = 2,
  butterfly_conv = 3,
  masked_dense = 4,
  masked_conv = 5,
  batchnorm = 6,
  relu = 7,
  avgpool = 8,
  flatten = 9,
};

std::string_view to_string(LayerKind kind);

enum class Mode { train, eval };

/// Activations are feature_size × batch, one sample per column. Image
/// activations are laid out channel-major (c, y, x).
class Layer {
 public:
  virtual ~Layer() = default;

  [[nodiscard]] virtual LayerKind kind() const = 0;
  [[nodiscard]] virtual Index input_size() const = 0;
  [[nodiscard]] virtual Index output_size() const = 0;

  /// Stateless evaluation-mode pass; safe to call concurrently.
  [[nodiscard]] virtual Matrix infer(const Matrix& input) const = 0;
  /// Pass that caches whatever backward() needs.
  virtual Matrix forward(const Matrix& input, Mode mode) = 0;
  /// Accumulates parameter gradients for the last forward() and returns the
  /// gradient with respect to that forward's input.
  virtual Matrix backward(const Matrix& grad_output) = 0;

  virtual void initialize(Rng& /*rng*/) {}
  [[nodiscard]] virtual std::unique_ptr<Layer> clone() const = 0;
  /// Integer description sufficient to rebuild the layer via make_layer().
  [[nodiscard]] virtual std::vector<std::int64_t> config() const = 0;

  std::span<Parameter> parameters() noexcept { return params_; }
  std::span<const Parameter> parameters() const noexcept { return params_; }

 protected:
  void check_input(const Matrix& input) const;
  std::vector<Parameter> params_;
};

/// y = W x + b with W stored out × in (column-major in the parameter vector).
/// Reports itself as masked_dense once the weight carries a mask.
class Dense final : public Layer {
 public:
  Dense(Index in, Index out, bool bias = true);

  LayerKind kind() const override;
  Index input_size() const override { return in_; }
  Index output_size() const override { return out_; }
  Matrix infer(const Matrix& input) const override;
  Matrix forward(const Matrix& input, Mode mode) override;
  Matrix backward(const Matrix& grad_output) override;
  void initialize(Rng& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }
  std::vector<std::int64_t> config() const override;

  Eigen::Map<Matrix> weight() { return {params_[0].value.data(), out_, in_}; }
  Eigen::Map<const Matrix> weight() const { return {params_[0].value.data(), out_, in_}; }
  [[nodiscard]] bool has_bias() const noexcept { return params_.size() > 1; }

 private:
  Index in_;
  Index out_;
  Matrix input_;
};

struct ConvGeometry {
  Index in_channels = 1;
  Index out_channels = 1;
  Index kernel = 3;
  Index stride = 1;
  Index padding = 1;
  Index in_height = 1;
  Index in_width = 1;

  [[nodiscard]] Index out_height() const noexcept { return (in_height + 2 * padding - kernel) / stride + 1; }
  [[nodiscard]] Index out_width() const noexcept { return (in_width + 2 * padding - kernel) / stride + 1; }
  [[nodiscard]] Index patch_size() const noexcept { return in_channels * kernel * kernel; }
  [[nodiscard]] Index input_size() const noexcept { return in_channels * in_height * in_width; }
  [[nodiscard]] Index output_size() const noexcept {
    return out_channels * out_height() * out_width();
  }
  void validate() const;
};

/// Unfolds a batch into patch_size × (batch · out_h · out_w); column
/// b·out_h·out_w + y·out_w + x holds the receptive field of output (y, x) of
/// sample b, rows ordered (channel, ky, kx).
Matrix im2col(const Matrix& input, const ConvGeometry& g);
/// Adjoint of im2col: scatters patch gradients back onto the input grid.
Matrix col2im(const Matrix& patches, const ConvGeometry& g, Index batch);

/// Convolution as W · im2col(x), W being the out_channels × patch_size
/// concatenation of kernels.
class Conv2d final : public Layer {
 public:
  explicit Conv2d(const ConvGeometry& geometry, bool bias = false);

  LayerKind kind() const override;
  Index input_size() const override { return geom_.input_size(); }
  Index output_size() const override { return geom_.output_size(); }
  Matrix infer(const Matrix& input) const override;
  Matrix forward(const Matrix& input, Mode mode) override;
  Matrix backward(const Matrix& grad_output) override;
  void initialize(Rng& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv2d>(*this); }
  std::vector<std::int64_t> config() const override;

  [[nodiscard]] const ConvGeometry& geometry() const noexcept { return geom_; }
  Eigen::Map<Matrix> weight() { return {params_[0].value.data(), geom_.out_channels, geom_.patch_size()}; }
  Eigen::Map<const Matrix> weight() const {
    return {params_[0].value.data(), geom_.out_channels, geom_.patch_size()};
  }

 private:
  ConvGeometry geom_;
  Matrix patches_;
};

/// y = X^(1)···X^(L) x + b where only the support values of each factor are
/// trainable parameters ("factor_k", role factor).
class ButterflyLinear final : public Layer {
 public:
  ButterflyLinear(Index in, Index out, butterfly::ButterflyChain chain, bool bias = true);
  /// Uses the minimal-parameter chain with `depth` factors.
  ButterflyLinear(Index in, Index out, int depth, bool bias = true);

  LayerKind kind() const override { return LayerKind::butterfly_linear; }
  Index input_size() const override { return in_; }
  Index output_size() const override { return out_; }
  Matrix infer(const Matrix& input) const override;
  Matrix forward(const Matrix& input, Mode mode) override;
  Matrix backward(const Matrix& grad_output) override;
  void initialize(Rng& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ButterflyLinear>(*this); }
  std::vector<std::int64_t> config() const override;

  [[nodiscard]] const butterfly::ButterflyChain& chain() const noexcept { return chain_; }
  [[nodiscard]] butterfly::FactorizedMatrix<double> factorized() const;

 private:
  Index in_;
  Index out_;
  butterfly::ButterflyChain chain_;
  std::vector<butterfly::RowMatrixX<double>> trace_;
};

/// Convolution whose kernel-concatenation matrix is butterfly-factorized.
class ButterflyConv final : public Layer {
 public:
  ButterflyConv(const ConvGeometry& geometry, butterfly::ButterflyChain chain, bool bias = false);
  ButterflyConv(const ConvGeometry& geometry, int depth, bool bias = false);

  LayerKind kind() const override { return LayerKind::butterfly_conv; }
  Index input_size() const override { return geom_.input_size(); }
  Index output_size() const override { return geom_.output_size(); }
  Matrix infer(const Matrix& input) const override;
  Matrix forward(const Matrix& input, Mode mode) override;
  Matrix backward(const Matrix& grad_output) override;
  void initialize(Rng& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ButterflyConv>(*this); }
  std::vector<std::int64_t> config() const override;

  [[nodiscard]] const ConvGeometry& geometry() const noexcept { return geom_; }
  [[nodiscard]] const butterfly::ButterflyChain& chain() const noexcept { return chain_; }
  [[nodiscard]] butterfly::FactorizedMatrix<double> factorized() const;

 private:
  ConvGeometry geom_;
  butterfly::ButterflyChain chain_;
  std::vector<butterfly::RowMatrixX<double>> trace_;
  Index batch_ = 0;
};

/// Per-channel batch normalization over (batch, spatial) positions.
class BatchNorm final : public Layer {
 public:
  BatchNorm(Index channels, Index spatial, double momentum = 0.1, double epsilon = 1e-5);

  LayerKind kind() const override { return LayerKind::batchnorm; }
  Index input_size() const override { return channels_ * spatial_; }
  Index output_size() const override { return channels_ * spatial_; }
  Matrix infer(const Matrix& input) const override;
  Matrix forward(const Matrix& input, Mode mode) override;
  Matrix backward(const Matrix& grad_output) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<BatchNorm>(*this); }
  std::vector<std::int64_t> config() const override { return {channels_, spatial_}; }

 private:
  Index channels_;
  Index spatial_;
  double momentum_;
  double epsilon_;
  Mode mode_ = Mode::eval;
  Matrix normalized_;
  Vector inv_std_;
};

class ReLU final : public Layer {
 public:
  explicit ReLU(Index size) : size_(size) {}
  LayerKind kind() const override { return LayerKind::relu; }
  Index input_size() const override { return size_; }
  Index output_size() const override { return size_; }
  Matrix infer(const Matrix& input) const override;
  Matrix forward(const Matrix& input, Mode mode) override;
  Matrix backward(const Matrix& grad_output) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ReLU>(*this); }
  std::vector<std::int64_t> config() const override { return {size_}; }

 private:
  Index size_;
  Matrix input_;
};

/// Global average pooling: channels × spatial → channels.
class AvgPool final : public Layer {
 public:
  AvgPool(Index channels, Index spatial) : channels_(channels), spatial_(spatial) {}
  LayerKind kind() const override { return LayerKind::avgpool; }
  Index input_size() const override { return channels_ * spatial_; }
  Index output_size() const override { return channels_; }
  Matrix infer(const Matrix& input) const override;
  Matrix forward(const Matrix& input, Mode mode) override;
  Matrix backward(const Matrix& grad_output) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<AvgPool>(*this); }
  std::vector<std::int64_t> config() const override { return {channels_, spatial_}; }

 private:
  Index channels_;
  Index spatial_;
};

/// Identity on the flat activation layout; marks the image → vector boundary.
class Flatten final : public Layer {
 public:
  explicit Flatten(Index size) : size_(size) {}
  LayerKind kind() const override { return LayerKind::flatten; }
  Index input_size() const override { return size_; }
  Index output_size() const override { return size_; }
  Matrix infer(const Matrix& input) const override;
  Matrix forward(const Matrix& input, Mode mode) override;
  Matrix backward(const Matrix& grad_output) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Flatten>(*this); }
  std::vector<std::int64_t> config() const override { return {size_}; }

 private:
  Index size_;
};

/// Rebuilds an uninitialized layer from kind() and config().
std::unique_ptr<Layer> make_layer(LayerKind kind, std::span<const std::int64_t> config);

}  // namespace sparsemia::nn
