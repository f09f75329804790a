// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/nn/layers.hpp"

#include "sparsemia/nn/init.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sparsemia::nn {

namespace bf = sparsemia::butterfly;
using RowMatrix = bf::RowMatrixX<double>;

namespace {

void mask_gradient(Parameter& p) {
  if (!p.mask) return;
  for (Index i = 0; i < p.size(); ++i) {
    if (!p.mask->keeps(i)) p.grad[i] = 0.0;
  }
}

std::vector<std::int64_t> chain_config(const bf::ButterflyChain& chain) {
  std::vector<std::int64_t> out{static_cast<std::int64_t>(chain.size())};
  for (const auto& f : chain) {
    out.insert(out.end(), {f.outer, f.block_rows, f.block_cols, f.inner});
  }
  return out;
}

bf::ButterflyChain chain_from_config(std::span<const std::int64_t> cfg) {
  if (cfg.empty()) throw std::invalid_argument("butterfly layer config: missing chain");
  const auto count = static_cast<std::size_t>(cfg[0]);
  if (cfg.size() != 1 + 4 * count) throw std::invalid_argument("butterfly layer config: bad chain");
  std::vector<bf::FactorSpec> factors(count);
  for (std::size_t k = 0; k < count; ++k) {
    factors[k] = {cfg[1 + 4 * k], cfg[2 + 4 * k], cfg[3 + 4 * k], cfg[4 + 4 * k]};
  }
  return bf::ButterflyChain(std::move(factors));
}

void add_factor_params(std::vector<Parameter>& params, const bf::ButterflyChain& chain) {
  for (std::size_t k = 0; k < chain.size(); ++k) {
    params.emplace_back("factor_" + std::to_string(k), ParamRole::factor,
                        std::vector<Index>{chain[k].nnz()});
  }
}

// Factor 0 gets the default 1/√fan_in bound and the remaining factors a
// variance-preserving bound, so the product has the same variance as a dense
// layer under the default initialization.
void init_factors(std::span<Parameter> params, const bf::ButterflyChain& chain, Rng& rng) {
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const double fan_in = static_cast<double>(chain[k].block_cols);
    const double bound = (k == 0 ? 1.0 : std::sqrt(3.0)) / std::sqrt(fan_in);
    params[k].value = init_uniform_bound(chain[k].nnz(), bound, rng);
  }
}

bf::FactorizedMatrix<double> factorized_from(std::span<const Parameter> params,
                                             const bf::ButterflyChain& chain) {
  std::vector<Vector> values;
  for (std::size_t k = 0; k < chain.size(); ++k) values.push_back(params[k].value);
  return {chain, std::move(values)};
}

// (out_channels × batch·positions) ↔ (out_channels·positions × batch).
Matrix fold_channels(const Matrix& cols, Index channels, Index positions, Index batch) {
  Matrix y(channels * positions, batch);
  for (Index b = 0; b < batch; ++b) {
    Eigen::Map<Matrix>(y.col(b).data(), positions, channels) =
        cols.middleCols(b * positions, positions).transpose();
  }
  return y;
}

Matrix unfold_channels(const Matrix& y, Index channels, Index positions) {
  const Index batch = y.cols();
  Matrix cols(channels, batch * positions);
  for (Index b = 0; b < batch; ++b) {
    cols.middleCols(b * positions, positions) =
        Eigen::Map<const Matrix>(y.col(b).data(), positions, channels).transpose();
  }
  return cols;
}

void add_bias_rows(Matrix& out, const Vector& bias) { out.colwise() += bias; }

// Bias per channel on the folded layout.
void add_channel_bias(Matrix& y, const Vector& bias, Index positions) {
  for (Index c = 0; c < bias.size(); ++c) y.middleRows(c * positions, positions).array() += bias[c];
}

Vector channel_sums(const Matrix& g, Index channels, Index positions) {
  Vector s(channels);
  for (Index c = 0; c < channels; ++c) s[c] = g.middleRows(c * positions, positions).sum();
  return s;
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::dense: return "dense";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::butterfly_linear: return "butterfly_linear";
    case LayerKind::butterfly_conv: return "butterfly_conv";
    case LayerKind::masked_dense: return "masked_dense";
    case LayerKind::masked_conv: return "masked_conv";
    case LayerKind::batchnorm: return "batchnorm";
    case LayerKind::relu: return "relu";
    case LayerKind::avgpool: return "avgpool";
    case LayerKind::flatten: return "flatten";
  }
  return "unknown";
}

void Layer::check_input(const Matrix& input) const {
  if (input.rows() != input_size()) {
    throw std::invalid_argument(std::string(to_string(kind())) + ": expected " +
                                std::to_string(input_size()) + " input features, got " +
                                std::to_string(input.rows()));
  }
}

// --- Dense -----------------------------------------------------------------

Dense::Dense(Index in, Index out, bool bias) : in_(in), out_(out) {
  if (in < 1 || out < 1) throw std::invalid_argument("Dense: sizes must be positive");
  params_.emplace_back("weight", ParamRole::weight, std::vector<Index>{out, in});
  if (bias) params_.emplace_back("bias", ParamRole::bias, std::vector<Index>{out});
}

LayerKind Dense::kind() const {
  return params_[0].mask ? LayerKind::masked_dense : LayerKind::dense;
}

Matrix Dense::infer(const Matrix& input) const {
  check_input(input);
  Matrix out = weight() * input;
  if (has_bias()) add_bias_rows(out, params_[1].value);
  return out;
}

Matrix Dense::forward(const Matrix& input, Mode) {
  Matrix out = infer(input);
  input_ = input;
  return out;
}

Matrix Dense::backward(const Matrix& grad_output) {
  Eigen::Map<Matrix>(params_[0].grad.data(), out_, in_) += grad_output * input_.transpose();
  mask_gradient(params_[0]);
  if (has_bias()) params_[1].grad += grad_output.rowwise().sum();
  return weight().transpose() * grad_output;
}

void Dense::initialize(Rng& rng) {
  params_[0].value = init_uniform(params_[0].size(), in_, rng);
  if (has_bias()) params_[1].value = init_uniform(out_, in_, rng);
  params_[0].apply_mask();
}

std::vector<std::int64_t> Dense::config() const { return {in_, out_, has_bias() ? 1 : 0}; }

// --- Convolution -----------------------------------------------------------

void ConvGeometry::validate() const {
  if (in_channels < 1 || out_channels < 1 || kernel < 1 || stride < 1 || padding < 0 ||
      in_height < 1 || in_width < 1 || out_height() < 1 || out_width() < 1) {
    throw std::invalid_argument("invalid convolution geometry");
  }
}

Matrix im2col(const Matrix& input, const ConvGeometry& g) {
  const Index batch = input.cols();
  const Index oh = g.out_height();
  const Index ow = g.out_width();
  const Index positions = oh * ow;
  Matrix patches = Matrix::Zero(g.patch_size(), batch * positions);
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < g.in_channels; ++c) {
      for (Index ky = 0; ky < g.kernel; ++ky) {
        for (Index kx = 0; kx < g.kernel; ++kx) {
          const Index row = (c * g.kernel + ky) * g.kernel + kx;
          for (Index y = 0; y < oh; ++y) {
            const Index iy = y * g.stride + ky - g.padding;
            if (iy < 0 || iy >= g.in_height) continue;
            for (Index x = 0; x < ow; ++x) {
              const Index ix = x * g.stride + kx - g.padding;
              if (ix < 0 || ix >= g.in_width) continue;
              patches(row, b * positions + y * ow + x) =
                  input((c * g.in_height + iy) * g.in_width + ix, b);
            }
          }
        }
      }
    }
  }
  return patches;
}

Matrix col2im(const Matrix& patches, const ConvGeometry& g, Index batch) {
  const Index oh = g.out_height();
  const Index ow = g.out_width();
  const Index positions = oh * ow;
  Matrix grad = Matrix::Zero(g.input_size(), batch);
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < g.in_channels; ++c) {
      for (Index ky = 0; ky < g.kernel; ++ky) {
        for (Index kx = 0; kx < g.kernel; ++kx) {
          const Index row = (c * g.kernel + ky) * g.kernel + kx;
          for (Index y = 0; y < oh; ++y) {
            const Index iy = y * g.stride + ky - g.padding;
            if (iy < 0 || iy >= g.in_height) continue;
            for (Index x = 0; x < ow; ++x) {
              const Index ix = x * g.stride + kx - g.padding;
              if (ix < 0 || ix >= g.in_width) continue;
              grad((c * g.in_height + iy) * g.in_width + ix, b) +=
                  patches(row, b * positions + y * ow + x);
            }
          }
        }
      }
    }
  }
  return grad;
}

Conv2d::Conv2d(const ConvGeometry& geometry, bool bias) : geom_(geometry) {
  geom_.validate();
  params_.emplace_back("weight", ParamRole::weight,
                       std::vector<Index>{geom_.out_channels, geom_.in_channels, geom_.kernel,
                                          geom_.kernel});
  if (bias) params_.emplace_back("bias", ParamRole::bias, std::vector<Index>{geom_.out_channels});
}

LayerKind Conv2d::kind() const {
  return params_[0].mask ? LayerKind::masked_conv : LayerKind::conv2d;
}

Matrix Conv2d::infer(const Matrix& input) const {
  check_input(input);
  const Index positions = geom_.out_height() * geom_.out_width();
  Matrix y = fold_channels(weight() * im2col(input, geom_), geom_.out_channels, positions,
                           input.cols());
  if (params_.size() > 1) add_channel_bias(y, params_[1].value, positions);
  return y;
}

Matrix Conv2d::forward(const Matrix& input, Mode) {
  check_input(input);
  patches_ = im2col(input, geom_);
  const Index positions = geom_.out_height() * geom_.out_width();
  Matrix y = fold_channels(weight() * patches_, geom_.out_channels, positions, input.cols());
  if (params_.size() > 1) add_channel_bias(y, params_[1].value, positions);
  return y;
}

Matrix Conv2d::backward(const Matrix& grad_output) {
  const Index positions = geom_.out_height() * geom_.out_width();
  const Index batch = grad_output.cols();
  const Matrix g = unfold_channels(grad_output, geom_.out_channels, positions);
  Eigen::Map<Matrix>(params_[0].grad.data(), geom_.out_channels, geom_.patch_size()) +=
      g * patches_.transpose();
  mask_gradient(params_[0]);
  if (params_.size() > 1) {
    params_[1].grad += channel_sums(grad_output, geom_.out_channels, positions);
  }
  return col2im(weight().transpose() * g, geom_, batch);
}

void Conv2d::initialize(Rng& rng) {
  params_[0].value = init_uniform(params_[0].size(), geom_.patch_size(), rng);
  if (params_.size() > 1) params_[1].value = init_uniform(geom_.out_channels, geom_.patch_size(), rng);
  params_[0].apply_mask();
}

std::vector<std::int64_t> Conv2d::config() const {
  return {geom_.in_channels, geom_.out_channels, geom_.kernel, geom_.stride,
          geom_.padding,     geom_.in_height,    geom_.in_width, params_.size() > 1 ? 1 : 0};
}

// --- Butterfly linear ------------------------------------------------------

ButterflyLinear::ButterflyLinear(Index in, Index out, bf::ButterflyChain chain, bool bias)
    : in_(in), out_(out), chain_(std::move(chain)) {
  if (chain_.rows() != out || chain_.cols() != in) {
    throw std::invalid_argument("ButterflyLinear: chain shape differs from out × in");
  }
  add_factor_params(params_, chain_);
  if (bias) params_.emplace_back("bias", ParamRole::bias, std::vector<Index>{out});
}

ButterflyLinear::ButterflyLinear(Index in, Index out, int depth, bool bias)
    : ButterflyLinear(in, out, bf::select_min_param_chain(out, in, depth), bias) {}

bf::FactorizedMatrix<double> ButterflyLinear::factorized() const {
  return factorized_from(params_, chain_);
}

Matrix ButterflyLinear::infer(const Matrix& input) const {
  check_input(input);
  Matrix out = bf::factorized_apply(factorized(), RowMatrix(input));
  if (params_.size() > chain_.size()) add_bias_rows(out, params_.back().value);
  return out;
}

Matrix ButterflyLinear::forward(const Matrix& input, Mode) {
  check_input(input);
  Matrix out = bf::factorized_apply_traced(factorized(), RowMatrix(input), trace_);
  if (params_.size() > chain_.size()) add_bias_rows(out, params_.back().value);
  return out;
}

Matrix ButterflyLinear::backward(const Matrix& grad_output) {
  RowMatrix g = grad_output;
  for (std::size_t k = 0; k < chain_.size(); ++k) {
    params_[k].grad += bf::factor_value_gradient(chain_[k], g, trace_[k]);
    g = bf::apply_factor_transpose(chain_[k], params_[k].value, g);
  }
  if (params_.size() > chain_.size()) params_.back().grad += grad_output.rowwise().sum();
  return g;
}

void ButterflyLinear::initialize(Rng& rng) {
  init_factors(params_, chain_, rng);
  if (params_.size() > chain_.size()) params_.back().value = init_uniform(out_, in_, rng);
}

std::vector<std::int64_t> ButterflyLinear::config() const {
  std::vector<std::int64_t> cfg{in_, out_, params_.size() > chain_.size() ? 1 : 0};
  const auto c = chain_config(chain_);
  cfg.insert(cfg.end(), c.begin(), c.end());
  return cfg;
}

// --- Butterfly convolution -------------------------------------------------

ButterflyConv::ButterflyConv(const ConvGeometry& geometry, bf::ButterflyChain chain, bool bias)
    : geom_(geometry), chain_(std::move(chain)) {
  geom_.validate();
  if (chain_.rows() != geom_.out_channels || chain_.cols() != geom_.patch_size()) {
    throw std::invalid_argument("ButterflyConv: chain shape differs from the kernel matrix");
  }
  add_factor_params(params_, chain_);
  if (bias) params_.emplace_back("bias", ParamRole::bias, std::vector<Index>{geom_.out_channels});
}

ButterflyConv::ButterflyConv(const ConvGeometry& geometry, int depth, bool bias)
    : ButterflyConv(geometry,
                    bf::select_min_param_chain(geometry.out_channels, geometry.patch_size(), depth),
                    bias) {}

bf::FactorizedMatrix<double> ButterflyConv::factorized() const {
  return factorized_from(params_, chain_);
}

Matrix ButterflyConv::infer(const Matrix& input) const {
  check_input(input);
  const Index positions = geom_.out_height() * geom_.out_width();
  Matrix cols = bf::factorized_apply(factorized(), RowMatrix(im2col(input, geom_)));
  Matrix y = fold_channels(cols, geom_.out_channels, positions, input.cols());
  if (params_.size() > chain_.size()) add_channel_bias(y, params_.back().value, positions);
  return y;
}

Matrix ButterflyConv::forward(const Matrix& input, Mode) {
  check_input(input);
  batch_ = input.cols();
  const Index positions = geom_.out_height() * geom_.out_width();
  Matrix cols = bf::factorized_apply_traced(factorized(), RowMatrix(im2col(input, geom_)), trace_);
  Matrix y = fold_channels(cols, geom_.out_channels, positions, batch_);
  if (params_.size() > chain_.size()) add_channel_bias(y, params_.back().value, positions);
  return y;
}

Matrix ButterflyConv::backward(const Matrix& grad_output) {
  const Index positions = geom_.out_height() * geom_.out_width();
  RowMatrix g = unfold_channels(grad_output, geom_.out_channels, positions);
  for (std::size_t k = 0; k < chain_.size(); ++k) {
    params_[k].grad += bf::factor_value_gradient(chain_[k], g, trace_[k]);
    g = bf::apply_factor_transpose(chain_[k], params_[k].value, g);
  }
  if (params_.size() > chain_.size()) {
    params_.back().grad += channel_sums(grad_output, geom_.out_channels, positions);
  }
  return col2im(Matrix(g), geom_, batch_);
}

void ButterflyConv::initialize(Rng& rng) {
  init_factors(params_, chain_, rng);
  if (params_.size() > chain_.size()) {
    params_.back().value = init_uniform(geom_.out_channels, geom_.patch_size(), rng);
  }
}

std::vector<std::int64_t> ButterflyConv::config() const {
  std::vector<std::int64_t> cfg{geom_.in_channels, geom_.out_channels, geom_.kernel,
                                geom_.stride,      geom_.padding,      geom_.in_height,
                                geom_.in_width,    params_.size() > chain_.size() ? 1 : 0};
  const auto c = chain_config(chain_);
  cfg.insert(cfg.end(), c.begin(), c.end());
  return cfg;
}

// --- Batch normalization ---------------------------------------------------

BatchNorm::BatchNorm(Index channels, Index spatial, double momentum, double epsilon)
    : channels_(channels), spatial_(spatial), momentum_(momentum), epsilon_(epsilon) {
  if (channels < 1 || spatial < 1) throw std::invalid_argument("BatchNorm: sizes must be positive");
  params_.emplace_back("scale", ParamRole::norm_scale, std::vector<Index>{channels});
  params_.emplace_back("shift", ParamRole::norm_shift, std::vector<Index>{channels});
  params_.emplace_back("running_mean", ParamRole::buffer, std::vector<Index>{channels});
  params_.emplace_back("running_var", ParamRole::buffer, std::vector<Index>{channels});
  params_[0].value.setOnes();
  params_[3].value.setOnes();
}

Matrix BatchNorm::infer(const Matrix& input) const {
  check_input(input);
  Matrix out(input.rows(), input.cols());
  for (Index c = 0; c < channels_; ++c) {
    const double inv = 1.0 / std::sqrt(params_[3].value[c] + epsilon_);
    out.middleRows(c * spatial_, spatial_).array() =
        (input.middleRows(c * spatial_, spatial_).array() - params_[2].value[c]) * inv *
            params_[0].value[c] +
        params_[1].value[c];
  }
  return out;
}

Matrix BatchNorm::forward(const Matrix& input, Mode mode) {
  check_input(input);
  mode_ = mode;
  inv_std_.resize(channels_);
  normalized_.resize(input.rows(), input.cols());
  if (mode == Mode::eval) {
    for (Index c = 0; c < channels_; ++c) {
      inv_std_[c] = 1.0 / std::sqrt(params_[3].value[c] + epsilon_);
      normalized_.middleRows(c * spatial_, spatial_) =
          (input.middleRows(c * spatial_, spatial_).array() - params_[2].value[c]) * inv_std_[c];
    }
    return infer(input);
  }
  const double n = static_cast<double>(spatial_ * input.cols());
  Matrix out(input.rows(), input.cols());
  for (Index c = 0; c < channels_; ++c) {
    const auto block = input.middleRows(c * spatial_, spatial_);
    const double mean = block.sum() / n;
    const double var = (block.array() - mean).square().sum() / n;
    inv_std_[c] = 1.0 / std::sqrt(var + epsilon_);
    normalized_.middleRows(c * spatial_, spatial_) = (block.array() - mean) * inv_std_[c];
    out.middleRows(c * spatial_, spatial_) =
        (normalized_.middleRows(c * spatial_, spatial_).array() * params_[0].value[c] +
         params_[1].value[c])
            .matrix();
    params_[2].value[c] = (1 - momentum_) * params_[2].value[c] + momentum_ * mean;
    const double unbiased = n > 1 ? var * n / (n - 1) : var;
    params_[3].value[c] = (1 - momentum_) * params_[3].value[c] + momentum_ * unbiased;
  }
  return out;
}

Matrix BatchNorm::backward(const Matrix& grad_output) {
  Matrix grad(grad_output.rows(), grad_output.cols());
  const double n = static_cast<double>(spatial_ * grad_output.cols());
  for (Index c = 0; c < channels_; ++c) {
    const auto g = grad_output.middleRows(c * spatial_, spatial_);
    const double gamma = params_[0].value[c];
    const auto xhat = normalized_.middleRows(c * spatial_, spatial_);
    const double sum_g = g.sum();
    const double sum_gx = (g.array() * xhat.array()).sum();
    params_[0].grad[c] += sum_gx;
    params_[1].grad[c] += sum_g;
    if (mode_ == Mode::eval) {
      // Running statistics are constants in evaluation mode.
      grad.middleRows(c * spatial_, spatial_) = g * (gamma * inv_std_[c]);
      continue;
    }
    grad.middleRows(c * spatial_, spatial_) =
        ((n * g.array() - sum_g - xhat.array() * sum_gx) * (gamma * inv_std_[c] / n)).matrix();
  }
  return grad;
}

// --- Elementwise and reshaping layers --------------------------------------

Matrix ReLU::infer(const Matrix& input) const {
  check_input(input);
  return input.cwiseMax(0.0);
}

Matrix ReLU::forward(const Matrix& input, Mode) {
  input_ = input;
  return infer(input);
}

Matrix ReLU::backward(const Matrix& grad_output) {
  return (input_.array() > 0.0).select(grad_output, 0.0);
}

Matrix AvgPool::infer(const Matrix& input) const {
  check_input(input);
  Matrix out(channels_, input.cols());
  for (Index c = 0; c < channels_; ++c) {
    out.row(c) = input.middleRows(c * spatial_, spatial_).colwise().mean();
  }
  return out;
}

Matrix AvgPool::forward(const Matrix& input, Mode) { return infer(input); }

Matrix AvgPool::backward(const Matrix& grad_output) {
  Matrix grad(channels_ * spatial_, grad_output.cols());
  for (Index c = 0; c < channels_; ++c) {
    grad.middleRows(c * spatial_, spatial_) =
        grad_output.row(c).replicate(spatial_, 1) / static_cast<double>(spatial_);
  }
  return grad;
}

Matrix Flatten::infer(const Matrix& input) const {
  check_input(input);
  return input;
}

Matrix Flatten::forward(const Matrix& input, Mode) { return infer(input); }

Matrix Flatten::backward(const Matrix& grad_output) { return grad_output; }

// --- Factory ---------------------------------------------------------------

std::unique_ptr<Layer> make_layer(LayerKind kind, std::span<const std::int64_t> cfg) {
  auto need = [&](std::size_t n) {
    if (cfg.size() < n) {
      throw std::invalid_argument(std::string("layer config too short for ") +
                                  std::string(to_string(kind)));
    }
  };
  auto geometry = [&] {
    need(8);
    return ConvGeometry{cfg[0], cfg[1], cfg[2], cfg[3], cfg[4], cfg[5], cfg[6]};
  };
  switch (kind) {
    case LayerKind::dense:
    case LayerKind::masked_dense:
      need(3);
      return std::make_unique<Dense>(cfg[0], cfg[1], cfg[2] != 0);
    case LayerKind::conv2d:
    case LayerKind::masked_conv:
      return std::make_unique<Conv2d>(geometry(), cfg[7] != 0);
    case LayerKind::butterfly_linear:
      need(4);
      return std::make_unique<ButterflyLinear>(cfg[0], cfg[1], chain_from_config(cfg.subspan(3)),
                                               cfg[2] != 0);
    case LayerKind::butterfly_conv: {
      const auto g = geometry();
      return std::make_unique<ButterflyConv>(g, chain_from_config(cfg.subspan(8)), cfg[7] != 0);
    }
    case LayerKind::batchnorm:
      need(2);
      return std::make_unique<BatchNorm>(cfg[0], cfg[1]);
    case LayerKind::relu:
      need(1);
      return std::make_unique<ReLU>(cfg[0]);
    case LayerKind::avgpool:
      need(2);
      return std::make_unique<AvgPool>(cfg[0], cfg[1]);
    case LayerKind::flatten:
      need(1);
      return std::make_unique<Flatten>(cfg[0]);
  }
  throw std::invalid_argument("unknown layer kind");
}

}  // namespace sparsemia::nn
