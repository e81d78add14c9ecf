#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "mmblock/nn/tensor.hpp"

namespace mmblock::nn {

/// Flat views over every parameter array of a layer or model, in a fixed order.
/// Gradient containers share the parameter type, so the same collect() call yields
/// matching gradient views.
using ParamViews = std::vector<std::span<double>>;

// ---------------------------------------------------------------------------
// Dense

struct DenseParams {
  Tensor2 weight;  // out x in
  Vector bias;     // out

  std::size_t in() const { return weight.cols(); }
  std::size_t out() const { return weight.rows(); }

  static DenseParams zeros(std::size_t in, std::size_t out);
  friend bool operator==(const DenseParams&, const DenseParams&) = default;
};

/// Weights and biases uniform in +-1/sqrt(in).
DenseParams make_dense(std::size_t in, std::size_t out, std::mt19937_64& rng);

Vector dense_forward(const DenseParams& p, std::span<const double> x);

/// Accumulates parameter gradients into `grad`; writes dL/dx into `dx` when non-empty.
void dense_backward(const DenseParams& p, std::span<const double> x, std::span<const double> dy,
                    DenseParams& grad, std::span<double> dx);

void collect(DenseParams& p, ParamViews& out);

// ---------------------------------------------------------------------------
// LSTM

/// Gate rows are stacked input, forget, candidate, output (H rows each).
struct LstmParams {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  Tensor2 w_input;   // 4H x input_size
  Tensor2 w_hidden;  // 4H x H
  Vector bias;       // 4H

  static LstmParams zeros(std::size_t input_size, std::size_t hidden_size);
  friend bool operator==(const LstmParams&, const LstmParams&) = default;
};

/// Uniform in +-1/sqrt(hidden_size); forget-gate bias set to 1.
LstmParams make_lstm(std::size_t input_size, std::size_t hidden_size, std::mt19937_64& rng);

struct LstmStepCache {
  Vector x, h_prev, c_prev;
  Vector i, f, g, o;
  Vector c, tanh_c;
};

struct LstmResult {
  std::vector<Vector> hidden;  // h_1 .. h_T
  Vector h;                    // h_T
  Vector c;                    // c_T
  std::vector<LstmStepCache> cache;
};

/// Empty h0/c0 mean zero initial state.
LstmResult lstm_forward(const LstmParams& p, std::span<const Vector> sequence,
                        std::span<const double> h0 = {}, std::span<const double> c0 = {});

/// Backpropagation through time. d_hidden[t] is the external gradient on h_t (may be
/// all zero except the last step). Accumulates into `grad`; fills `d_inputs` when
/// non-null.
void lstm_backward(const LstmParams& p, const std::vector<LstmStepCache>& cache,
                   std::span<const Vector> d_hidden, LstmParams& grad,
                   std::vector<Vector>* d_inputs);

void collect(LstmParams& p, ParamViews& out);

/// Stacked LSTM: layer k consumes the hidden sequence of layer k-1.
struct StackedLstmResult {
  std::vector<LstmResult> layers;
  const Vector& h() const { return layers.back().h; }
};

StackedLstmResult stacked_lstm_forward(std::span<const LstmParams> layers,
                                       std::span<const Vector> sequence);

/// Gradient arrives on the top layer's final hidden state only.
void stacked_lstm_backward(std::span<const LstmParams> layers, const StackedLstmResult& fwd,
                           std::span<const double> d_h_last, std::span<LstmParams> grads);

// ---------------------------------------------------------------------------
// 1D convolution (valid cross-correlation)

struct Conv1dParams {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  Vector weight;  // [out][in][kernel]
  Vector bias;    // out

  double& w(std::size_t o, std::size_t c, std::size_t j) {
    return weight[(o * in_channels + c) * kernel + j];
  }
  double w(std::size_t o, std::size_t c, std::size_t j) const {
    return weight[(o * in_channels + c) * kernel + j];
  }
  std::size_t output_length(std::size_t length) const { return (length - kernel) / stride + 1; }

  static Conv1dParams zeros(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
                            std::size_t stride);
  friend bool operator==(const Conv1dParams&, const Conv1dParams&) = default;
};

/// Uniform in +-1/sqrt(in_channels * kernel).
Conv1dParams make_conv1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
                         std::size_t stride, std::mt19937_64& rng);

/// signal: channels x length. Output: out_channels x output_length(length).
Tensor2 conv1d_forward(const Conv1dParams& p, const Tensor2& signal);

void conv1d_backward(const Conv1dParams& p, const Tensor2& signal, const Tensor2& d_out,
                     Conv1dParams& grad, Tensor2* d_signal);

void collect(Conv1dParams& p, ParamViews& out);

// ---------------------------------------------------------------------------
// Pooling and activations

/// Mean over the length axis: one value per channel.
Vector global_avg_pool(const Tensor2& x);
Tensor2 global_avg_pool_backward(std::span<const double> dy, std::size_t length);

double sigmoid(double z);
void relu_inplace(std::span<double> x);
/// dy *= (y > 0), given the ReLU output y.
void relu_backward_inplace(std::span<const double> y, std::span<double> dy);

}  // namespace mmblock::nn
