#include "mmblock/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "mmblock/kernels.hpp"
#include "mmblock/types.hpp"

namespace mmblock::nn {

namespace {

void fill_uniform(std::span<double> v, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& x : v) x = dist(rng);
}

}  // namespace

// Dense ---------------------------------------------------------------------

DenseParams DenseParams::zeros(std::size_t in, std::size_t out) {
  return {Tensor2(out, in), Vector(out, 0.0)};
}

DenseParams make_dense(std::size_t in, std::size_t out, std::mt19937_64& rng) {
  auto p = DenseParams::zeros(in, out);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  fill_uniform(p.weight.flat(), bound, rng);
  fill_uniform(p.bias, bound, rng);
  return p;
}

Vector dense_forward(const DenseParams& p, std::span<const double> x) {
  check_size(x.size(), p.in(), "dense input");
  Vector y(p.out());
  kernels::affine(p.weight.flat(), p.bias, x, y);
  check_finite(y, "dense output");
  return y;
}

void dense_backward(const DenseParams& p, std::span<const double> x, std::span<const double> dy,
                    DenseParams& grad, std::span<double> dx) {
  check_size(dy.size(), p.out(), "dense output gradient");
  check_size(x.size(), p.in(), "dense input");
  for (std::size_t r = 0; r < p.out(); ++r) {
    auto g = grad.weight.row(r);
    for (std::size_t c = 0; c < p.in(); ++c) g[c] += dy[r] * x[c];
    grad.bias[r] += dy[r];
  }
  if (!dx.empty()) {
    check_size(dx.size(), p.in(), "dense input gradient");
    for (std::size_t c = 0; c < p.in(); ++c) dx[c] = 0.0;
    for (std::size_t r = 0; r < p.out(); ++r) {
      const auto w = p.weight.row(r);
      for (std::size_t c = 0; c < p.in(); ++c) dx[c] += w[c] * dy[r];
    }
  }
}

void collect(DenseParams& p, ParamViews& out) {
  out.push_back(p.weight.flat());
  out.push_back(p.bias);
}

// LSTM ----------------------------------------------------------------------

LstmParams LstmParams::zeros(std::size_t input_size, std::size_t hidden_size) {
  return {input_size, hidden_size, Tensor2(4 * hidden_size, input_size),
          Tensor2(4 * hidden_size, hidden_size), Vector(4 * hidden_size, 0.0)};
}

LstmParams make_lstm(std::size_t input_size, std::size_t hidden_size, std::mt19937_64& rng) {
  auto p = LstmParams::zeros(input_size, hidden_size);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  fill_uniform(p.w_input.flat(), bound, rng);
  fill_uniform(p.w_hidden.flat(), bound, rng);
  fill_uniform(p.bias, bound, rng);
  for (std::size_t k = hidden_size; k < 2 * hidden_size; ++k) p.bias[k] = 1.0;
  return p;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LstmResult lstm_forward(const LstmParams& p, std::span<const Vector> sequence,
                        std::span<const double> h0, std::span<const double> c0) {
  if (sequence.empty()) throw Error(ErrorKind::shape_mismatch, "lstm sequence is empty");
  const std::size_t H = p.hidden_size;
  check_size(p.w_input.rows(), 4 * H, "lstm input weights");
  check_size(p.w_hidden.rows(), 4 * H, "lstm hidden weights");
  check_size(p.bias.size(), 4 * H, "lstm bias");

  LstmResult out;
  Vector h = h0.empty() ? Vector(H, 0.0) : Vector(h0.begin(), h0.end());
  Vector c = c0.empty() ? Vector(H, 0.0) : Vector(c0.begin(), c0.end());
  check_size(h.size(), H, "lstm h0");
  check_size(c.size(), H, "lstm c0");
  const Vector zero_bias(4 * H, 0.0);
  Vector z(4 * H), zh(4 * H);

  for (const auto& x : sequence) {
    check_size(x.size(), p.input_size, "lstm input");
    kernels::affine(p.w_input.flat(), p.bias, x, z);
    kernels::affine(p.w_hidden.flat(), zero_bias, h, zh);
    LstmStepCache s;
    s.x = x;
    s.h_prev = h;
    s.c_prev = c;
    s.i.resize(H);
    s.f.resize(H);
    s.g.resize(H);
    s.o.resize(H);
    s.c.resize(H);
    s.tanh_c.resize(H);
    for (std::size_t k = 0; k < H; ++k) {
      s.i[k] = sigmoid(z[k] + zh[k]);
      s.f[k] = sigmoid(z[H + k] + zh[H + k]);
      s.g[k] = std::tanh(z[2 * H + k] + zh[2 * H + k]);
      s.o[k] = sigmoid(z[3 * H + k] + zh[3 * H + k]);
      s.c[k] = s.f[k] * s.c_prev[k] + s.i[k] * s.g[k];
      s.tanh_c[k] = std::tanh(s.c[k]);
      h[k] = s.o[k] * s.tanh_c[k];
    }
    c = s.c;
    check_finite(h, "lstm hidden state");
    out.hidden.push_back(h);
    out.cache.push_back(std::move(s));
  }
  out.h = h;
  out.c = c;
  return out;
}

void lstm_backward(const LstmParams& p, const std::vector<LstmStepCache>& cache,
                   std::span<const Vector> d_hidden, LstmParams& grad,
                   std::vector<Vector>* d_inputs) {
  const std::size_t H = p.hidden_size;
  const std::size_t I = p.input_size;
  const std::size_t T = cache.size();
  check_size(d_hidden.size(), T, "lstm hidden gradients");
  if (d_inputs) d_inputs->assign(T, Vector(I, 0.0));

  Vector dh_next(H, 0.0), dc_next(H, 0.0), dz(4 * H);
  for (std::size_t step = T; step-- > 0;) {
    const auto& s = cache[step];
    check_size(d_hidden[step].size(), H, "lstm hidden gradient");
    for (std::size_t k = 0; k < H; ++k) {
      const double dh = d_hidden[step][k] + dh_next[k];
      const double d_o = dh * s.tanh_c[k];
      const double dc = dc_next[k] + dh * s.o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]);
      const double d_i = dc * s.g[k];
      const double d_g = dc * s.i[k];
      const double d_f = dc * s.c_prev[k];
      dc_next[k] = dc * s.f[k];
      dz[k] = d_i * s.i[k] * (1.0 - s.i[k]);
      dz[H + k] = d_f * s.f[k] * (1.0 - s.f[k]);
      dz[2 * H + k] = d_g * (1.0 - s.g[k] * s.g[k]);
      dz[3 * H + k] = d_o * s.o[k] * (1.0 - s.o[k]);
    }
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    for (std::size_t r = 0; r < 4 * H; ++r) {
      const double d = dz[r];
      grad.bias[r] += d;
      auto gx = grad.w_input.row(r);
      for (std::size_t c = 0; c < I; ++c) gx[c] += d * s.x[c];
      auto gh = grad.w_hidden.row(r);
      for (std::size_t c = 0; c < H; ++c) gh[c] += d * s.h_prev[c];
      const auto wh = p.w_hidden.row(r);
      for (std::size_t c = 0; c < H; ++c) dh_next[c] += wh[c] * d;
      if (d_inputs) {
        const auto wx = p.w_input.row(r);
        auto& dx = (*d_inputs)[step];
        for (std::size_t c = 0; c < I; ++c) dx[c] += wx[c] * d;
      }
    }
  }
}

void collect(LstmParams& p, ParamViews& out) {
  out.push_back(p.w_input.flat());
  out.push_back(p.w_hidden.flat());
  out.push_back(p.bias);
}

StackedLstmResult stacked_lstm_forward(std::span<const LstmParams> layers,
                                       std::span<const Vector> sequence) {
  if (layers.empty()) throw Error(ErrorKind::shape_mismatch, "stacked lstm has no layers");
  StackedLstmResult out;
  out.layers.reserve(layers.size());
  std::span<const Vector> input = sequence;
  for (const auto& layer : layers) {
    out.layers.push_back(lstm_forward(layer, input));
    input = out.layers.back().hidden;
  }
  return out;
}

void stacked_lstm_backward(std::span<const LstmParams> layers, const StackedLstmResult& fwd,
                           std::span<const double> d_h_last, std::span<LstmParams> grads) {
  const std::size_t L = layers.size();
  check_size(grads.size(), L, "stacked lstm gradients");
  const std::size_t T = fwd.layers.back().hidden.size();
  std::vector<Vector> d_hidden(T, Vector(layers[L - 1].hidden_size, 0.0));
  d_hidden[T - 1].assign(d_h_last.begin(), d_h_last.end());
  for (std::size_t l = L; l-- > 0;) {
    std::vector<Vector> d_inputs;
    lstm_backward(layers[l], fwd.layers[l].cache, d_hidden, grads[l], l > 0 ? &d_inputs : nullptr);
    if (l > 0) d_hidden = std::move(d_inputs);
  }
}

// Conv1d --------------------------------------------------------------------

Conv1dParams Conv1dParams::zeros(std::size_t in_channels, std::size_t out_channels,
                                 std::size_t kernel, std::size_t stride) {
  if (kernel == 0 || stride == 0)
    throw Error(ErrorKind::shape_mismatch, "conv1d kernel and stride must be positive");
  return {in_channels, out_channels, kernel, stride,
          Vector(out_channels * in_channels * kernel, 0.0), Vector(out_channels, 0.0)};
}

Conv1dParams make_conv1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
                         std::size_t stride, std::mt19937_64& rng) {
  auto p = Conv1dParams::zeros(in_channels, out_channels, kernel, stride);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_channels * kernel));
  fill_uniform(p.weight, bound, rng);
  fill_uniform(p.bias, bound, rng);
  return p;
}

Tensor2 conv1d_forward(const Conv1dParams& p, const Tensor2& signal) {
  check_size(signal.rows(), p.in_channels, "conv1d input channels");
  if (signal.cols() < p.kernel)
    throw Error(ErrorKind::shape_mismatch, "conv1d kernel longer than signal");
  const std::size_t L = p.output_length(signal.cols());
  Tensor2 out(p.out_channels, L);
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    for (std::size_t t = 0; t < L; ++t) {
      double acc = p.bias[o];
      for (std::size_t c = 0; c < p.in_channels; ++c) {
        const auto x = signal.row(c);
        for (std::size_t j = 0; j < p.kernel; ++j) acc += p.w(o, c, j) * x[t * p.stride + j];
      }
      out(o, t) = acc;
    }
  }
  check_finite(out.flat(), "conv1d output");
  return out;
}

void conv1d_backward(const Conv1dParams& p, const Tensor2& signal, const Tensor2& d_out,
                     Conv1dParams& grad, Tensor2* d_signal) {
  const std::size_t L = p.output_length(signal.cols());
  check_size(d_out.rows(), p.out_channels, "conv1d output gradient channels");
  check_size(d_out.cols(), L, "conv1d output gradient length");
  if (d_signal) *d_signal = Tensor2(signal.rows(), signal.cols());
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    for (std::size_t t = 0; t < L; ++t) {
      const double d = d_out(o, t);
      grad.bias[o] += d;
      for (std::size_t c = 0; c < p.in_channels; ++c) {
        const auto x = signal.row(c);
        for (std::size_t j = 0; j < p.kernel; ++j) {
          grad.w(o, c, j) += d * x[t * p.stride + j];
          if (d_signal) (*d_signal)(c, t * p.stride + j) += p.w(o, c, j) * d;
        }
      }
    }
  }
}

void collect(Conv1dParams& p, ParamViews& out) {
  out.push_back(p.weight);
  out.push_back(p.bias);
}

// Pooling / activations -----------------------------------------------------

Vector global_avg_pool(const Tensor2& x) {
  Vector out(x.rows(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double s = 0.0;
    for (double v : x.row(r)) s += v;
    out[r] = s / static_cast<double>(x.cols());
  }
  return out;
}

Tensor2 global_avg_pool_backward(std::span<const double> dy, std::size_t length) {
  Tensor2 dx(dy.size(), length);
  for (std::size_t r = 0; r < dy.size(); ++r)
    for (std::size_t t = 0; t < length; ++t) dx(r, t) = dy[r] / static_cast<double>(length);
  return dx;
}

void relu_inplace(std::span<double> x) {
  for (auto& v : x) v = v > 0.0 ? v : 0.0;
}

void relu_backward_inplace(std::span<const double> y, std::span<double> dy) {
  for (std::size_t i = 0; i < dy.size(); ++i)
    if (!(y[i] > 0.0)) dy[i] = 0.0;
}

}  // namespace mmblock::nn
