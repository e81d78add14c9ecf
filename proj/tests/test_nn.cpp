#include <doctest.h>

#include <cmath>
#include <random>

#include "mmblock/nn/adam.hpp"
#include "mmblock/nn/layers.hpp"
#include "mmblock/nn/loss.hpp"
#include "oracles.hpp"

using namespace mmblock;
using namespace mmblock::nn;

namespace {

double weighted_sum(std::span<const double> y, std::span<const double> r) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
  return s;
}

std::vector<Vector> random_sequence(std::size_t len, std::size_t dim, std::mt19937_64& rng) {
  std::vector<Vector> s;
  for (std::size_t t = 0; t < len; ++t) s.push_back(oracle::random_vector(dim, rng));
  return s;
}

ParamViews views(std::vector<Vector>& vs) {
  ParamViews v;
  for (auto& x : vs) v.emplace_back(x);
  return v;
}

// Reference Adam, written from the textbook update.
struct AdamOracle {
  double lr, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  std::vector<double> m, v;
  long t = 0;
  void step(std::vector<double>& w, const std::vector<double>& g) {
    if (m.empty()) m.assign(w.size(), 0.0), v.assign(w.size(), 0.0);
    ++t;
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(b1, t));
      const double vh = v[i] / (1 - std::pow(b2, t));
      w[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
  }
};

}  // namespace

TEST_CASE("dense gradients") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    auto p = make_dense(7, 5, rng);
    auto x = oracle::random_vector(7, rng);
    const auto r = oracle::random_vector(5, rng);
    auto g = DenseParams::zeros(7, 5);
    Vector dx(7, 0.0);
    dense_backward(p, x, r, g, dx);
    ParamViews pv, gv;
    collect(p, pv);
    collect(g, gv);
    auto loss = [&] { return weighted_sum(dense_forward(p, x), r); };
    CHECK(oracle::check_gradients(pv, gv, loss) <= 1e-4);
    ParamViews xv{std::span<double>(x)}, dxv{std::span<double>(dx)};
    CHECK(oracle::check_gradients(xv, dxv, loss) <= 1e-4);
  }
}

TEST_CASE("lstm base cases") {
  std::mt19937_64 rng(2);
  auto zero = LstmParams::zeros(3, 4);
  const auto out = lstm_forward(zero, std::vector<Vector>(5, Vector(3, 0.0)));
  for (const auto& h : out.hidden)
    for (double v : h) CHECK(v == 0.0);

  // one step by hand
  auto p = make_lstm(3, 2, rng);
  const auto x = oracle::random_vector(3, rng);
  const auto one = lstm_forward(p, std::vector<Vector>{x});
  const std::size_t H = 2;
  for (std::size_t j = 0; j < H; ++j) {
    auto pre = [&](std::size_t gate) {
      double s = p.bias[gate * H + j];
      for (std::size_t k = 0; k < 3; ++k) s += p.w_input(gate * H + j, k) * x[k];
      return s;
    };
    const double i = sigmoid(pre(0)), g = std::tanh(pre(2)), o = sigmoid(pre(3));
    const double c = i * g;
    CHECK(one.c[j] == doctest::Approx(c).epsilon(1e-14));
    CHECK(one.h[j] == doctest::Approx(o * std::tanh(c)).epsilon(1e-14));
  }
  for (std::size_t j = 0; j < H; ++j) CHECK(p.bias[H + j] == 1.0);

  CHECK_THROWS_AS(lstm_forward(p, std::vector<Vector>{Vector(4, 0.0)}), Error);
  CHECK_THROWS_AS(lstm_forward(p, std::vector<Vector>{}), Error);
}

TEST_CASE("lstm gradients at full size") {
  std::mt19937_64 rng(3);
  auto p = make_lstm(64, 32, rng);
  auto seq = random_sequence(8, 64, rng);
  std::vector<Vector> r = random_sequence(8, 32, rng);
  auto loss = [&] {
    const auto f = lstm_forward(p, seq);
    double s = 0.0;
    for (std::size_t t = 0; t < 8; ++t) s += weighted_sum(f.hidden[t], r[t]);
    return s;
  };
  const auto f = lstm_forward(p, seq);
  auto g = LstmParams::zeros(64, 32);
  std::vector<Vector> dx;
  lstm_backward(p, f.cache, r, g, &dx);
  ParamViews pv, gv;
  collect(p, pv);
  collect(g, gv);
  CHECK(oracle::check_gradients(pv, gv, loss) <= 1e-4);
  CHECK(oracle::check_gradients(views(seq), views(dx), loss) <= 1e-4);
}

TEST_CASE("lstm and stacked lstm gradients over seeds") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<LstmParams> layers{make_lstm(5, 4, rng), make_lstm(4, 4, rng), make_lstm(4, 3, rng)};
    auto seq = random_sequence(4, 5, rng);
    const auto r = oracle::random_vector(3, rng);
    auto loss = [&] { return weighted_sum(stacked_lstm_forward(layers, seq).h(), r); };
    const auto f = stacked_lstm_forward(layers, seq);
    std::vector<LstmParams> grads{LstmParams::zeros(5, 4), LstmParams::zeros(4, 4), LstmParams::zeros(4, 3)};
    stacked_lstm_backward(layers, f, r, grads);
    ParamViews pv, gv;
    for (auto& l : layers) collect(l, pv);
    for (auto& g : grads) collect(g, gv);
    CHECK(oracle::check_gradients(pv, gv, loss) <= 1e-4);
  }
}

TEST_CASE("conv1d examples") {
  Tensor2 signal(2, 6);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < 6; ++i) signal(c, i) = static_cast<double>(c * 10 + i);

  auto identity = Conv1dParams::zeros(2, 2, 1, 1);
  identity.w(0, 0, 0) = 1.0;
  identity.w(1, 1, 0) = 1.0;
  CHECK(conv1d_forward(identity, signal) == signal);

  Tensor2 flat(1, 9, 3.5);
  auto avg = Conv1dParams::zeros(1, 1, 3, 2);
  for (std::size_t j = 0; j < 3; ++j) avg.w(0, 0, j) = 1.0 / 3.0;
  const auto out = conv1d_forward(avg, flat);
  REQUIRE(out.cols() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(out(0, i) == doctest::Approx(3.5).epsilon(1e-15));

  CHECK_THROWS_AS(conv1d_forward(Conv1dParams::zeros(1, 1, 10, 1), flat), Error);
  CHECK_THROWS_AS(conv1d_forward(identity, flat), Error);
}

TEST_CASE("conv1d and pooling gradients") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    auto p = make_conv1d(2, 3, 5, 2, rng);
    Tensor2 signal(2, 17, 0.0);
    for (auto& v : signal.flat()) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    const auto r = oracle::random_vector(3, rng);
    auto loss = [&] { return weighted_sum(global_avg_pool(conv1d_forward(p, signal)), r); };
    const auto y = conv1d_forward(p, signal);
    const auto dy = global_avg_pool_backward(r, y.cols());
    auto g = Conv1dParams::zeros(2, 3, 5, 2);
    Tensor2 ds;
    conv1d_backward(p, signal, dy, g, &ds);
    ParamViews pv, gv;
    collect(p, pv);
    collect(g, gv);
    CHECK(oracle::check_gradients(pv, gv, loss) <= 1e-4);
    ParamViews sv{signal.flat()}, dsv{ds.flat()};
    CHECK(oracle::check_gradients(sv, dsv, loss) <= 1e-4);
  }
}

TEST_CASE("relu") {
  Vector x{-1.0, 0.0, 2.0};
  relu_inplace(x);
  CHECK(x == Vector{0.0, 0.0, 2.0});
  Vector dy{5.0, 5.0, 5.0};
  relu_backward_inplace(x, dy);
  CHECK(dy == Vector{0.0, 0.0, 5.0});
}

TEST_CASE("huber loss values") {
  auto r = huber_loss(Vector{1.0}, Vector{1.0});
  CHECK(r.loss == 0.0);
  CHECK(r.grad[0] == 0.0);
  r = huber_loss(Vector{0.5}, Vector{0.0}, 1.0);
  CHECK(std::abs(r.loss - 0.125) <= 1e-12);
  r = huber_loss(Vector{2.0}, Vector{0.0}, 1.0);
  CHECK(std::abs(r.loss - 1.5) <= 1e-12);
  CHECK(std::abs(r.grad[0] - 1.0) <= 1e-12);
  r = huber_loss(Vector{-2.0, 0.5}, Vector{0.0, 0.0}, 1.0);
  CHECK(std::abs(r.loss - 0.8125) <= 1e-12);
  CHECK(std::abs(r.grad[0] + 0.5) <= 1e-12);

  const double lo = huber_loss(Vector{1.0 - 1e-9}, Vector{0.0}).loss;
  const double hi = huber_loss(Vector{1.0 + 1e-9}, Vector{0.0}).loss;
  CHECK(std::abs(lo - hi) <= 1e-8);

  CHECK_THROWS_AS(huber_loss(Vector{1.0}, Vector{1.0, 2.0}), Error);
  CHECK_THROWS_AS(huber_loss(Vector{1.0}, Vector{1.0}, 0.0), Error);
}

TEST_CASE("bce loss values and logit gradient") {
  auto r = bce_loss(Vector{0.5}, Vector{1.0});
  CHECK(std::abs(r.loss - std::log(2.0)) <= 1e-12);
  CHECK(bce_loss(Vector{1.0, 0.0}, Vector{1.0, 0.0}).loss <= 1e-6);
  CHECK_THROWS_AS(bce_loss(Vector{0.5}, Vector{0.5, 1.0}), Error);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    auto z = oracle::random_vector(6, rng, 3.0);
    Vector target(6);
    for (std::size_t i = 0; i < 6; ++i) target[i] = static_cast<double>(rng() % 2);
    auto probs = [&] {
      Vector p(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) p[i] = sigmoid(z[i]);
      return p;
    };
    auto g = bce_loss(probs(), target).grad;
    ParamViews zv{std::span<double>(z)}, gv{std::span<double>(g)};
    CHECK(oracle::check_gradients(zv, gv, [&] { return bce_loss(probs(), target).loss; }) <= 1e-5);
  }
}

TEST_CASE("adam") {
  SUBCASE("zero gradient leaves parameters alone") {
    Vector w{1.0, -2.0}, g{0.0, 0.0};
    AdamState s;
    for (int i = 0; i < 10; ++i) adam_step(s, {std::span<double>(w)}, {std::span<double>(g)});
    CHECK(w == Vector{1.0, -2.0});
  }
  SUBCASE("constant gradient: monotone steps approaching lr") {
    Vector w{0.0}, g{3.0};
    AdamState s;
    double prev = w[0];
    for (int i = 0; i < 200; ++i) {
      adam_step(s, {std::span<double>(w)}, {std::span<double>(g)});
      CHECK(w[0] < prev);
      const double step = prev - w[0];
      CHECK(step == doctest::Approx(s.lr).epsilon(1e-6));
      prev = w[0];
    }
  }
  SUBCASE("matches the reference update on a quadratic bowl") {
    for (double lr : {1e-3, 0.05}) {
      Vector w{1.0, 1.0}, g(2);
      std::vector<double> ref{1.0, 1.0};
      AdamOracle oracle_adam{lr};
      AdamState s;
      s.lr = lr;
      for (int i = 0; i < 100; ++i) {
        g = {2.0 * w[0], 2.0 * w[1]};
        adam_step(s, {std::span<double>(w)}, {std::span<double>(g)});
        oracle_adam.step(ref, {2.0 * ref[0], 2.0 * ref[1]});
      }
      CHECK(w[0] == doctest::Approx(ref[0]).epsilon(1e-12));
      CHECK(w[1] == doctest::Approx(ref[1]).epsilon(1e-12));
      const double n = std::hypot(w[0], w[1]);
      MESSAGE("lr " << lr << ": |w| after 100 steps = " << n);
      // at lr 1e-3 each step moves at most ~lr, so 100 steps cannot leave the unit region
      if (lr == 0.05) CHECK(n < 0.1);
      else CHECK(n > 1.0);
    }
  }
  SUBCASE("shape mismatch") {
    Vector w{1.0}, g{1.0, 2.0};
    AdamState s;
    CHECK_THROWS_AS(adam_step(s, {std::span<double>(w)}, {std::span<double>(g)}), Error);
  }
}

TEST_CASE("non-finite values are rejected") {
  CHECK_THROWS_AS(check_finite(Vector{1.0, std::nan("")}, "x"), Error);
  CHECK_THROWS_AS(check_size(2, 3, "x"), Error);
  std::mt19937_64 rng(1);
  auto p = make_dense(2, 2, rng);
  CHECK_THROWS_AS(dense_forward(p, Vector{1.0, INFINITY}), Error);
}
