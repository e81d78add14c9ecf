#include "mmblock/nn/adam.hpp"

#include <cmath>

namespace mmblock::nn {

void adam_step(AdamState& state, const ParamViews& params, const ParamViews& grads) {
  check_size(grads.size(), params.size(), "adam gradient count");
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  check_size(state.m.size(), params.size(), "adam moment count");
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k];
    const auto g = grads[k];
    auto& m = state.m[k];
    auto& v = state.v[k];
    check_size(g.size(), p.size(), "adam gradient shape");
    check_size(m.size(), p.size(), "adam moment shape");
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps_hat);
    }
  }
}

}  // namespace mmblock::nn
