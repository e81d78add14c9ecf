#pragma once

#include <span>
#include <vector>

#include "mmblock/nn/layers.hpp"
#include "mmblock/nn/tensor.hpp"

namespace mmblock::nn {

struct AdamState {
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
  std::vector<Vector> m;  // first moments, one buffer per parameter array
  std::vector<Vector> v;  // second moments
};

/// Bias-corrected Adam update. Moment buffers are allocated on the first call and must
/// keep matching the parameter shapes afterwards.
void adam_step(AdamState& state, const ParamViews& params, const ParamViews& grads);

}  // namespace mmblock::nn
