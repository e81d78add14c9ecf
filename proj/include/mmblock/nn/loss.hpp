#pragma once

#include <span>

#include "mmblock/nn/tensor.hpp"

namespace mmblock::nn {

struct LossResult {
  double loss = 0.0;
  Vector grad;
};

/// Mean Huber (smooth L1) loss over elements, z = pred - target:
/// z^2/2 when |z| <= delta, delta * (|z| - delta/2) otherwise. Gradient is w.r.t. pred.
LossResult huber_loss(std::span<const double> pred, std::span<const double> target,
                      double delta = 1.0);

/// Mean binary cross-entropy with probabilities clamped to [1e-7, 1 - 1e-7].
/// Gradient is w.r.t. the pre-sigmoid logits: (prob - target) / n.
LossResult bce_loss(std::span<const double> prob, std::span<const double> target);

constexpr double kBceClamp = 1e-7;

}  // namespace mmblock::nn
