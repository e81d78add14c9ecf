#include "mmblock/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmblock/types.hpp"

namespace mmblock::nn {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(ErrorKind::length_mismatch,
                "prediction length " + std::to_string(a) + " != target length " + std::to_string(b));
  if (a == 0) throw Error(ErrorKind::length_mismatch, "loss over an empty vector");
}

}  // namespace

LossResult huber_loss(std::span<const double> pred, std::span<const double> target, double delta) {
  check_lengths(pred.size(), target.size());
  if (!(delta > 0.0)) throw Error(ErrorKind::invalid_argument, "huber delta must be > 0");
  const double n = static_cast<double>(pred.size());
  LossResult r{0.0, Vector(pred.size())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double z = pred[i] - target[i];
    const double a = std::abs(z);
    if (a <= delta) {
      r.loss += 0.5 * z * z;
      r.grad[i] = z / n;
    } else {
      r.loss += delta * (a - 0.5 * delta);
      r.grad[i] = (z > 0.0 ? delta : -delta) / n;
    }
  }
  r.loss /= n;
  return r;
}

LossResult bce_loss(std::span<const double> prob, std::span<const double> target) {
  check_lengths(prob.size(), target.size());
  const double n = static_cast<double>(prob.size());
  LossResult r{0.0, Vector(prob.size())};
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const double y = target[i];
    if (y != 0.0 && y != 1.0) throw Error(ErrorKind::invalid_argument, "bce targets must be 0 or 1");
    const double p = std::clamp(prob[i], kBceClamp, 1.0 - kBceClamp);
    r.loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    r.grad[i] = (prob[i] - y) / n;
  }
  r.loss /= n;
  return r;
}

}  // namespace mmblock::nn
