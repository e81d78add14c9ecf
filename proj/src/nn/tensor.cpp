#include "mmblock/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmblock/types.hpp"

namespace mmblock::nn {

Tensor2::Tensor2(std::size_t rows, std::size_t cols, Vector data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check_size(data_.size(), rows * cols, "tensor data");
}

void Tensor2::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void check_finite(std::span<const double> values, std::string_view what) {
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorKind::non_finite, std::string(what));
}

void check_size(std::size_t a, std::size_t b, std::string_view what) {
  if (a != b)
    throw Error(ErrorKind::shape_mismatch, std::string(what) + ": " + std::to_string(a) +
                                               " != " + std::to_string(b));
}

}  // namespace mmblock::nn
