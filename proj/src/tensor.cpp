#include "yt8m/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "yt8m/error.hpp"

namespace yt8m {

Tensor2::Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    fail(ErrorCode::ShapeMismatch, "tensor data of " + std::to_string(data_.size()) +
                                       " values for shape " + std::to_string(rows_) + "x" +
                                       std::to_string(cols_));
  }
}

void Tensor2::fill(double v) noexcept { std::fill(data_.begin(), data_.end(), v); }

bool Tensor2::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace yt8m
