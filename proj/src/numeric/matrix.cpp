#include "sscrop/numeric/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "sscrop/error.hpp"

namespace sscrop {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw ShapeError("matrix " + shape_string(rows, cols) + " given " +
                     std::to_string(values_.size()) + " values");
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(n * m);
  for (const auto& r : rows) {
    if (r.size() != m) throw ShapeError("ragged rows in Matrix::from_rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return Matrix(n, m, std::move(values));
}

void Matrix::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Matrix::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::string shape_string(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

std::string shape_string(const Matrix& m) { return shape_string(m.rows(), m.cols()); }

void require_finite(const Matrix& m, const char* what) {
  if (!m.all_finite()) {
    throw NumericError(std::string("non-finite value in ") + what + " (" + shape_string(m) + ")");
  }
}

}  // namespace sscrop
