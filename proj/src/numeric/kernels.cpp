#include "sscrop/numeric/kernels.hpp"

#include <atomic>
#include <cstddef>

#include "sscrop/error.hpp"

namespace sscrop::kernels {
namespace {

std::atomic<Backend> g_backend{Backend::OpenMP};

// Below this many multiply-adds the thread fork costs more than it saves.
constexpr std::size_t kParallelThreshold = 1 << 15;

void check_matmul(const Matrix& a, const Matrix& b, const char* op) {
  if (a.cols() != b.rows()) {
    throw ShapeError(std::string(op) + ": cannot multiply " + shape_string(a) + " by " +
                     shape_string(b));
  }
}

void matmul_rows(const Matrix& a, const Matrix& b, Matrix& out, std::size_t begin,
                 std::size_t end) {
  const std::size_t k = a.cols();
  const std::size_t m = b.cols();
  for (std::size_t i = begin; i < end; ++i) {
    double* o = out.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) o[j] = 0.0;
    const double* ar = a.data() + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double x = ar[p];
      if (x == 0.0) continue;
      const double* br = b.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) o[j] += x * br[j];
    }
  }
}

// Rows of out = a^T b are the columns of a.
void matmul_tn_rows(const Matrix& a, const Matrix& b, Matrix& out, std::size_t begin,
                    std::size_t end) {
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  const std::size_t m = b.cols();
  for (std::size_t p = begin; p < end; ++p) {
    double* o = out.data() + p * m;
    for (std::size_t j = 0; j < m; ++j) o[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = a.data()[i * k + p];
      if (x == 0.0) continue;
      const double* br = b.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) o[j] += x * br[j];
    }
  }
}

void matmul_nt_rows(const Matrix& a, const Matrix& b, Matrix& out, std::size_t begin,
                    std::size_t end) {
  const std::size_t m = a.cols();
  const std::size_t k = b.rows();
  for (std::size_t i = begin; i < end; ++i) {
    const double* ar = a.data() + i * m;
    double* o = out.data() + i * k;
    for (std::size_t q = 0; q < k; ++q) {
      const double* br = b.data() + q * m;
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += ar[j] * br[j];
      o[q] = acc;
    }
  }
}

template <typename RowFn>
void run_parallel(RowFn fn, std::size_t rows, std::size_t work) {
  if (work < kParallelThreshold || rows < 2) {
    fn(0, rows);
    return;
  }
  const auto n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    fn(static_cast<std::size_t>(i), static_cast<std::size_t>(i) + 1);
  }
}

void shape_out(Matrix& out, std::size_t rows, std::size_t cols) {
  if (out.rows() != rows || out.cols() != cols) out = Matrix(rows, cols);
}

}  // namespace

void set_backend(Backend b) noexcept { g_backend.store(b); }
Backend backend() noexcept { return g_backend.load(); }

namespace serial {

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  check_matmul(a, b, "matmul");
  shape_out(out, a.rows(), b.cols());
  matmul_rows(a, b, out, 0, a.rows());
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: row mismatch " + shape_string(a) + " vs " + shape_string(b));
  }
  shape_out(out, a.cols(), b.cols());
  matmul_tn_rows(a, b, out, 0, a.cols());
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: column mismatch " + shape_string(a) + " vs " + shape_string(b));
  }
  shape_out(out, a.rows(), b.rows());
  matmul_nt_rows(a, b, out, 0, a.rows());
}

}  // namespace serial

namespace omp {

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  check_matmul(a, b, "matmul");
  shape_out(out, a.rows(), b.cols());
  run_parallel([&](std::size_t lo, std::size_t hi) { matmul_rows(a, b, out, lo, hi); }, a.rows(),
               a.rows() * a.cols() * b.cols());
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: row mismatch " + shape_string(a) + " vs " + shape_string(b));
  }
  shape_out(out, a.cols(), b.cols());
  run_parallel([&](std::size_t lo, std::size_t hi) { matmul_tn_rows(a, b, out, lo, hi); },
               a.cols(), a.rows() * a.cols() * b.cols());
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: column mismatch " + shape_string(a) + " vs " + shape_string(b));
  }
  shape_out(out, a.rows(), b.rows());
  run_parallel([&](std::size_t lo, std::size_t hi) { matmul_nt_rows(a, b, out, lo, hi); },
               a.rows(), a.rows() * a.cols() * b.rows());
}

}  // namespace omp

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  backend() == Backend::OpenMP ? omp::matmul(a, b, out) : serial::matmul(a, b, out);
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out) {
  backend() == Backend::OpenMP ? omp::matmul_tn(a, b, out) : serial::matmul_tn(a, b, out);
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  backend() == Backend::OpenMP ? omp::matmul_nt(a, b, out) : serial::matmul_nt(a, b, out);
}

}  // namespace sscrop::kernels
