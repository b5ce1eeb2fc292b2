#pragma once

#include "sscrop/numeric/matrix.hpp"

// Dense products used by the forward and backward passes.
//
// Every kernel exists twice: a serial reference and an OpenMP version that
// splits output rows across threads. Both call the same per-row routine, so
// each output element is accumulated in the same order and the results are
// bitwise identical regardless of thread count.
namespace sscrop::kernels {

enum class Backend { Serial, OpenMP };

// Process-wide backend used by the dispatching overloads below. Defaults to OpenMP.
void set_backend(Backend b) noexcept;
Backend backend() noexcept;

namespace serial {
// out = a * b, a: n x k, b: k x m.
void matmul(const Matrix& a, const Matrix& b, Matrix& out);
// out = a^T * b, a: n x k, b: n x m, out: k x m.
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out);
// out = a * b^T, a: n x m, b: k x m, out: n x k.
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);
}  // namespace serial

namespace omp {
void matmul(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);
}  // namespace omp

void matmul(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);

}  // namespace sscrop::kernels
