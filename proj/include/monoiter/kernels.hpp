#pragma once

#include <span>

#include <Eigen/SparseCore>

namespace monoiter {

/// Selects the serial reference loops or their OpenMP counterparts. Serial is
/// the default everywhere because it is bitwise reproducible; the parallel
/// variants reorder reductions and only promise agreement to rounding.
enum class Execution { serial, parallel };

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Read-only compressed-row view of a square sparse matrix.
struct CsrView {
  std::span<const int> row_ptr;
  std::span<const int> cols;
  std::span<const double> values;

  [[nodiscard]] int rows() const { return static_cast<int>(row_ptr.size()) - 1; }
};

/// The matrix must be in compressed mode.
CsrView csr_view(const SparseMatrix& m);

namespace kernels {

namespace serial {
// y = A x + d .* x
void shifted_spmv(CsrView a, std::span<const double> d, std::span<const double> x,
                  std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// y = x + beta y
void xpby(std::span<const double> x, double beta, std::span<double> y);
// z = w .* r
void scale(std::span<const double> w, std::span<const double> r, std::span<double> z);
double max_abs(std::span<const double> x);
double max_abs_diff(std::span<const double> x, std::span<const double> y);
}  // namespace serial

namespace parallel {
void shifted_spmv(CsrView a, std::span<const double> d, std::span<const double> x,
                  std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double beta, std::span<double> y);
void scale(std::span<const double> w, std::span<const double> r, std::span<double> z);
double max_abs(std::span<const double> x);
double max_abs_diff(std::span<const double> x, std::span<const double> y);
}  // namespace parallel

void shifted_spmv(Execution e, CsrView a, std::span<const double> d, std::span<const double> x,
                  std::span<double> y);
double dot(Execution e, std::span<const double> x, std::span<const double> y);
void axpy(Execution e, double alpha, std::span<const double> x, std::span<double> y);
void xpby(Execution e, std::span<const double> x, double beta, std::span<double> y);
void scale(Execution e, std::span<const double> w, std::span<const double> r, std::span<double> z);
double max_abs(Execution e, std::span<const double> x);
double max_abs_diff(Execution e, std::span<const double> x, std::span<const double> y);

}  // namespace kernels

/// Span helpers for Eigen dense vectors.
inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<double> as_span(Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace monoiter
