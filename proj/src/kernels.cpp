#include "monoiter/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace monoiter {

CsrView csr_view(const SparseMatrix& m) {
  assert(m.isCompressed());
  const auto rows = static_cast<std::size_t>(m.outerSize());
  const auto nnz = static_cast<std::size_t>(m.nonZeros());
  return CsrView{{m.outerIndexPtr(), rows + 1}, {m.innerIndexPtr(), nnz}, {m.valuePtr(), nnz}};
}

namespace kernels {

namespace serial {

void shifted_spmv(CsrView a, std::span<const double> d, std::span<const double> x,
                  std::span<double> y) {
  const int n = a.rows();
  for (int i = 0; i < n; ++i) {
    double acc = d[i] * x[i];
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) acc += a.values[k] * x[a.cols[k]];
    y[i] = acc;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + beta * y[i];
}

void scale(std::span<const double> w, std::span<const double> r, std::span<double> z) {
  for (std::size_t i = 0; i < w.size(); ++i) z[i] = w[i] * r[i];
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace serial

namespace parallel {

void shifted_spmv(CsrView a, std::span<const double> d, std::span<const double> x,
                  std::span<double> y) {
  const int n = a.rows();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double acc = d[i] * x[i];
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) acc += a.values[k] * x[a.cols[k]];
    y[i] = acc;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void scale(std::span<const double> w, std::span<const double> r, std::span<double> z) {
  const auto n = static_cast<std::ptrdiff_t>(w.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) z[i] = w[i] * r[i];
}

double max_abs(std::span<const double> x) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace parallel

void shifted_spmv(Execution e, CsrView a, std::span<const double> d, std::span<const double> x,
                  std::span<double> y) {
  e == Execution::parallel ? parallel::shifted_spmv(a, d, x, y) : serial::shifted_spmv(a, d, x, y);
}

double dot(Execution e, std::span<const double> x, std::span<const double> y) {
  return e == Execution::parallel ? parallel::dot(x, y) : serial::dot(x, y);
}

void axpy(Execution e, double alpha, std::span<const double> x, std::span<double> y) {
  e == Execution::parallel ? parallel::axpy(alpha, x, y) : serial::axpy(alpha, x, y);
}

void xpby(Execution e, std::span<const double> x, double beta, std::span<double> y) {
  e == Execution::parallel ? parallel::xpby(x, beta, y) : serial::xpby(x, beta, y);
}

void scale(Execution e, std::span<const double> w, std::span<const double> r,
           std::span<double> z) {
  e == Execution::parallel ? parallel::scale(w, r, z) : serial::scale(w, r, z);
}

double max_abs(Execution e, std::span<const double> x) {
  return e == Execution::parallel ? parallel::max_abs(x) : serial::max_abs(x);
}

double max_abs_diff(Execution e, std::span<const double> x, std::span<const double> y) {
  return e == Execution::parallel ? parallel::max_abs_diff(x, y) : serial::max_abs_diff(x, y);
}

}  // namespace kernels
}  // namespace monoiter
