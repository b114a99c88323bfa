#include "monoiter/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "monoiter/linear_operator.hpp"

namespace monoiter {

namespace {

std::vector<double> dense_spectrum(const DiscreteDomain& domain, int k) {
  const Eigen::VectorXd inv_sqrt = domain.mass().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd b = inv_sqrt.asDiagonal() * Eigen::MatrixXd(domain.stiffness()) *
                      inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  return {ev.data(), ev.data() + k};
}

// Modified Gram-Schmidt in the M inner product, applied twice.
void m_orthonormalize(Eigen::MatrixXd& y, const Eigen::VectorXd& mass) {
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < y.cols(); ++j) {
      for (int i = 0; i < j; ++i) {
        const double c = y.col(i).dot(mass.cwiseProduct(y.col(j)));
        y.col(j) -= c * y.col(i);
      }
      const double nrm = std::sqrt(y.col(j).dot(mass.cwiseProduct(y.col(j))));
      y.col(j) /= nrm;
    }
  }
}

}  // namespace

std::vector<double> smallest_eigenvalues(const DomainPtr& domain_ptr, int k,
                                         const SpectrumOptions& options) {
  const DiscreteDomain& domain = *domain_ptr;
  const int n = domain.vertex_count();
  if (k < 1 || k > n)
    throw InputError("spectrum: k must be in [1, " + std::to_string(n) + "], got " +
                     std::to_string(k));
  if (n <= options.dense_limit) return dense_spectrum(domain, k);

  // Shift on the scale of the first nonzero eigenvalue: volume^(-2/d).
  const int d = domain.kind() == DomainKind::triangle_surface
                    ? 2
                    : static_cast<int>(domain.axes().size());
  const double shift = std::pow(domain.total_volume(), -2.0 / d);
  const LinearProblem shifted(Field::constant(domain_ptr, shift));

  const int p = std::min(n, k + std::max(k, 8));
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd x(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = j == 0 ? 1.0 : unif(rng);
  m_orthonormalize(x, domain.mass());

  std::vector<double> previous(k, 0.0);
  Eigen::VectorXd theta;
  SolveOptions solve;
  solve.tol = 1e-12;
  for (int it = 0; it < options.max_iterations; ++it) {
    Eigen::MatrixXd y(n, p);
    for (int j = 0; j < p; ++j) {
      solve.initial_guess = x.col(j);
      const DualVector rhs(shifted.domain(), domain.mass().cwiseProduct(x.col(j)));
      y.col(j) = solve_T(shifted, rhs, solve).first.values();
    }
    m_orthonormalize(y, domain.mass());
    const Eigen::MatrixXd reduced = y.transpose() * (domain.stiffness() * y);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (reduced + reduced.transpose()));
    theta = es.eigenvalues();
    x = y * es.eigenvectors();

    const double ref = std::max(theta[k - 1], shift);
    double change = 0.0;
    for (int i = 0; i < k; ++i) change = std::max(change, std::abs(theta[i] - previous[i]));
    for (int i = 0; i < k; ++i) previous[i] = theta[i];
    if (it > 0 && change <= options.tol * ref) break;
  }
  return previous;
}

}  // namespace monoiter
