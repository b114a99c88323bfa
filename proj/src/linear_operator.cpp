#include "monoiter/linear_operator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/SparseCore>

namespace monoiter {

nlohmann::json to_json(const SolveReport& report) {
  return {{"iterations", report.iterations},
          {"final_residual_norm", report.final_residual_norm},
          {"energy_history", report.energy_history}};
}

LinearProblem::LinearProblem(Field a) : a_(std::move(a)) {
  const auto& d = *a_.domain();
  for (int i = 0; i < a_.size(); ++i)
    if (!(a_[i] > 0.0))
      throw PreconditionError("coefficient a must be positive; a[" + std::to_string(i) +
                              "] = " + std::to_string(a_[i]));
  coercivity_ = std::min(1.0, a_.min());
  shift_ = d.mass().cwiseProduct(a_.values());
  diagonal_ = d.stiffness().diagonal() + shift_;
}

SparseMatrix LinearProblem::system_matrix() const {
  SparseMatrix m = domain()->stiffness();
  for (int i = 0; i < m.rows(); ++i) m.coeffRef(i, i) += shift_[i];
  m.makeCompressed();
  return m;
}

void LinearProblem::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y, Execution e) const {
  y.resize(x.size());
  kernels::shifted_spmv(e, domain()->stiffness_view(), as_span(shift_), as_span(x), as_span(y));
}

double LinearProblem::energy(const Eigen::VectorXd& u, const Eigen::VectorXd& psi) const {
  Eigen::VectorXd au;
  apply(u, au);
  return 0.5 * u.dot(au) - u.dot(psi);
}

DualVector embed_function(const Field& field) {
  return DualVector(field.domain(), field.domain()->mass().cwiseProduct(field.values()));
}

std::pair<Field, SolveReport> solve_T(const LinearProblem& problem, const DualVector& psi,
                                      const SolveOptions& options) {
  require_same_domain(problem.domain(), psi.domain(), "solve_T");
  if (!(options.tol > 0.0)) throw InputError("solve_T: tolerance must be positive");
  const Execution ex = options.execution;
  const int n = problem.domain()->vertex_count();
  const int cap = options.max_iterations > 0 ? options.max_iterations : 10 * n;
  const Eigen::VectorXd& b = psi.values();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (options.initial_guess) {
    if (options.initial_guess->size() != n) throw InputError("solve_T: initial guess has wrong size");
    x = *options.initial_guess;
  }
  const Eigen::VectorXd inv_diag = problem.diagonal().cwiseInverse();

  Eigen::VectorXd r(n), z(n), p(n), q(n);
  auto reset_residual = [&] {
    problem.apply(x, q, ex);
    r = b - q;
  };
  reset_residual();
  kernels::scale(ex, as_span(inv_diag), as_span(r), as_span(z));
  p = z;
  double rz = kernels::dot(ex, as_span(r), as_span(z));

  SolveReport report;
  double energy = 0.5 * kernels::dot(ex, as_span(x), as_span(q)) - kernels::dot(ex, as_span(x), as_span(b));
  report.energy_history.push_back(energy);

  const double bnorm = std::sqrt(kernels::dot(ex, as_span(b), as_span(b)));
  const double target = bnorm > 0.0 ? options.tol * bnorm : options.tol;

  for (;;) {
    const double rnorm = std::sqrt(kernels::dot(ex, as_span(r), as_span(r)));
    if (rnorm <= target) {
      // The recurrence residual drifts from b - Ax; confirm before accepting.
      reset_residual();
      const double true_norm = std::sqrt(kernels::dot(ex, as_span(r), as_span(r)));
      if (true_norm <= target) {
        report.final_residual_norm = true_norm;
        report.converged = true;
        break;
      }
      kernels::scale(ex, as_span(inv_diag), as_span(r), as_span(z));
      p = z;
      rz = kernels::dot(ex, as_span(r), as_span(z));
    }
    if (report.iterations >= cap) {
      reset_residual();
      report.final_residual_norm = std::sqrt(r.squaredNorm());
      throw DivergenceError("solve_T: no convergence after " + std::to_string(cap) +
                                " iterations (residual " +
                                std::to_string(report.final_residual_norm) + ", target " +
                                std::to_string(target) + ")",
                            std::move(report));
    }
    kernels::shifted_spmv(ex, problem.domain()->stiffness_view(), as_span(problem.shift()),
                          as_span(p), as_span(q));
    const double pq = kernels::dot(ex, as_span(p), as_span(q));
    if (!(pq > 0.0)) {
      report.final_residual_norm = rnorm;
      throw DivergenceError("solve_T: search direction lost positive curvature", std::move(report));
    }
    const double alpha = rz / pq;
    kernels::axpy(ex, alpha, as_span(p), as_span(x));
    kernels::axpy(ex, -alpha, as_span(q), as_span(r));
    energy -= 0.5 * alpha * rz;
    report.energy_history.push_back(energy);
    ++report.iterations;

    kernels::scale(ex, as_span(inv_diag), as_span(r), as_span(z));
    const double rz_next = kernels::dot(ex, as_span(r), as_span(z));
    kernels::xpby(ex, as_span(z), rz_next / rz, as_span(p));
    rz = rz_next;
  }
  return {Field(problem.domain(), std::move(x)), std::move(report)};
}

bool check_comparison(const LinearProblem& problem, const DualVector& psi1,
                      const DualVector& psi2) {
  require_same_domain(problem.domain(), psi1.domain(), "check_comparison");
  require_same_domain(problem.domain(), psi2.domain(), "check_comparison");
  for (int i = 0; i < psi1.size(); ++i)
    if (psi1[i] > psi2[i])
      throw InputError("check_comparison: psi1 <= psi2 fails at vertex " + std::to_string(i));
  if (!problem.domain()->quality().is_m_matrix_compatible)
    throw PreconditionError(
        "check_comparison: stiffness has positive off-diagonal entries, the discrete comparison "
        "principle does not apply");

  SolveOptions opts;
  opts.tol = 1e-12;
  const auto [u1, r1] = solve_T(problem, psi1, opts);
  const auto [u2, r2] = solve_T(problem, psi2, opts);
  const double slack = 1e-9 * std::max(u1.values().cwiseAbs().maxCoeff(),
                                       u2.values().cwiseAbs().maxCoeff());
  return ((u1.values() - u2.values()).array() <= slack).all();
}

double h1_norm(const DiscreteDomain& domain, const Eigen::VectorXd& v) {
  const double lv = v.dot(domain.stiffness() * v);
  const double mv = v.dot(domain.mass().cwiseProduct(v));
  return std::sqrt(std::max(0.0, lv + mv));
}

LipschitzCertificate lipschitz_certificate(const LinearProblem& problem, const DualVector& psi1,
                                           const DualVector& psi2) {
  require_same_domain(problem.domain(), psi1.domain(), "lipschitz_certificate");
  require_same_domain(problem.domain(), psi2.domain(), "lipschitz_certificate");
  const auto& domain = *problem.domain();
  if (domain.vertex_count() > 2000)
    throw InputError("lipschitz_certificate: dense dual norm limited to 2000 vertices, domain has " +
                     std::to_string(domain.vertex_count()));

  SolveOptions opts;
  opts.tol = 1e-12;
  const auto [u1, r1] = solve_T(problem, psi1, opts);
  const auto [u2, r2] = solve_T(problem, psi2, opts);

  Eigen::MatrixXd h1 = Eigen::MatrixXd(domain.stiffness());
  h1.diagonal() += domain.mass();
  const Eigen::VectorXd diff = psi1.values() - psi2.values();
  const Eigen::VectorXd riesz = h1.llt().solve(diff);

  LipschitzCertificate cert;
  cert.lhs = h1_norm(domain, u1.values() - u2.values());
  cert.rhs = std::sqrt(std::max(0.0, diff.dot(riesz))) / problem.coercivity();
  return cert;
}

}  // namespace monoiter
