#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

#include "monoiter/field.hpp"
#include "monoiter/kernels.hpp"

namespace monoiter {

struct SolveOptions {
  /// Relative residual target ||A u - psi||_2 <= tol ||psi||_2 (absolute when psi = 0).
  double tol = 1e-10;
  /// 0 selects the default cap of 10 * vertex_count.
  int max_iterations = 0;
  Execution execution = Execution::serial;
  std::optional<Eigen::VectorXd> initial_guess;
};

struct SolveReport {
  int iterations = 0;
  double final_residual_norm = 0.0;
  /// I(u_k) for every iterate. Non-increasing: each CG step lowers the energy
  /// by alpha * (r.z) / 2 and the history is accumulated from those decrements.
  std::vector<double> energy_history;
  bool converged = false;
};

nlohmann::json to_json(const SolveReport& report);

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, SolveReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  [[nodiscard]] const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// The linear problem  int grad u . grad phi + int a u phi = <psi, phi>,
/// discretely (L + M diag(a)) u = psi. Requires a > 0 at every vertex.
class LinearProblem {
 public:
  explicit LinearProblem(Field a);

  [[nodiscard]] const DomainPtr& domain() const { return a_.domain(); }
  [[nodiscard]] const Field& a() const { return a_; }
  /// C = min{1, min a}: u^T A u >= C u^T (L + M) u.
  [[nodiscard]] double coercivity() const { return coercivity_; }
  /// The diagonal shift M diag(a) as a vector.
  [[nodiscard]] const Eigen::VectorXd& shift() const { return shift_; }
  [[nodiscard]] const Eigen::VectorXd& diagonal() const { return diagonal_; }

  /// Explicit L + M diag(a); the solver itself never forms it.
  [[nodiscard]] SparseMatrix system_matrix() const;

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y,
             Execution e = Execution::serial) const;

  /// I(u) = 1/2 u^T A u - u^T psi
  [[nodiscard]] double energy(const Eigen::VectorXd& u, const Eigen::VectorXd& psi) const;

 private:
  Field a_;
  Eigen::VectorXd shift_;
  Eigen::VectorXd diagonal_;
  double coercivity_ = 0.0;
};

/// <psi, phi_i> = int field phi_i dV, i.e. M * field.
DualVector embed_function(const Field& field);

/// Unique solution of the linear problem by Jacobi-preconditioned conjugate
/// gradients, which minimizes I(u). Throws DivergenceError when the iteration
/// cap is reached.
std::pair<Field, SolveReport> solve_T(const LinearProblem& problem, const DualVector& psi,
                                      const SolveOptions& options = {});

/// Whether psi1 <= psi2 produces T(psi1) <= T(psi2) entrywise, up to a slack of
/// 1e-9 * max(|u1|_max, |u2|_max). Throws InputError when psi1 <= psi2 fails and
/// PreconditionError when the stiffness is not M-matrix compatible.
bool check_comparison(const LinearProblem& problem, const DualVector& psi1,
                      const DualVector& psi2);

struct LipschitzCertificate {
  double lhs = 0.0;  ///< ||u1 - u2||_{H1}
  double rhs = 0.0;  ///< (1/C) ||psi1 - psi2||_*
};

/// Both sides of the continuity bound of T in the discrete norms
/// ||v||^2 = v^T (L + M) v and ||r||_*^2 = r^T (L + M)^{-1} r. The dual norm is
/// computed densely, so the domain is limited to 2000 vertices.
LipschitzCertificate lipschitz_certificate(const LinearProblem& problem, const DualVector& psi1,
                                           const DualVector& psi2);

/// v^T (L + M) v, square-rooted.
double h1_norm(const DiscreteDomain& domain, const Eigen::VectorXd& v);

}  // namespace monoiter
