#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "monoiter/field.hpp"
#include "monoiter/nonlinearity.hpp"

namespace monoiter {

/// Weak-form residual tested against every nodal hat function:
/// (L + M diag(a)) v - S(v). Nonpositive everywhere for a lower solution,
/// nonnegative for an upper solution.
DualVector defect(const NonlinearProblem& problem, const Field& v,
                  Execution e = Execution::serial);

struct DefectCheck {
  bool ok = true;
  int vertex = -1;     ///< first vertex violating the sign condition
  double value = 0.0;  ///< defect at that vertex
  double scale = 0.0;  ///< |M diag(a) v|_max plus the smallest normal double
};

/// Sign checks on defect(v) with tolerance tol * scale. v must be nonnegative;
/// a negative entry is an InputError. Nonnegative test functions are
/// nonnegative combinations of hats, so the nodal test is sufficient.
DefectCheck check_lower(const NonlinearProblem& problem, const Field& v, double tol);
DefectCheck check_upper(const NonlinearProblem& problem, const Field& v, double tol);
bool verify_lower(const NonlinearProblem& problem, const Field& v, double tol);
bool verify_upper(const NonlinearProblem& problem, const Field& v, double tol);

struct Bracket {
  Field lower;
  Field upper;
  double verification_tol = 1e-9;
};

struct BracketReport {
  bool nonnegative = true;   ///< lower >= 0
  bool ordered = true;       ///< lower <= upper
  int order_vertex = -1;     ///< first vertex breaking either of the above
  bool lower_nonzero = true; ///< max lower > 0
  DefectCheck lower;
  DefectCheck upper;

  [[nodiscard]] bool passed() const {
    return nonnegative && ordered && lower_nonzero && lower.ok && upper.ok;
  }
};

BracketReport verify_bracket(const NonlinearProblem& problem, const Bracket& bracket);

struct IterationOptions {
  /// Stop once both sequences move by at most tol (max-norm) in one step and
  /// both defects are within 10 * tol * scale.
  double tol = 1e-9;
  int max_steps = 500;
  /// Relative residual of each linear solve; 0 selects tol / 100.
  double linear_tol = 0.0;
  /// Chain ordering slack, relative to |upper|_max.
  double ordering_slack = 1e-9;
  Execution execution = Execution::serial;
  /// Step the lower and upper sequences on two threads.
  bool concurrent_sequences = true;
  /// Keep every iterate (including the bracket endpoints at index 0).
  bool keep_iterates = false;
};

struct StepRecord {
  int step = 0;
  double max_change = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  double defect_norm = 0.0;
};

struct IterationTrace {
  std::vector<StepRecord> lower;
  std::vector<StepRecord> upper;
  int ordering_violations = 0;
  int steps = 0;
  std::vector<Eigen::VectorXd> lower_iterates;
  std::vector<Eigen::VectorXd> upper_iterates;
};

struct SolutionPair {
  Field u_star;        ///< limit of the increasing sequence (minimal solution)
  Field u_upper_star;  ///< limit of the decreasing sequence (maximal solution)
  double residual_lower = 0.0;
  double residual_upper = 0.0;
  double scale_lower = 0.0;
  double scale_upper = 0.0;
  bool coincide = false;
};

enum class IterationStatus { converged, max_steps_exceeded, ordering_violation };

std::string to_string(IterationStatus status);

struct MonotoneResult {
  IterationStatus status = IterationStatus::converged;
  SolutionPair solution;
  IterationTrace trace;
  std::string diagnostic;

  [[nodiscard]] bool converged() const { return status == IterationStatus::converged; }
};

/// Runs u_{k+1} = T(S(u_k)) from both bracket endpoints and checks
/// u_k <= u_{k+1} <= u^{k+1} <= u^k at every step.
///
/// Refuses (PreconditionError) unless check_alpha2 passes, the stiffness is
/// M-matrix compatible and the bracket verifies. An ordering violation stops
/// the run with status ordering_violation and a diagnostic naming the step,
/// chain link and vertex; running out of steps returns the partial result with
/// status max_steps_exceeded.
MonotoneResult iterate_monotone(const NonlinearProblem& problem, const Bracket& bracket,
                                const IterationOptions& options = {});

/// min u > 0. Requires a connected domain (PreconditionError otherwise).
bool positivity_check(const DiscreteDomain& domain, const Field& u);

/// step,seq,max_change,min_u,max_u,defect_norm
void write_trace_csv(std::ostream& out, const IterationTrace& trace);
/// vertex,x,y,z,lower,u_star,u_upper_star,upper
void write_solution_csv(std::ostream& out, const Bracket& bracket, const SolutionPair& pair);
/// {u_star, u_upper_star, residual_lower, residual_upper, coincide}
nlohmann::json to_json(const SolutionPair& pair);

/// printf("%.17g")
std::string format_double(double v);

}  // namespace monoiter
