#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monoiter/field.hpp"
#include "monoiter/kernels.hpp"
#include "monoiter/linear_operator.hpp"

namespace monoiter {

/// A monotone scalar map t -> F(t).
///
/// Power laws are truncated: F(t) = t^p for t >= 0 and 0 for t < 0. Tables are
/// piecewise linear through their knots and constant beyond the end knots;
/// they are evaluated as given, so a table that is nonzero for negative t is
/// representable and is caught by check_alpha1 rather than rejected at load.
class ScalarNonlinearity {
 public:
  enum class Kind { power, table };

  static ScalarNonlinearity power(double exponent);
  /// Knots must be finite with strictly increasing t and non-decreasing values.
  static ScalarNonlinearity table(std::vector<double> t, std::vector<double> values);
  /// CSV with the header line "t,value".
  static ScalarNonlinearity parse_table_csv(std::istream& in);
  static ScalarNonlinearity load_table_csv(const std::filesystem::path& path);

  [[nodiscard]] double operator()(double t) const;
  void evaluate(std::span<const double> v, std::span<double> out,
                Execution e = Execution::serial) const;

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double exponent() const { return exponent_; }
  [[nodiscard]] const std::vector<double>& knots() const { return knots_; }
  [[nodiscard]] const std::vector<double>& knot_values() const { return values_; }
  [[nodiscard]] std::string describe() const;

 private:
  ScalarNonlinearity() = default;

  Kind kind_ = Kind::power;
  double exponent_ = 1.0;
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// 2* = 2n / (n - 2); requires n >= 3.
double critical_exponent(int n);

struct Alpha1Report {
  bool passed = true;
  /// Empty on success; otherwise which clause failed first.
  std::string clause;
  char function = 0;  ///< 'F' or 'H'
  double t = 0.0;
  double value = 0.0;
  double bound = 0.0;
  std::vector<std::string> warnings;
};

/// Growth and sign conditions on F and H, sampled at 1000 evenly spaced points
/// of [-1, t_max]: F = H = 0 for t < 0, 0 <= F(t) <= t^(2*-1) and
/// 0 <= H(t) <= t^q for t >= 0. Requires n >= 3, 0 < q < 2*-1 and t_max > 0.
/// q >= 1 is accepted with a warning.
Alpha1Report check_alpha1(const ScalarNonlinearity& F, const ScalarNonlinearity& H, int n,
                          double q, double t_max);

/// Coefficients, nonlinearities and declared dimension of
///   Delta u + a u = f F(u) + h H(u).
/// Construction does not enforce the sign conditions; see check_alpha2.
class NonlinearProblem {
 public:
  NonlinearProblem(Field a, Field f, Field h, ScalarNonlinearity F, ScalarNonlinearity H,
                   int dimension);

  [[nodiscard]] const DomainPtr& domain() const { return a_.domain(); }
  [[nodiscard]] const Field& a() const { return a_; }
  [[nodiscard]] const Field& f() const { return f_; }
  [[nodiscard]] const Field& h() const { return h_; }
  [[nodiscard]] const ScalarNonlinearity& F() const { return F_; }
  [[nodiscard]] const ScalarNonlinearity& H() const { return H_; }
  [[nodiscard]] int dimension() const { return dimension_; }

  /// The operator T for this a. Throws PreconditionError when a > 0 fails.
  [[nodiscard]] const LinearProblem& linear() const;

 private:
  Field a_, f_, h_;
  ScalarNonlinearity F_, H_;
  int dimension_;
  std::optional<LinearProblem> linear_;
};

struct Alpha2Report {
  bool passed = true;
  std::string clause;  ///< "a > 0", "f >= 0", "f != 0", "h >= 0" or "h != 0"
  int vertex = -1;     ///< first offending vertex for the pointwise clauses
};

Alpha2Report check_alpha2(const NonlinearProblem& problem);

/// S(v) = M (f .* F(v) + h .* H(v)).
DualVector apply_S(const NonlinearProblem& problem, const Field& v,
                   Execution e = Execution::serial);

}  // namespace monoiter
