#include "monoiter/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace monoiter {

ScalarNonlinearity ScalarNonlinearity::power(double exponent) {
  if (!(exponent > 0.0) || !std::isfinite(exponent))
    throw InputError("power nonlinearity needs a positive exponent");
  ScalarNonlinearity s;
  s.kind_ = Kind::power;
  s.exponent_ = exponent;
  return s;
}

ScalarNonlinearity ScalarNonlinearity::table(std::vector<double> t, std::vector<double> values) {
  if (t.size() != values.size()) throw InputError("table: knot and value counts differ");
  if (t.size() < 2) throw InputError("table: at least two knots are required");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(values[i]))
      throw InputError("table: row " + std::to_string(i + 1) + " is not finite");
    if (i > 0 && !(t[i] > t[i - 1]))
      throw InputError("table: t column must be strictly increasing (row " +
                       std::to_string(i + 1) + ")");
    if (i > 0 && values[i] < values[i - 1])
      throw InputError("table: values must be non-decreasing (row " + std::to_string(i + 1) + ")");
  }
  ScalarNonlinearity s;
  s.kind_ = Kind::table;
  s.knots_ = std::move(t);
  s.values_ = std::move(values);
  return s;
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& cell, int row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(cell.substr(used)).size() != 0)
    throw InputError("table CSV row " + std::to_string(row) + ": cannot parse '" + cell + "'");
  return v;
}

}  // namespace

ScalarNonlinearity ScalarNonlinearity::parse_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("table CSV is empty");
  std::string header = trim(line);
  header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
  if (header != "t,value") throw InputError("table CSV header must be 't,value'");
  std::vector<double> t, v;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw InputError("table CSV row " + std::to_string(row) + ": expected two columns");
    t.push_back(parse_cell(trim(line.substr(0, comma)), row));
    v.push_back(parse_cell(trim(line.substr(comma + 1)), row));
  }
  return table(std::move(t), std::move(v));
}

ScalarNonlinearity ScalarNonlinearity::load_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open table " + path.string());
  return parse_table_csv(in);
}

double ScalarNonlinearity::operator()(double t) const {
  if (kind_ == Kind::power) return t > 0.0 ? std::pow(t, exponent_) : 0.0;
  if (t <= knots_.front()) return values_.front();
  if (t >= knots_.back()) return values_.back();
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin());
  const std::size_t lo = hi - 1;
  const double s = (t - knots_[lo]) / (knots_[hi] - knots_[lo]);
  return values_[lo] + s * (values_[hi] - values_[lo]);
}

void ScalarNonlinearity::evaluate(std::span<const double> v, std::span<double> out,
                                  Execution e) const {
  const auto n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static) if (e == Execution::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = (*this)(v[i]);
}

std::string ScalarNonlinearity::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind_ == Kind::power)
    os << "power(" << exponent_ << ")";
  else
    os << "table(" << knots_.size() << " knots on [" << knots_.front() << ", " << knots_.back()
       << "])";
  return os.str();
}

double critical_exponent(int n) {
  if (n < 3)
    throw InputError("critical exponent 2n/(n-2) is not applicable for n = " + std::to_string(n) +
                     " (needs n >= 3)");
  return 2.0 * n / (n - 2.0);
}

Alpha1Report check_alpha1(const ScalarNonlinearity& F, const ScalarNonlinearity& H, int n,
                          double q, double t_max) {
  const double f_exp = critical_exponent(n) - 1.0;
  if (!(q > 0.0) || !(q < f_exp))
    throw InputError("check_alpha1: q must satisfy 0 < q < 2*-1 = " + std::to_string(f_exp));
  if (!(t_max > 0.0) || !std::isfinite(t_max))
    throw InputError("check_alpha1: t_max must be positive");

  Alpha1Report report;
  if (q >= 1.0)
    report.warnings.push_back("q = " + std::to_string(q) +
                              " >= 1: outside 0 < q < 1, the range used for the power-law model");

  auto fail = [&](const char* clause, char fn, double t, double value, double bound) {
    report.passed = false;
    report.clause = clause;
    report.function = fn;
    report.t = t;
    report.value = value;
    report.bound = bound;
  };
  // Equality is the extreme admissible case; allow for pow() rounding.
  auto within = [](double value, double bound) { return value <= bound * (1.0 + 1e-12) + 1e-300; };

  constexpr int samples = 1000;
  for (int i = 0; i < samples; ++i) {
    const double t = -1.0 + (t_max + 1.0) * i / (samples - 1);
    const double fv = F(t);
    const double hv = H(t);
    if (t < 0.0) {
      if (fv != 0.0) return fail("F(t) = 0 for t < 0", 'F', t, fv, 0.0), report;
      if (hv != 0.0) return fail("H(t) = 0 for t < 0", 'H', t, hv, 0.0), report;
      continue;
    }
    if (!(fv >= 0.0)) return fail("F(t) >= 0", 'F', t, fv, 0.0), report;
    if (const double b = std::pow(t, f_exp); !within(fv, b))
      return fail("F(t) <= t^(2*-1)", 'F', t, fv, b), report;
    if (!(hv >= 0.0)) return fail("H(t) >= 0", 'H', t, hv, 0.0), report;
    if (const double b = std::pow(t, q); !within(hv, b))
      return fail("H(t) <= t^q", 'H', t, hv, b), report;
  }
  return report;
}

NonlinearProblem::NonlinearProblem(Field a, Field f, Field h, ScalarNonlinearity F,
                                   ScalarNonlinearity H, int dimension)
    : a_(std::move(a)),
      f_(std::move(f)),
      h_(std::move(h)),
      F_(std::move(F)),
      H_(std::move(H)),
      dimension_(dimension) {
  require_same_domain(a_.domain(), f_.domain(), "NonlinearProblem (a, f)");
  require_same_domain(a_.domain(), h_.domain(), "NonlinearProblem (a, h)");
  if (dimension_ < 1) throw InputError("declared dimension must be at least 1");
  if (a_.min() > 0.0) linear_.emplace(a_);
}

const LinearProblem& NonlinearProblem::linear() const {
  if (!linear_) throw PreconditionError("coefficient a is not positive at every vertex");
  return *linear_;
}

Alpha2Report check_alpha2(const NonlinearProblem& problem) {
  Alpha2Report r;
  auto first = [](const Field& fld, auto pred) {
    for (int i = 0; i < fld.size(); ++i)
      if (pred(fld[i])) return i;
    return -1;
  };
  auto fail = [&](const char* clause, int vertex) {
    r.passed = false;
    r.clause = clause;
    r.vertex = vertex;
    return r;
  };
  if (int i = first(problem.a(), [](double v) { return !(v > 0.0); }); i >= 0)
    return fail("a > 0", i);
  if (int i = first(problem.f(), [](double v) { return v < 0.0; }); i >= 0)
    return fail("f >= 0", i);
  if (!(problem.f().max() > 0.0)) return fail("f != 0", -1);
  if (int i = first(problem.h(), [](double v) { return v < 0.0; }); i >= 0)
    return fail("h >= 0", i);
  if (!(problem.h().max() > 0.0)) return fail("h != 0", -1);
  return r;
}

DualVector apply_S(const NonlinearProblem& problem, const Field& v, Execution e) {
  require_same_domain(problem.domain(), v.domain(), "apply_S");
  const int n = v.size();
  Eigen::VectorXd fv(n), hv(n), out(n);
  problem.F().evaluate(as_span(v.values()), as_span(fv), e);
  problem.H().evaluate(as_span(v.values()), as_span(hv), e);
  const double* m = problem.domain()->mass().data();
  const double* f = problem.f().values().data();
  const double* h = problem.h().values().data();
#pragma omp parallel for schedule(static) if (e == Execution::parallel)
  for (int i = 0; i < n; ++i) out[i] = m[i] * (f[i] * fv[i] + h[i] * hv[i]);
  return DualVector(problem.domain(), std::move(out));
}

}  // namespace monoiter
