#include "monoiter/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <ostream>

namespace monoiter {

namespace {

constexpr double kScaleFloor = std::numeric_limits<double>::min();

double defect_scale(const NonlinearProblem& problem, const Eigen::VectorXd& v) {
  return problem.domain()->mass().cwiseProduct(problem.a().values()).cwiseProduct(v)
             .cwiseAbs()
             .maxCoeff() +
         kScaleFloor;
}

void require_nonnegative(const Field& v, const char* who) {
  for (int i = 0; i < v.size(); ++i)
    if (v[i] < 0.0)
      throw InputError(std::string(who) + ": v must be nonnegative, v[" + std::to_string(i) +
                       "] = " + format_double(v[i]));
}

DefectCheck sign_check(const NonlinearProblem& problem, const Field& v, double tol, bool lower) {
  require_nonnegative(v, lower ? "verify_lower" : "verify_upper");
  const DualVector d = defect(problem, v);
  DefectCheck c;
  c.scale = defect_scale(problem, v.values());
  const double bound = tol * c.scale;
  for (int i = 0; i < d.size(); ++i) {
    const bool bad = lower ? d[i] > bound : d[i] < -bound;
    if (bad) {
      c.ok = false;
      c.vertex = i;
      c.value = d[i];
      break;
    }
  }
  return c;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_string(IterationStatus status) {
  switch (status) {
    case IterationStatus::converged: return "converged";
    case IterationStatus::max_steps_exceeded: return "max_steps_exceeded";
    case IterationStatus::ordering_violation: return "ordering_violation";
  }
  return "unknown";
}

DualVector defect(const NonlinearProblem& problem, const Field& v, Execution e) {
  require_same_domain(problem.domain(), v.domain(), "defect");
  const DualVector s = apply_S(problem, v, e);
  Eigen::VectorXd av;
  problem.linear().apply(v.values(), av, e);
  return DualVector(problem.domain(), av - s.values());
}

DefectCheck check_lower(const NonlinearProblem& problem, const Field& v, double tol) {
  return sign_check(problem, v, tol, true);
}

DefectCheck check_upper(const NonlinearProblem& problem, const Field& v, double tol) {
  return sign_check(problem, v, tol, false);
}

bool verify_lower(const NonlinearProblem& problem, const Field& v, double tol) {
  return check_lower(problem, v, tol).ok;
}

bool verify_upper(const NonlinearProblem& problem, const Field& v, double tol) {
  return check_upper(problem, v, tol).ok;
}

BracketReport verify_bracket(const NonlinearProblem& problem, const Bracket& bracket) {
  require_same_domain(problem.domain(), bracket.lower.domain(), "verify_bracket");
  require_same_domain(problem.domain(), bracket.upper.domain(), "verify_bracket");
  BracketReport r;
  for (int i = 0; i < bracket.lower.size(); ++i) {
    if (bracket.lower[i] < 0.0 && r.nonnegative) {
      r.nonnegative = false;
      if (r.order_vertex < 0) r.order_vertex = i;
    }
    if (bracket.lower[i] > bracket.upper[i] && r.ordered) {
      r.ordered = false;
      if (r.order_vertex < 0) r.order_vertex = i;
    }
  }
  r.lower_nonzero = bracket.lower.max() > 0.0;
  if (!r.nonnegative) {
    r.lower.ok = false;
    r.upper.ok = false;
    return r;
  }
  r.lower = check_lower(problem, bracket.lower, bracket.verification_tol);
  r.upper = check_upper(problem, bracket.upper, bracket.verification_tol);
  return r;
}

namespace {

// One application of J = T o S, given S(u) already evaluated.
struct Sequence {
  Eigen::VectorXd u;
  Eigen::VectorXd s;  // S(u)
  std::vector<StepRecord> records;
};

void advance(const NonlinearProblem& problem, const SolveOptions& base, Sequence& seq, int step,
             Execution ex) {
  SolveOptions opts = base;
  opts.initial_guess = seq.u;
  auto [next, report] = solve_T(problem.linear(), DualVector(problem.domain(), seq.s), opts);
  Eigen::VectorXd u_next = next.values();

  StepRecord rec;
  rec.step = step;
  rec.max_change = kernels::max_abs_diff(ex, as_span(u_next), as_span(seq.u));
  rec.min_u = u_next.minCoeff();
  rec.max_u = u_next.maxCoeff();

  const Field next_field(problem.domain(), u_next);
  Eigen::VectorXd s_next = apply_S(problem, next_field, ex).values();
  Eigen::VectorXd au;
  problem.linear().apply(u_next, au, ex);
  rec.defect_norm = kernels::max_abs_diff(ex, as_span(au), as_span(s_next));

  seq.u = std::move(u_next);
  seq.s = std::move(s_next);
  seq.records.push_back(rec);
}

// First vertex with a[i] > b[i] + slack, or -1.
int first_excess(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double slack) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] > b[i] + slack) return static_cast<int>(i);
  return -1;
}

}  // namespace

MonotoneResult iterate_monotone(const NonlinearProblem& problem, const Bracket& bracket,
                                const IterationOptions& options) {
  if (!(options.tol > 0.0)) throw InputError("iterate_monotone: tol must be positive");
  if (options.max_steps < 1) throw InputError("iterate_monotone: max_steps must be at least 1");
  const Alpha2Report a2 = check_alpha2(problem);
  if (!a2.passed)
    throw PreconditionError("iterate_monotone: coefficient condition '" + a2.clause + "' fails");
  if (!problem.domain()->quality().is_m_matrix_compatible)
    throw PreconditionError(
        "iterate_monotone: stiffness is not M-matrix compatible; the discrete comparison "
        "principle behind the monotone chain does not hold");
  const BracketReport br = verify_bracket(problem, bracket);
  if (!br.passed()) throw PreconditionError("iterate_monotone: bracket does not verify");

  const Execution ex = options.execution;
  SolveOptions lin;
  lin.tol = options.linear_tol > 0.0 ? options.linear_tol : options.tol / 100.0;
  lin.execution = ex;
  const double slack =
      options.ordering_slack * std::max(bracket.upper.values().cwiseAbs().maxCoeff(), kScaleFloor);

  Sequence lo{bracket.lower.values(), apply_S(problem, bracket.lower, ex).values(), {}};
  Sequence up{bracket.upper.values(), apply_S(problem, bracket.upper, ex).values(), {}};

  MonotoneResult result{IterationStatus::max_steps_exceeded,
                        SolutionPair{bracket.lower, bracket.upper},
                        {},
                        {}};
  IterationTrace& trace = result.trace;
  if (options.keep_iterates) {
    trace.lower_iterates.push_back(lo.u);
    trace.upper_iterates.push_back(up.u);
  }

  auto violation = [&](int step, const char* link, int vertex, double excess) {
    ++trace.ordering_violations;
    result.status = IterationStatus::ordering_violation;
    result.diagnostic = "ordering violation at step " + std::to_string(step) + ": " + link +
                        " fails at vertex " + std::to_string(vertex) + " by " +
                        format_double(excess) + " (slack " + format_double(slack) + ")";
  };

  for (int step = 1; step <= options.max_steps; ++step) {
    const Eigen::VectorXd lo_prev = lo.u;
    const Eigen::VectorXd up_prev = up.u;
    if (options.concurrent_sequences) {
      auto upper_done =
          std::async(std::launch::async, [&] { advance(problem, lin, up, step, ex); });
      advance(problem, lin, lo, step, ex);
      upper_done.get();
    } else {
      advance(problem, lin, lo, step, ex);
      advance(problem, lin, up, step, ex);
    }
    trace.steps = step;
    if (options.keep_iterates) {
      trace.lower_iterates.push_back(lo.u);
      trace.upper_iterates.push_back(up.u);
    }

    if (int v = first_excess(lo_prev, lo.u, slack); v >= 0) {
      violation(step, "u_k <= u_{k+1}", v, lo_prev[v] - lo.u[v]);
      break;
    }
    if (int v = first_excess(up.u, up_prev, slack); v >= 0) {
      violation(step, "u^{k+1} <= u^k", v, up.u[v] - up_prev[v]);
      break;
    }
    if (int v = first_excess(lo.u, up.u, slack); v >= 0) {
      violation(step, "u_{k+1} <= u^{k+1}", v, lo.u[v] - up.u[v]);
      break;
    }

    const StepRecord& rl = lo.records.back();
    const StepRecord& ru = up.records.back();
    const double scale_lo = defect_scale(problem, lo.u);
    const double scale_up = defect_scale(problem, up.u);
    if (rl.max_change <= options.tol && ru.max_change <= options.tol &&
        rl.defect_norm <= 10.0 * options.tol * scale_lo &&
        ru.defect_norm <= 10.0 * options.tol * scale_up) {
      result.status = IterationStatus::converged;
      break;
    }
  }

  trace.lower = std::move(lo.records);
  trace.upper = std::move(up.records);

  SolutionPair& pair = result.solution;
  pair.u_star = Field(problem.domain(), lo.u);
  pair.u_upper_star = Field(problem.domain(), up.u);
  pair.residual_lower = trace.lower.empty() ? 0.0 : trace.lower.back().defect_norm;
  pair.residual_upper = trace.upper.empty() ? 0.0 : trace.upper.back().defect_norm;
  pair.scale_lower = defect_scale(problem, lo.u);
  pair.scale_upper = defect_scale(problem, up.u);
  pair.coincide = kernels::max_abs_diff(ex, as_span(up.u), as_span(lo.u)) <= 10.0 * options.tol;
  return result;
}

bool positivity_check(const DiscreteDomain& domain, const Field& u) {
  if (!domain.is_connected())
    throw PreconditionError("positivity_check: domain is not connected");
  if (u.domain().get() != &domain) throw DomainMismatch("positivity_check: field on another domain");
  return u.min() > 0.0;
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  out << "step,seq,max_change,min_u,max_u,defect_norm\n";
  auto row = [&](const StepRecord& r, const char* seq) {
    out << r.step << ',' << seq << ',' << format_double(r.max_change) << ','
        << format_double(r.min_u) << ',' << format_double(r.max_u) << ','
        << format_double(r.defect_norm) << '\n';
  };
  const std::size_t n = std::max(trace.lower.size(), trace.upper.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (k < trace.lower.size()) row(trace.lower[k], "lower");
    if (k < trace.upper.size()) row(trace.upper[k], "upper");
  }
}

void write_solution_csv(std::ostream& out, const Bracket& bracket, const SolutionPair& pair) {
  const auto& coords = pair.u_star.domain()->coordinates();
  out << "vertex,x,y,z,lower,u_star,u_upper_star,upper\n";
  for (int i = 0; i < pair.u_star.size(); ++i) {
    out << i << ',' << format_double(coords[i][0]) << ',' << format_double(coords[i][1]) << ','
        << format_double(coords[i][2]) << ',' << format_double(bracket.lower[i]) << ','
        << format_double(pair.u_star[i]) << ',' << format_double(pair.u_upper_star[i]) << ','
        << format_double(bracket.upper[i]) << '\n';
  }
}

nlohmann::json to_json(const SolutionPair& pair) {
  const auto& lo = pair.u_star.values();
  const auto& up = pair.u_upper_star.values();
  return {{"u_star", std::vector<double>(lo.data(), lo.data() + lo.size())},
          {"u_upper_star", std::vector<double>(up.data(), up.data() + up.size())},
          {"residual_lower", pair.residual_lower},
          {"residual_upper", pair.residual_upper},
          {"coincide", pair.coincide}};
}

}  // namespace monoiter
