#include "monoiter/app.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "monoiter/mesh_io.hpp"
#include "monoiter/spectrum.hpp"

namespace monoiter::app {

namespace {

using nlohmann::json;

json alpha1_json(const Alpha1Report& r) {
  json j = {{"passed", r.passed}, {"warnings", r.warnings}};
  if (!r.passed) {
    j["clause"] = r.clause;
    j["function"] = std::string(1, r.function);
    j["t"] = r.t;
    j["value"] = r.value;
    j["bound"] = r.bound;
  }
  return j;
}

json alpha2_json(const Alpha2Report& r) {
  json j = {{"passed", r.passed}};
  if (!r.passed) {
    j["clause"] = r.clause;
    j["vertex"] = r.vertex;
  }
  return j;
}

json defect_json(const DefectCheck& c) {
  json j = {{"passed", c.ok}, {"scale", c.scale}};
  if (!c.ok) {
    j["vertex"] = c.vertex;
    j["defect"] = c.value;
  }
  return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Runs `body` and maps exceptions onto the exit-code contract.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const PreconditionError& e) {
    err << "failed: " << e.what() << '\n';
    return kExitFailure;
  } catch (const DivergenceError& e) {
    err << "failed: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

void print_checks(std::ostream& out, const CheckResults& c) {
  const auto& a1 = c.alpha1;
  out << "alpha1 (growth of F, H): " << (a1.passed ? "PASS" : "FAIL");
  if (!a1.passed)
    out << "  [" << a1.clause << "] at t = " << format_double(a1.t) << ": " << a1.function
        << "(t) = " << format_double(a1.value) << ", bound " << format_double(a1.bound);
  out << '\n';
  for (const auto& w : a1.warnings) out << "  warning: " << w << '\n';

  const auto& a2 = c.alpha2;
  out << "alpha2 (signs of a, f, h): " << (a2.passed ? "PASS" : "FAIL");
  if (!a2.passed) {
    out << "  [" << a2.clause << "]";
    if (a2.vertex >= 0) out << " at vertex " << a2.vertex;
  }
  out << '\n';

  if (!c.bracket) {
    out << "lower solution: SKIPPED (needs a > 0)\nupper solution: SKIPPED (needs a > 0)\n";
  } else {
    const auto& b = *c.bracket;
    if (!b.nonnegative || !b.ordered)
      out << "bracket ordering 0 <= lower <= upper: FAIL at vertex " << b.order_vertex << '\n';
    if (!b.lower_nonzero) out << "bracket: FAIL [lower != 0]\n";
    auto line = [&](const char* name, const DefectCheck& d) {
      out << name << ": " << (d.ok ? "PASS" : "FAIL");
      if (!d.ok && d.vertex >= 0)
        out << "  defect " << format_double(d.value) << " at vertex " << d.vertex;
      out << '\n';
    };
    line("lower solution", b.lower);
    line("upper solution", b.upper);
  }
  out << "result: " << (c.passed ? "PASS" : "FAIL") << '\n';
}

}  // namespace

CheckResults run_checks(const ScenarioModel& model) {
  CheckResults c;
  const double t_max = 2.0 * model.bracket.upper.max();
  c.alpha1 = check_alpha1(model.problem.F(), model.problem.H(), model.problem.dimension(), model.q,
                          t_max > 0.0 ? t_max : 1.0);
  c.alpha2 = check_alpha2(model.problem);
  if (model.problem.a().min() > 0.0) c.bracket = verify_bracket(model.problem, model.bracket);
  c.passed = c.alpha1.passed && c.alpha2.passed && c.bracket && c.bracket->passed();

  c.report = {{"alpha1", alpha1_json(c.alpha1)}, {"alpha2", alpha2_json(c.alpha2)},
              {"passed", c.passed}};
  if (c.bracket) {
    const auto& b = *c.bracket;
    c.report["lower"] = defect_json(b.lower);
    c.report["upper"] = defect_json(b.upper);
    c.report["bracket"] = {{"nonnegative", b.nonnegative},
                           {"ordered", b.ordered},
                           {"lower_nonzero", b.lower_nonzero}};
    if (b.order_vertex >= 0) c.report["bracket"]["vertex"] = b.order_vertex;
  } else {
    c.report["lower"] = nullptr;
    c.report["upper"] = nullptr;
  }
  return c;
}

int cmd_check(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err,
              const std::optional<std::filesystem::path>& report_path) {
  return guarded(err, [&] {
    const ScenarioModel model = build_model(load_scenario(scenario));
    const CheckResults c = run_checks(model);
    print_checks(out, c);
    if (report_path) write_json_file(*report_path, c.report);
    return c.passed ? kExitOk : kExitFailure;
  });
}

int cmd_solve(const std::filesystem::path& scenario, const std::filesystem::path& out_dir,
              const SolveFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const auto started = std::chrono::steady_clock::now();
    Scenario s = load_scenario(scenario);
    if (flags.tol) s.solver.tol = *flags.tol;
    if (flags.max_steps) s.solver.max_steps = *flags.max_steps;
    if (!(s.solver.tol > 0.0) || s.solver.max_steps < 1)
      throw InputError("--tol must be positive and --max-steps at least 1");
    const ScenarioModel model = build_model(s);

    const CheckResults checks = run_checks(model);
    if (!checks.passed) {
      print_checks(err, checks);
      err << "failed: hypotheses do not hold, not iterating\n";
      return kExitFailure;
    }

    IterationOptions opts;
    opts.tol = s.solver.tol;
    opts.max_steps = s.solver.max_steps;
    opts.linear_tol = s.solver.linear_tol;
    opts.execution = flags.execution;
    const MonotoneResult result = iterate_monotone(model.problem, model.bracket, opts);
    const SolutionPair& pair = result.solution;

    // Sandwich lower <= u_* <= u^* <= upper with the chain's slack.
    const double slack = opts.ordering_slack * model.bracket.upper.values().cwiseAbs().maxCoeff();
    const auto& lo = model.bracket.lower.values();
    const auto& up = model.bracket.upper.values();
    const bool sandwich = ((lo - pair.u_star.values()).array() <= slack).all() &&
                          ((pair.u_star.values() - pair.u_upper_star.values()).array() <= slack).all() &&
                          ((pair.u_upper_star.values() - up).array() <= slack).all();
    std::optional<bool> positive;
    if (model.domain->is_connected()) positive = positivity_check(*model.domain, pair.u_star);
    const bool residuals_ok = pair.residual_lower <= 10.0 * opts.tol * pair.scale_lower &&
                              pair.residual_upper <= 10.0 * opts.tol * pair.scale_upper;
    const bool success =
        result.converged() && sandwich && positive.value_or(true) && residuals_ok;

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw InputError("cannot create output directory " + out_dir.string());
    write_json_file(out_dir / "solution.json", to_json(pair));
    {
      std::ofstream csv(out_dir / "solution.csv");
      if (!csv) throw InputError("cannot write solution.csv");
      write_solution_csv(csv, model.bracket, pair);
    }
    {
      std::ofstream csv(out_dir / "trace.csv");
      if (!csv) throw InputError("cannot write trace.csv");
      write_trace_csv(csv, result.trace);
    }

    json summary = {{"alpha1_report", alpha1_json(checks.alpha1)},
                    {"alpha2_report", alpha2_json(checks.alpha2)},
                    {"bracket_verified", {checks.bracket->lower.ok, checks.bracket->upper.ok}},
                    {"status", to_string(result.status)},
                    {"converged", result.converged()},
                    {"steps", result.trace.steps},
                    {"ordering_violations", result.trace.ordering_violations},
                    {"residual_lower", pair.residual_lower},
                    {"residual_upper", pair.residual_upper},
                    {"coincide", pair.coincide},
                    {"min_u_star", pair.u_star.min()},
                    {"sandwich", sandwich},
                    {"positive", positive ? json(*positive) : json(nullptr)},
                    {"success", success}};
    if (!result.diagnostic.empty()) summary["diagnostic"] = result.diagnostic;
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (flags.record_time) summary["wall_time"] = wall;
    write_json_file(out_dir / "summary.json", summary);

    out << "status: " << to_string(result.status) << " after " << result.trace.steps
        << " steps\n"
        << "min u_*: " << format_double(pair.u_star.min())
        << "  max u^*: " << format_double(pair.u_upper_star.max()) << '\n'
        << "residuals: " << format_double(pair.residual_lower) << ", "
        << format_double(pair.residual_upper) << '\n'
        << "coincide: " << (pair.coincide ? "yes" : "no") << '\n'
        << "sandwich: " << (sandwich ? "ok" : "VIOLATED") << '\n'
        << "wall time: " << wall << " s\n";
    if (!result.diagnostic.empty()) err << "failed: " << result.diagnostic << '\n';
    return success ? kExitOk : kExitFailure;
  });
}

int cmd_spectrum(const std::filesystem::path& scenario, int k, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const DomainPtr domain = build_domain(load_scenario(scenario));
    if (domain->vertex_count() > 5000)
      throw InputError("spectrum is limited to 5000 vertices, domain has " +
                       std::to_string(domain->vertex_count()));
    for (double ev : smallest_eigenvalues(domain, k)) out << format_double(ev) << '\n';
    return kExitOk;
  });
}

int cmd_mesh_info(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err,
                  const std::optional<std::filesystem::path>& export_path) {
  return guarded(err, [&] {
    const DomainPtr d = build_domain(load_scenario(scenario));
    const MeshQualityReport& q = d->quality();
    out << "kind: " << to_string(d->kind()) << '\n'
        << "vertices: " << d->vertex_count() << '\n';
    if (d->kind() == DomainKind::triangle_surface) out << "faces: " << d->faces().size() << '\n';
    out << "declared dimension: " << d->declared_dimension() << '\n'
        << "total volume: " << format_double(d->total_volume()) << '\n'
        << "connected: " << (d->is_connected() ? "yes" : "no") << '\n'
        << "obtuse triangles: " << q.obtuse_triangle_count << '\n'
        << "positive off-diagonals: " << q.negative_offdiagonal_count << '\n'
        << "m-matrix compatible: " << (q.is_m_matrix_compatible ? "yes" : "no") << '\n';
    if (export_path) write_json_file(*export_path, domain_to_json(*d));
    return kExitOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Monotone iteration for  Delta u + a u = f F(u) + h H(u)  on compact surfaces and tori"};
  cli.require_subcommand(1);

  std::string scenario;
  std::string report_path, out_dir, export_path;
  std::optional<double> tol;
  std::optional<int> max_steps;
  bool parallel = false, record_time = false;
  int k = 0;

  auto* check = cli.add_subcommand("check", "verify (alpha1), (alpha2) and the bracket");
  check->add_option("scenario", scenario, "scenario JSON")->required();
  check->add_option("--report", report_path, "write the JSON report here");

  auto* solve = cli.add_subcommand("solve", "run the monotone iteration from both ends");
  solve->add_option("scenario", scenario, "scenario JSON")->required();
  solve->add_option("--out", out_dir, "output directory")->required();
  solve->add_option("--tol", tol, "step-change tolerance");
  solve->add_option("--max-steps", max_steps, "iteration cap");
  solve->add_flag("--parallel", parallel, "use the OpenMP kernels");
  solve->add_flag("--record-time", record_time, "store wall_time in summary.json");

  auto* spectrum = cli.add_subcommand("spectrum", "smallest eigenvalues of L x = lambda M x");
  spectrum->add_option("scenario", scenario, "scenario JSON")->required();
  spectrum->add_option("--k", k, "number of eigenvalues")->required();

  auto* info = cli.add_subcommand("mesh-info", "domain statistics and mesh quality");
  info->add_option("scenario", scenario, "scenario JSON")->required();
  info->add_option("--export", export_path, "write the domain JSON here");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << cli.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n' << cli.help();
    return kExitInput;
  }

  if (check->parsed())
    return cmd_check(scenario, out, err,
                     report_path.empty() ? std::nullopt
                                         : std::optional<std::filesystem::path>(report_path));
  if (solve->parsed()) {
    SolveFlags flags;
    flags.tol = tol;
    flags.max_steps = max_steps;
    flags.execution = parallel ? Execution::parallel : Execution::serial;
    flags.record_time = record_time;
    return cmd_solve(scenario, out_dir, flags, out, err);
  }
  if (spectrum->parsed()) return cmd_spectrum(scenario, k, out, err);
  return cmd_mesh_info(scenario, out, err,
                       export_path.empty() ? std::nullopt
                                           : std::optional<std::filesystem::path>(export_path));
}

}  // namespace monoiter::app
