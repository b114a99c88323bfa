#include "monoiter/scenario.hpp"

#include <fstream>
#include <set>

#include "monoiter/expression.hpp"
#include "monoiter/mesh_io.hpp"

namespace monoiter {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InputError("scenario: '" + where + "' must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw InputError("scenario: unknown key '" + key + "' in " + where);
}

const json& need(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw InputError("scenario: missing '" + key + "' in " + where);
  return j.at(key);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw InputError("scenario: '" + what + "' must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw InputError("scenario: '" + what + "' must be an integer");
  return j.get<int>();
}

std::string string_of(const json& j, const std::string& what) {
  if (!j.is_string()) throw InputError("scenario: '" + what + "' must be a string");
  return j.get<std::string>();
}

CoefficientSpec coefficient(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw InputError("scenario: '" + what + "' must be a number or an expression string");
}

json coefficient_json(const CoefficientSpec& c) {
  return std::visit([](const auto& v) { return json(v); }, c);
}

NonlinearitySpec nonlinearity(const json& j, const std::string& what) {
  only_keys(j, {"type", "p", "path"}, what);
  const std::string type = string_of(need(j, "type", what), what + ".type");
  if (type == "power") {
    if (j.contains("path")) throw InputError("scenario: power nonlinearity takes no 'path'");
    return PowerSpec{number(need(j, "p", what), what + ".p")};
  }
  if (type == "table") {
    if (j.contains("p")) throw InputError("scenario: table nonlinearity takes no 'p'");
    return TableSpec{string_of(need(j, "path", what), what + ".path")};
  }
  throw InputError("scenario: unknown nonlinearity type '" + type + "'");
}

json nonlinearity_json(const NonlinearitySpec& s) {
  if (const auto* p = std::get_if<PowerSpec>(&s)) return {{"type", "power"}, {"p", p->p}};
  return {{"type", "table"}, {"path", std::get<TableSpec>(s).path}};
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir) {
  only_keys(j, {"domain", "dimension", "coefficients", "nonlinearity", "q", "bracket", "solver"},
            "scenario");
  Scenario s;
  s.base_dir = base_dir;

  const json& d = need(j, "domain", "scenario");
  if (!d.is_object()) throw InputError("scenario: 'domain' must be an object");
  const std::string type = string_of(need(d, "type", "domain"), "domain.type");
  if (type == "icosphere") {
    only_keys(d, {"type", "subdivisions", "radius"}, "domain");
    IcosphereSpec ico;
    ico.subdivisions = integer(need(d, "subdivisions", "domain"), "domain.subdivisions");
    if (d.contains("radius")) ico.radius = number(d.at("radius"), "domain.radius");
    s.domain = ico;
  } else if (type == "flat_torus") {
    only_keys(d, {"type", "dims"}, "domain");
    const json& dims = need(d, "dims", "domain");
    if (!dims.is_array()) throw InputError("scenario: 'domain.dims' must be an array");
    TorusSpec torus;
    for (const auto& ax : dims) {
      only_keys(ax, {"cells", "length"}, "domain.dims[]");
      torus.dims.push_back({integer(need(ax, "cells", "domain.dims[]"), "cells"),
                            number(need(ax, "length", "domain.dims[]"), "length")});
    }
    s.domain = torus;
  } else if (type == "off_file") {
    only_keys(d, {"type", "path"}, "domain");
    s.domain = OffFileSpec{string_of(need(d, "path", "domain"), "domain.path")};
  } else {
    throw InputError("scenario: unknown domain type '" + type + "'");
  }

  if (j.contains("dimension")) s.dimension = integer(j.at("dimension"), "dimension");
  if (j.contains("coefficients")) {
    const json& c = j.at("coefficients");
    only_keys(c, {"a", "f", "h"}, "coefficients");
    if (c.contains("a")) s.a = coefficient(c.at("a"), "coefficients.a");
    if (c.contains("f")) s.f = coefficient(c.at("f"), "coefficients.f");
    if (c.contains("h")) s.h = coefficient(c.at("h"), "coefficients.h");
  }
  if (j.contains("nonlinearity")) {
    const json& nl = j.at("nonlinearity");
    only_keys(nl, {"F", "H"}, "nonlinearity");
    if (nl.contains("F")) s.F = nonlinearity(nl.at("F"), "nonlinearity.F");
    if (nl.contains("H")) s.H = nonlinearity(nl.at("H"), "nonlinearity.H");
  }
  if (j.contains("q")) s.q = number(j.at("q"), "q");
  if (j.contains("bracket")) {
    const json& b = j.at("bracket");
    only_keys(b, {"lower", "upper", "verification_tol"}, "bracket");
    if (b.contains("lower")) s.lower = coefficient(b.at("lower"), "bracket.lower");
    if (b.contains("upper")) s.upper = coefficient(b.at("upper"), "bracket.upper");
    if (b.contains("verification_tol"))
      s.verification_tol = number(b.at("verification_tol"), "bracket.verification_tol");
  }
  if (j.contains("solver")) {
    const json& sv = j.at("solver");
    only_keys(sv, {"tol", "max_steps", "linear_tol"}, "solver");
    if (sv.contains("tol")) s.solver.tol = number(sv.at("tol"), "solver.tol");
    if (sv.contains("max_steps")) s.solver.max_steps = integer(sv.at("max_steps"), "solver.max_steps");
    if (sv.contains("linear_tol")) s.solver.linear_tol = number(sv.at("linear_tol"), "solver.linear_tol");
  }
  if (!(s.solver.tol > 0.0) || !(s.solver.linear_tol > 0.0) || s.solver.max_steps < 1)
    throw InputError("scenario: solver tolerances must be positive and max_steps >= 1");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("scenario " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_scenario(j, path.parent_path());
}

json to_json(const Scenario& s) {
  json j;
  if (const auto* ico = std::get_if<IcosphereSpec>(&s.domain)) {
    j["domain"] = {{"type", "icosphere"}, {"subdivisions", ico->subdivisions}, {"radius", ico->radius}};
  } else if (const auto* torus = std::get_if<TorusSpec>(&s.domain)) {
    json dims = json::array();
    for (const auto& ax : torus->dims) dims.push_back({{"cells", ax.cells}, {"length", ax.length}});
    j["domain"] = {{"type", "flat_torus"}, {"dims", dims}};
  } else {
    j["domain"] = {{"type", "off_file"}, {"path", std::get<OffFileSpec>(s.domain).path}};
  }
  if (s.dimension) j["dimension"] = *s.dimension;
  if (s.a || s.f || s.h) {
    json c = json::object();
    if (s.a) c["a"] = coefficient_json(*s.a);
    if (s.f) c["f"] = coefficient_json(*s.f);
    if (s.h) c["h"] = coefficient_json(*s.h);
    j["coefficients"] = c;
  }
  if (s.F || s.H) {
    json nl = json::object();
    if (s.F) nl["F"] = nonlinearity_json(*s.F);
    if (s.H) nl["H"] = nonlinearity_json(*s.H);
    j["nonlinearity"] = nl;
  }
  if (s.q) j["q"] = *s.q;
  if (s.lower || s.upper || s.verification_tol) {
    json b = json::object();
    if (s.lower) b["lower"] = coefficient_json(*s.lower);
    if (s.upper) b["upper"] = coefficient_json(*s.upper);
    if (s.verification_tol) b["verification_tol"] = *s.verification_tol;
    j["bracket"] = b;
  }
  j["solver"] = {{"tol", s.solver.tol},
                 {"max_steps", s.solver.max_steps},
                 {"linear_tol", s.solver.linear_tol}};
  return j;
}

DomainPtr build_domain(const Scenario& s) {
  const int n = s.dimension.value_or(0);
  if (const auto* ico = std::get_if<IcosphereSpec>(&s.domain))
    return build_icosphere(ico->subdivisions, ico->radius, n > 0 ? n : 2);
  if (const auto* torus = std::get_if<TorusSpec>(&s.domain))
    return build_flat_torus(torus->dims, n);
  const auto& off = std::get<OffFileSpec>(s.domain);
  return DiscreteDomain::from_surface(read_off_file(resolve(s.base_dir, off.path)), n > 0 ? n : 2);
}

Field build_field(const CoefficientSpec& spec, const DomainPtr& domain) {
  if (const auto* c = std::get_if<double>(&spec)) {
    if (!std::isfinite(*c)) throw InputError("coefficient constant is not finite");
    return Field::constant(domain, *c);
  }
  return parse_coefficient(std::get<std::string>(spec), domain);
}

ScalarNonlinearity build_nonlinearity(const NonlinearitySpec& spec,
                                      const std::filesystem::path& base_dir) {
  if (const auto* p = std::get_if<PowerSpec>(&spec)) return ScalarNonlinearity::power(p->p);
  return ScalarNonlinearity::load_table_csv(resolve(base_dir, std::get<TableSpec>(spec).path));
}

ScenarioModel build_model(const Scenario& s) {
  auto missing = [](const char* what) {
    return InputError(std::string("scenario: '") + what + "' is required for this command");
  };
  if (!s.dimension) throw missing("dimension");
  if (!s.a) throw missing("coefficients.a");
  if (!s.f) throw missing("coefficients.f");
  if (!s.h) throw missing("coefficients.h");
  if (!s.F) throw missing("nonlinearity.F");
  if (!s.H) throw missing("nonlinearity.H");
  if (!s.lower) throw missing("bracket.lower");
  if (!s.upper) throw missing("bracket.upper");

  DomainPtr domain = build_domain(s);
  double q = 0.0;
  if (s.q)
    q = *s.q;
  else if (const auto* p = std::get_if<PowerSpec>(&*s.H))
    q = p->p;
  else
    throw missing("q");

  NonlinearProblem problem(build_field(*s.a, domain), build_field(*s.f, domain),
                           build_field(*s.h, domain), build_nonlinearity(*s.F, s.base_dir),
                           build_nonlinearity(*s.H, s.base_dir), *s.dimension);
  Bracket bracket{build_field(*s.lower, domain), build_field(*s.upper, domain),
                  s.verification_tol.value_or(s.solver.tol)};
  return ScenarioModel{domain, std::move(problem), std::move(bracket), q};
}

}  // namespace monoiter
