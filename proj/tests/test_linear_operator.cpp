#include <doctest.h>

#include <cmath>
#include <random>

#include "monoiter/linear_operator.hpp"
#include "oracles.hpp"

using namespace monoiter;

namespace {

DomainPtr unit_torus3() { return build_flat_torus({{8, 1.0}, {8, 1.0}, {8, 1.0}}); }

DomainPtr two_pi_torus() { return build_flat_torus({{16, 6.2832}, {16, 6.2832}}); }

Field field_of(const DomainPtr& d, const std::function<double(const Vec3&)>& fn) {
  Eigen::VectorXd v(d->vertex_count());
  for (int i = 0; i < v.size(); ++i) v[i] = fn(d->coordinates()[i]);
  return Field(d, std::move(v));
}

}  // namespace

TEST_CASE("embed_function") {
  const DomainPtr d = unit_torus3();
  CHECK(embed_function(Field::constant(d, 0.0)).values().cwiseAbs().maxCoeff() == 0.0);
  const DualVector one = embed_function(Field::constant(d, 1.0));
  CHECK(one.values() == d->mass());
  CHECK(one.values().sum() == doctest::Approx(1.0).epsilon(1e-14));

  const DomainPtr s = build_icosphere(2, 1.0);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(s->vertex_count());
  e[17] = 1.0;
  const DualVector ind = embed_function(Field(s, e));
  for (int i = 0; i < s->vertex_count(); ++i) CHECK(ind[i] == (i == 17 ? s->mass()[17] : 0.0));
}

TEST_CASE("solve_T on constant data") {
  const DomainPtr d = unit_torus3();
  const auto [u1, r1] = solve_T(LinearProblem(Field::constant(d, 1.0)),
                                embed_function(Field::constant(d, 1.0)));
  CHECK((u1.values().array() - 1.0).abs().maxCoeff() <= 1e-9);
  const auto [u2, r2] = solve_T(LinearProblem(Field::constant(d, 4.0)),
                                embed_function(Field::constant(d, 2.0)));
  CHECK((u2.values().array() - 0.5).abs().maxCoeff() <= 1e-9);
  CHECK(r2.converged);
  CHECK(r2.final_residual_norm <= 1e-10 * embed_function(Field::constant(d, 2.0)).values().norm());
}

TEST_CASE("solve_T reproduces the damped cosine mode") {
  const DomainPtr d = two_pi_torus();
  const LinearProblem p(Field::constant(d, 1.0));
  const Field c = field_of(d, [](const Vec3& x) { return std::cos(x[0]); });
  const DualVector psi = embed_function(c);
  const auto [u, report] = solve_T(p, psi);
  // continuum: (1 + 1) u = cos x
  CHECK((u.values() - 0.5 * c.values()).cwiseAbs().maxCoeff() <= 0.02 * 0.5);
  // discrete: amplitude 1 / (1 + lambda_1) on this grid
  CHECK((u.values() - 0.5032180255023712 * c.values()).cwiseAbs().maxCoeff() <= 1e-4);
  const Eigen::VectorXd dense = oracle::dense_solve(*d, p.a().values(), psi.values());
  CHECK((u.values() - dense).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("energy history is non-increasing and tracks I(u)") {
  std::mt19937_64 rng(5);
  for (const DomainPtr& d : {build_icosphere(3, 1.0), unit_torus3()}) {
    for (int trial = 0; trial < 5; ++trial) {
      const LinearProblem p(Field(d, oracle::random_vector(rng, d->vertex_count(), 0.05, 5)));
      const DualVector psi(d, oracle::random_vector(rng, d->vertex_count(), -1, 1));
      const auto [u, report] = solve_T(p, psi);
      REQUIRE(report.energy_history.size() == static_cast<std::size_t>(report.iterations) + 1);
      for (std::size_t k = 1; k < report.energy_history.size(); ++k)
        CHECK(report.energy_history[k] <= report.energy_history[k - 1]);
      const double e = p.energy(u.values(), psi.values());
      CHECK(report.energy_history.back() == doctest::Approx(e).epsilon(1e-8));
      const auto j = to_json(report);
      CHECK(j["iterations"] == report.iterations);
      CHECK(j["energy_history"].size() == report.energy_history.size());
    }
  }
}

TEST_CASE("uniqueness: different starting vectors reach the same solution") {
  std::mt19937_64 rng(9);
  const DomainPtr d = build_icosphere(3, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const LinearProblem p(Field(d, oracle::random_vector(rng, d->vertex_count(), 0.2, 3)));
    const DualVector psi(d, oracle::random_vector(rng, d->vertex_count(), -1, 1));
    SolveOptions a, b;
    a.tol = b.tol = 1e-10;
    b.initial_guess = oracle::random_vector(rng, d->vertex_count(), -10, 10);
    const auto [ua, ra] = solve_T(p, psi, a);
    const auto [ub, rb] = solve_T(p, psi, b);
    const double scale = std::max(1.0, ua.values().cwiseAbs().maxCoeff());
    CHECK((ua.values() - ub.values()).cwiseAbs().maxCoeff() <= 10 * a.tol * scale);
  }
}

TEST_CASE("coercivity bound on random vectors") {
  std::mt19937_64 rng(13);
  const DomainPtr d = build_icosphere(2, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const LinearProblem p(Field(d, oracle::random_vector(rng, d->vertex_count(), 0.01, 4)));
    const Eigen::VectorXd u = oracle::random_vector(rng, d->vertex_count(), -3, 3);
    Eigen::VectorXd au(u.size());
    p.apply(u, au);
    const double h1 = h1_norm(*d, u);
    CHECK(0.5 * u.dot(au) >= 0.5 * p.coercivity() * h1 * h1 - 1e-10);
  }
  CHECK(LinearProblem(Field::constant(d, 7.0)).coercivity() == 1.0);
  CHECK(LinearProblem(Field::constant(d, 0.25)).coercivity() == 0.25);
  Eigen::VectorXd a = Eigen::VectorXd::Ones(d->vertex_count());
  a[3] = 0.0;
  CHECK_THROWS_AS(LinearProblem(Field(d, a)), PreconditionError);
}

TEST_CASE("system matrix matches L + M diag(a)") {
  std::mt19937_64 rng(15);
  const DomainPtr d = build_icosphere(2, 1.0);
  const LinearProblem p(Field(d, oracle::random_vector(rng, d->vertex_count(), 0.5, 2)));
  Eigen::MatrixXd ref(d->stiffness());
  ref.diagonal() += d->mass().cwiseProduct(p.a().values());
  CHECK((Eigen::MatrixXd(p.system_matrix()) - ref).cwiseAbs().maxCoeff() <= 1e-15);
  const Eigen::VectorXd x = oracle::random_vector(rng, d->vertex_count(), -1, 1);
  Eigen::VectorXd y(x.size());
  p.apply(x, y);
  CHECK((y - ref * x).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("comparison principle") {
  const DomainPtr t = unit_torus3();
  const LinearProblem pt(Field::constant(t, 1.0));
  CHECK(check_comparison(pt, embed_function(Field::constant(t, 0.0)),
                         embed_function(Field::constant(t, 1.0))));
  const DualVector same = embed_function(Field::constant(t, 0.3));
  CHECK(check_comparison(pt, same, same));

  std::mt19937_64 rng(17);
  const DomainPtr d = build_icosphere(2, 1.0);
  const int n = d->vertex_count();
  for (int trial = 0; trial < 100; ++trial) {
    const LinearProblem p(Field(d, oracle::random_vector(rng, n, 0.05, 5)));
    const Eigen::VectorXd lo = oracle::random_vector(rng, n, -1, 1);
    Eigen::VectorXd gap = oracle::random_vector(rng, n, 0, 1);
    if (trial % 2 == 0) gap = gap.array().square().square();  // sparse-ish, tiny gaps
    CHECK(check_comparison(p, DualVector(d, lo), DualVector(d, lo + gap)));
  }
  CHECK_THROWS_AS(check_comparison(pt, embed_function(Field::constant(t, 1.0)),
                                   embed_function(Field::constant(t, 0.0))),
                  InputError);

  const SurfaceMesh obtuse{{{0, 0, 0}, {4, 0, 0}, {2, 0.3, 0}, {2, 3, 0}},
                           {{0, 1, 2}, {0, 2, 3}, {2, 1, 3}}};
  const DomainPtr bad = DiscreteDomain::from_surface(obtuse);
  const LinearProblem pb(Field::constant(bad, 1.0));
  CHECK_THROWS_AS(check_comparison(pb, embed_function(Field::constant(bad, 0.0)),
                                   embed_function(Field::constant(bad, 1.0))),
                  PreconditionError);
}

TEST_CASE("Lipschitz certificate") {
  const DomainPtr t = unit_torus3();
  const LinearProblem p1(Field::constant(t, 1.0));
  const DualVector z = embed_function(Field::constant(t, 0.7));
  const auto zero = lipschitz_certificate(p1, z, z);
  CHECK(zero.lhs == doctest::Approx(0.0).scale(1.0));
  CHECK(zero.rhs == doctest::Approx(0.0).scale(1.0));

  std::mt19937_64 rng(19);
  // a = 1: T is an isometry between the dual and H1 norms
  const DomainPtr s = build_icosphere(3, 1.0);
  const LinearProblem ps(Field::constant(s, 1.0));
  for (int trial = 0; trial < 3; ++trial) {
    const DualVector a(s, oracle::random_vector(rng, s->vertex_count(), -1, 1));
    const DualVector b(s, oracle::random_vector(rng, s->vertex_count(), -1, 1));
    const auto c = lipschitz_certificate(ps, a, b);
    CHECK(std::abs(c.lhs - c.rhs) <= 1e-9 * std::max(1.0, c.rhs));
  }

  // a = 4 on the unit torus with a constant difference: lhs = |diff|/4 vs rhs = |diff|/1
  const LinearProblem p4(Field::constant(t, 4.0));
  const auto c4 = lipschitz_certificate(p4, embed_function(Field::constant(t, 1.0)),
                                        embed_function(Field::constant(t, 0.0)));
  CHECK(c4.lhs == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(c4.rhs == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c4.lhs < c4.rhs - 0.5);

  for (int trial = 0; trial < 10; ++trial) {
    const DomainPtr d = trial % 2 ? build_icosphere(2, 0.5 + trial) : unit_torus3();
    const int n = d->vertex_count();
    const LinearProblem p(Field(d, oracle::random_vector(rng, n, 0.01, 10)));
    const auto c = lipschitz_certificate(p, DualVector(d, oracle::random_vector(rng, n, -1, 1)),
                                         DualVector(d, oracle::random_vector(rng, n, -1, 1)));
    CHECK(c.lhs <= c.rhs + 1e-9);
  }
  const DomainPtr big = build_icosphere(4, 1.0);
  const DualVector one = embed_function(Field::constant(big, 1.0));
  CHECK_THROWS_AS(lipschitz_certificate(LinearProblem(Field::constant(big, 1.0)), one, one),
                  InputError);
}

TEST_CASE("iteration cap raises a divergence error with the partial report") {
  std::mt19937_64 rng(21);
  const DomainPtr d = build_icosphere(3, 1.0);
  const LinearProblem p(Field::constant(d, 1e-6));
  const DualVector psi(d, oracle::random_vector(rng, d->vertex_count(), -1, 1));
  SolveOptions opts;
  opts.max_iterations = 3;
  try {
    (void)solve_T(p, psi, opts);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.report().iterations == 3);
    CHECK_FALSE(e.report().converged);
    CHECK(e.report().final_residual_norm > 0);
  }
  const DualVector wrong(build_icosphere(3, 1.0), Eigen::VectorXd::Ones(d->vertex_count()));
  CHECK_THROWS_AS(solve_T(p, wrong), DomainMismatch);
}
