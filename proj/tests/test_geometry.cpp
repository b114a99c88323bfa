#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "monoiter/geometry.hpp"
#include "monoiter/mesh_io.hpp"
#include "monoiter/spectrum.hpp"
#include "oracles.hpp"

using namespace monoiter;

namespace {

double sphere_area_error(int s, double r) {
  return std::abs(build_icosphere(s, r)->total_volume() - 4.0 * std::numbers::pi * r * r);
}

// Triangle (0,1,2) has an obtuse angle at vertex 2; vertex 3 is the apex.
SurfaceMesh obtuse_mesh() {
  return {{{0, 0, 0}, {4, 0, 0}, {2, 0.3, 0}, {2, 3, 0}}, {{0, 1, 2}, {0, 2, 3}, {2, 1, 3}}};
}

Eigen::Vector3d vec(const Vec3& p) { return {p[0], p[1], p[2]}; }

}  // namespace

TEST_CASE("icosphere combinatorics") {
  const DomainPtr ico = build_icosphere(0, 1.0);
  CHECK(ico->vertex_count() == 12);
  CHECK(ico->faces().size() == 20);
  for (int s = 1; s <= 4; ++s) {
    const DomainPtr d = build_icosphere(s, 1.0);
    const int four_s = 1 << (2 * s);
    CHECK(d->vertex_count() == 10 * four_s + 2);
    CHECK(static_cast<int>(d->faces().size()) == 20 * four_s);
  }
  CHECK(build_icosphere(2, 1.0)->vertex_count() == 162);
  const DomainPtr big = build_icosphere(3, 2.5);
  for (const auto& p : big->coordinates())
    CHECK(std::hypot(p[0], p[1], p[2]) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_THROWS_AS(build_icosphere(-1, 1.0), InputError);
  CHECK_THROWS_AS(build_icosphere(2, 0.0), InputError);
}

TEST_CASE("sphere area converges under refinement") {
  CHECK(std::abs(build_icosphere(3, 2.0)->total_volume() - 4.0 * std::numbers::pi * 4.0) <=
        0.01 * 4.0 * std::numbers::pi * 4.0);
  CHECK(std::abs(build_icosphere(3, 1.0)->total_volume() - 4.0 * std::numbers::pi) <=
        0.01 * 4.0 * std::numbers::pi);
  const double e1 = sphere_area_error(1, 1.0), e2 = sphere_area_error(2, 1.0),
               e3 = sphere_area_error(3, 1.0);
  CHECK(e2 < e1);
  CHECK(e3 < e2);
}

TEST_CASE("flat torus masses") {
  const DomainPtr d1 = build_flat_torus({{4, 1.0}});
  CHECK(d1->vertex_count() == 4);
  for (int i = 0; i < 4; ++i) CHECK(d1->mass()[i] == doctest::Approx(0.25).epsilon(1e-15));
  const DomainPtr d3 = build_flat_torus({{8, 1.0}, {8, 1.0}, {8, 1.0}});
  CHECK(d3->vertex_count() == 512);
  CHECK(d3->total_volume() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d3->declared_dimension() == 3);
  CHECK_THROWS_AS(build_flat_torus({{2, 1.0}}), InputError);
  CHECK_THROWS_AS(build_flat_torus({{4, -1.0}}), InputError);
  CHECK_THROWS_AS(build_flat_torus({}), InputError);
}

TEST_CASE("equilateral triangle cotangent weights") {
  const double s3 = std::sqrt(3.0);
  const SurfaceMesh tri{{{0, 0, 0}, {1, 0, 0}, {0.5, s3 / 2, 0}}, {{0, 1, 2}}};
  const Operators ops = assemble_operators(tri);
  const Eigen::MatrixXd l(ops.stiffness);
  const double w = 0.288675134594813;  // cot(60 deg) / 2
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j)
        CHECK(l(i, i) == doctest::Approx(2 * w).epsilon(1e-13));
      else
        CHECK(l(i, j) == doctest::Approx(-w).epsilon(1e-13));
    }
  for (int i = 0; i < 3; ++i) CHECK(ops.mass[i] == doctest::Approx(s3 / 12).epsilon(1e-14));
}

TEST_CASE("cotangent stiffness matches the hat-gradient element matrices") {
  const SurfaceMesh mesh = icosphere_mesh(2, 1.3);
  const Operators ops = assemble_operators(mesh);
  const int n = static_cast<int>(mesh.vertices.size());
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(n, n);
  for (const auto& f : mesh.faces) {
    const Eigen::Matrix3d k =
        oracle::element_stiffness(vec(mesh.vertices[f[0]]), vec(mesh.vertices[f[1]]),
                                  vec(mesh.vertices[f[2]]));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) ref(f[i], f[j]) += k(i, j);
  }
  CHECK((Eigen::MatrixXd(ops.stiffness) - ref).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("stiffness is symmetric, annihilates constants and is positive semidefinite") {
  std::mt19937_64 rng(3);
  const std::vector<DomainPtr> domains{build_icosphere(3, 1.0), build_icosphere(2, 0.4),
                                       build_flat_torus({{8, 1.0}, {8, 1.0}, {8, 1.0}}),
                                       build_flat_torus({{5, 2.0}, {7, 0.5}}),
                                       DiscreteDomain::from_surface(obtuse_mesh())};
  for (const auto& d : domains) {
    const Eigen::MatrixXd l(d->stiffness());
    const double lmax = l.cwiseAbs().maxCoeff();
    CHECK((l - l.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d->vertex_count());
    CHECK((l * ones).cwiseAbs().maxCoeff() <= 1e-10 * lmax);
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(d->vertex_count(), 3.7);
    CHECK(std::abs(c.dot(l * c)) <= 1e-10 * lmax * c.squaredNorm());
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd u = oracle::random_vector(rng, d->vertex_count(), -1, 1);
      CHECK(u.dot(l * u) >= -1e-12 * lmax * u.squaredNorm());
    }
    CHECK(d->mass().minCoeff() > 0);
  }
}

TEST_CASE("mesh quality") {
  CHECK(build_flat_torus({{6, 1.0}, {4, 3.0}})->quality().is_m_matrix_compatible);
  CHECK(build_flat_torus({{8, 1.0}, {8, 1.0}, {8, 1.0}})->quality().is_m_matrix_compatible);
  for (int s = 0; s <= 4; ++s) {
    const DomainPtr d = build_icosphere(s, 1.0);
    CHECK(d->quality().is_m_matrix_compatible);
    CHECK(d->quality().obtuse_triangle_count == 0);
    CHECK(count_obtuse_triangles(icosphere_mesh(s, 1.0)) == 0);
  }
  const SurfaceMesh mesh = obtuse_mesh();
  const auto& v = mesh.vertices;
  // angle at vertex 2 of face (0,1,2) by direct dot product
  const double dot = (v[0][0] - v[2][0]) * (v[1][0] - v[2][0]) + (v[0][1] - v[2][1]) * (v[1][1] - v[2][1]);
  REQUIRE(dot < 0);
  const DomainPtr d = DiscreteDomain::from_surface(mesh);
  CHECK(d->quality().obtuse_triangle_count >= 1);
  CHECK(d->quality().negative_offdiagonal_count >= 1);
  CHECK_FALSE(d->quality().is_m_matrix_compatible);
  CHECK(mesh_quality(*d).obtuse_triangle_count == d->quality().obtuse_triangle_count);
}

TEST_CASE("assembly errors") {
  SurfaceMesh degenerate = obtuse_mesh();
  degenerate.vertices.push_back({1, 1, 0});
  degenerate.vertices.push_back({2, 2, 0});
  degenerate.vertices.push_back({3, 3, 0});
  degenerate.faces.push_back({4, 5, 6});
  try {
    (void)assemble_operators(degenerate);
    FAIL("degenerate face accepted");
  } catch (const AssemblyError& e) {
    CHECK(e.face() == 3);
    CHECK(std::string(e.what()).find("face 3") != std::string::npos);
  }
  SurfaceMesh bad_index = obtuse_mesh();
  bad_index.faces.push_back({0, 1, 9});
  CHECK_THROWS_AS(assemble_operators(bad_index), InputError);
  SurfaceMesh orphan = obtuse_mesh();
  orphan.vertices.push_back({9, 9, 9});
  CHECK_THROWS_AS(assemble_operators(orphan), InputError);
}

TEST_CASE("OFF reading and writing") {
  std::istringstream in(
      "# a tetrahedron\nOFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1  # apex\n\n"
      "3 0 2 1\n3 0 1 3\n3 1 2 3\n3 0 3 2\n");
  const SurfaceMesh m = read_off(in);
  CHECK(m.vertices.size() == 4);
  CHECK(m.faces.size() == 4);
  CHECK(m.vertices[3][2] == 1.0);

  std::ostringstream out;
  write_off(out, icosphere_mesh(1, 1.0));
  std::istringstream back(out.str());
  const SurfaceMesh again = read_off(back);
  CHECK(again.vertices == icosphere_mesh(1, 1.0).vertices);
  CHECK(again.faces == icosphere_mesh(1, 1.0).faces);

  auto parse = [](const std::string& text) {
    std::istringstream s(text);
    return read_off(s);
  };
  CHECK_THROWS_AS(parse(""), InputError);
  CHECK_THROWS_AS(parse("PLY\n3 1 0\n"), InputError);
  CHECK_THROWS_AS(parse("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0\n"), InputError);
  CHECK_THROWS_AS(parse("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 3\n"), InputError);
  CHECK_THROWS_AS(parse("OFF\n3 1 0\n0 0 0\n1 0\n"), InputError);
  try {
    parse("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 6") != std::string::npos);
  }
  CHECK(parse("OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n").faces.size() == 1);
}

TEST_CASE("domain JSON export") {
  const auto j = domain_to_json(*build_icosphere(1, 1.0));
  CHECK(j["kind"] == "triangle-surface");
  CHECK(j["vertex_count"] == 42);
  CHECK(j["coordinates"].size() == 42);
  CHECK(j["faces"].size() == 80);
  CHECK_FALSE(j.contains("grid"));
  const auto g = domain_to_json(*build_flat_torus({{4, 1.0}, {5, 2.0}}));
  CHECK(g["kind"] == "periodic-grid");
  CHECK(g["vertex_count"] == 20);
  CHECK(g["grid"][1]["cells"] == 5);
  CHECK(g["grid"][1]["length"] == 2.0);
  CHECK_FALSE(g.contains("faces"));
}

TEST_CASE("connectivity") {
  CHECK(build_icosphere(2, 1.0)->is_connected());
  CHECK(build_flat_torus({{3, 1.0}, {3, 1.0}})->is_connected());
  SurfaceMesh two = icosphere_mesh(0, 1.0);
  const SurfaceMesh other = icosphere_mesh(0, 1.0);
  for (auto p : other.vertices) two.vertices.push_back({p[0] + 5, p[1], p[2]});
  for (auto f : other.faces) two.faces.push_back({f[0] + 12, f[1] + 12, f[2] + 12});
  CHECK_FALSE(DiscreteDomain::from_surface(two)->is_connected());
}

TEST_CASE("spectrum against a dense generalized eigensolve") {
  for (const DomainPtr& d : {build_icosphere(2, 1.0), build_flat_torus({{9, 2.0}, {7, 1.0}})}) {
    const Eigen::VectorXd ref = oracle::generalized_eigenvalues(*d);
    SpectrumOptions dense;
    SpectrumOptions iterative;
    iterative.dense_limit = 0;
    const auto a = smallest_eigenvalues(d, 6, dense);
    const auto b = smallest_eigenvalues(d, 6, iterative);
    REQUIRE(a.size() == 6);
    REQUIRE(b.size() == 6);
    for (int i = 0; i < 6; ++i) {
      CHECK(a[i] == doctest::Approx(ref[i]).epsilon(1e-9).scale(1.0));
      CHECK(b[i] == doctest::Approx(ref[i]).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("spectrum of the unit sphere and the 2 pi torus") {
  const auto s = smallest_eigenvalues(build_icosphere(4, 1.0), 4);
  CHECK(std::abs(s[0]) <= 1e-8);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(s[i] - 2.0) <= 0.05 * 2.0);
  const auto s3 = smallest_eigenvalues(build_icosphere(3, 1.0), 4);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(s3[i] - 2.0) <= 0.05 * 2.0);

  const DomainPtr torus = build_flat_torus({{16, 6.2832}, {16, 6.2832}});
  const auto t = smallest_eigenvalues(torus, 5);
  CHECK(std::abs(t[0]) <= 1e-8);
  for (int i = 1; i < 5; ++i) CHECK(std::abs(t[i] - 1.0) <= 0.02);
  // the first nonzero FD eigenvalue is (4/h^2) sin^2(h/2), h = 6.2832/16
  CHECK(t[1] == doctest::Approx(0.9872102137074341).epsilon(1e-9));

  for (const DomainPtr& d : {build_icosphere(1, 3.0), build_flat_torus({{5, 1.0}})})
    CHECK(std::abs(smallest_eigenvalues(d, 1)[0]) <= 1e-8);
  CHECK_THROWS_AS(smallest_eigenvalues(torus, 0), InputError);
  CHECK_THROWS_AS(smallest_eigenvalues(build_flat_torus({{4, 1.0}}), 5), InputError);
}
