#include "monoiter/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <utility>

namespace monoiter {

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

double face_area(const SurfaceMesh& mesh, const Face& f) {
  const auto& p = mesh.vertices;
  return 0.5 * norm3(cross(sub(p[f[1]], p[f[0]]), sub(p[f[2]], p[f[0]])));
}

bool connected_graph(const SparseMatrix& a) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::queue<int> todo;
  todo.push(0);
  seen[0] = 1;
  int visited = 1;
  while (!todo.empty()) {
    const int i = todo.front();
    todo.pop();
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      const int j = static_cast<int>(it.col());
      if (j != i && it.value() != 0.0 && !seen[j]) {
        seen[j] = 1;
        ++visited;
        todo.push(j);
      }
    }
  }
  return visited == n;
}

}  // namespace

std::string to_string(DomainKind kind) {
  return kind == DomainKind::triangle_surface ? "triangle-surface" : "periodic-grid";
}

Operators assemble_operators(const SurfaceMesh& mesh) {
  const int n = static_cast<int>(mesh.vertices.size());
  if (n == 0 || mesh.faces.empty()) throw InputError("surface mesh has no vertices or no faces");

  std::vector<double> areas(mesh.faces.size());
  double total_area = 0.0;
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    for (int v : mesh.faces[fi])
      if (v < 0 || v >= n)
        throw AssemblyError(static_cast<int>(fi), "face " + std::to_string(fi) +
                                                      " references vertex " + std::to_string(v) +
                                                      " out of range");
    areas[fi] = face_area(mesh, mesh.faces[fi]);
    total_area += areas[fi];
  }
  const double mean_area = total_area / static_cast<double>(mesh.faces.size());

  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(mesh.faces.size() * 12);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);

  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    const double area = areas[fi];
    if (!(area > 1e-14 * mean_area))
      throw AssemblyError(static_cast<int>(fi),
                          "face " + std::to_string(fi) + " is degenerate (area " +
                              std::to_string(area) + ")");
    const double twice_area = 2.0 * area;
    for (int c = 0; c < 3; ++c) {
      const int k = f[c];
      const int i = f[(c + 1) % 3];
      const int j = f[(c + 2) % 3];
      const Vec3 ei = sub(mesh.vertices[i], mesh.vertices[k]);
      const Vec3 ej = sub(mesh.vertices[j], mesh.vertices[k]);
      // cot of the angle at k, halved: the weight of edge (i, j) from this face.
      const double w = 0.5 * dot3(ei, ej) / twice_area;
      triplets.emplace_back(i, j, -w);
      triplets.emplace_back(j, i, -w);
      triplets.emplace_back(i, i, w);
      triplets.emplace_back(j, j, w);
      mass[k] += area / 3.0;
    }
  }
  for (int v = 0; v < n; ++v)
    if (mass[v] <= 0.0)
      throw InputError("vertex " + std::to_string(v) + " is not referenced by any face");

  SparseMatrix stiffness(n, n);
  stiffness.setFromTriplets(triplets.begin(), triplets.end());
  stiffness.makeCompressed();
  return {std::move(stiffness), std::move(mass)};
}

Operators assemble_operators(std::span<const GridAxis> axes) {
  if (axes.empty() || axes.size() > 3)
    throw InputError("flat torus needs between 1 and 3 axes, got " + std::to_string(axes.size()));
  double cell_volume = 1.0;
  int n = 1;
  for (const auto& ax : axes) {
    if (ax.cells < 3)
      throw InputError("flat torus needs at least 3 cells per axis, got " +
                       std::to_string(ax.cells));
    if (!(ax.length > 0.0) || !std::isfinite(ax.length))
      throw InputError("flat torus axis length must be positive");
    cell_volume *= ax.spacing();
    n *= ax.cells;
  }

  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * (1 + 2 * axes.size()));
  std::array<int, 3> stride{1, 1, 1};
  for (std::size_t k = 1; k < axes.size(); ++k) stride[k] = stride[k - 1] * axes[k - 1].cells;

  for (int v = 0; v < n; ++v) {
    double diag = 0.0;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const int cells = axes[k].cells;
      const int ik = (v / stride[k]) % cells;
      const int up = v + ((ik + 1) % cells - ik) * stride[k];
      const int down = v + ((ik + cells - 1) % cells - ik) * stride[k];
      const double h = axes[k].spacing();
      const double w = cell_volume / (h * h);
      triplets.emplace_back(v, up, -w);
      triplets.emplace_back(v, down, -w);
      diag += 2.0 * w;
    }
    triplets.emplace_back(v, v, diag);
  }
  SparseMatrix stiffness(n, n);
  stiffness.setFromTriplets(triplets.begin(), triplets.end());
  stiffness.makeCompressed();
  return {std::move(stiffness), Eigen::VectorXd::Constant(n, cell_volume)};
}

int count_obtuse_triangles(const SurfaceMesh& mesh) {
  int count = 0;
  for (const Face& f : mesh.faces) {
    for (int c = 0; c < 3; ++c) {
      const Vec3 ei = sub(mesh.vertices[f[(c + 1) % 3]], mesh.vertices[f[c]]);
      const Vec3 ej = sub(mesh.vertices[f[(c + 2) % 3]], mesh.vertices[f[c]]);
      if (dot3(ei, ej) < -1e-12 * norm3(ei) * norm3(ej)) {
        ++count;
        break;
      }
    }
  }
  return count;
}

MeshQualityReport mesh_quality(const DiscreteDomain& domain) { return domain.quality(); }

void DiscreteDomain::finish() {
  if (declared_dimension_ < 1) throw InputError("declared dimension must be at least 1");

  MeshQualityReport q;
  if (kind_ == DomainKind::triangle_surface)
    q.obtuse_triangle_count = count_obtuse_triangles(SurfaceMesh{coordinates_, faces_});
  const SparseMatrix& l = ops_.stiffness;
  for (int i = 0; i < l.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(l, i); it; ++it) {
      if (it.col() == i) continue;
      q.max_offdiagonal = std::max(q.max_offdiagonal, it.value());
      if (it.value() > 1e-12) ++q.negative_offdiagonal_count;
    }
  }
  q.is_m_matrix_compatible = q.negative_offdiagonal_count == 0;
  quality_ = q;
  connected_ = connected_graph(l);
}

DomainPtr DiscreteDomain::from_surface(SurfaceMesh mesh, int declared_dimension) {
  std::shared_ptr<DiscreteDomain> d(new DiscreteDomain());
  d->kind_ = DomainKind::triangle_surface;
  d->ops_ = assemble_operators(mesh);
  d->coordinates_ = std::move(mesh.vertices);
  d->faces_ = std::move(mesh.faces);
  d->declared_dimension_ = declared_dimension;
  d->finish();
  return d;
}

DomainPtr DiscreteDomain::from_grid(std::vector<GridAxis> axes, int declared_dimension) {
  std::shared_ptr<DiscreteDomain> d(new DiscreteDomain());
  d->kind_ = DomainKind::periodic_grid;
  d->ops_ = assemble_operators(axes);
  const int n = static_cast<int>(d->ops_.mass.size());
  d->coordinates_.resize(n, Vec3{0.0, 0.0, 0.0});
  int stride = 1;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    for (int v = 0; v < n; ++v)
      d->coordinates_[v][k] = ((v / stride) % axes[k].cells) * axes[k].spacing();
    stride *= axes[k].cells;
  }
  d->declared_dimension_ = declared_dimension > 0 ? declared_dimension
                                                  : static_cast<int>(axes.size());
  d->axes_ = std::move(axes);
  d->finish();
  return d;
}

SurfaceMesh icosphere_mesh(int subdivisions, double radius) {
  if (subdivisions < 0 || subdivisions > 8)
    throw InputError("icosphere subdivisions must be in [0, 8], got " +
                     std::to_string(subdivisions));
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InputError("icosphere radius must be positive");

  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  SurfaceMesh mesh;
  mesh.vertices = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                   {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  auto project = [](Vec3 p) {
    const double r = norm3(p);
    return Vec3{p[0] / r, p[1] / r, p[2] / r};
  };
  for (auto& v : mesh.vertices) v = project(v);

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
      const Vec3& pa = mesh.vertices[a];
      const Vec3& pb = mesh.vertices[b];
      mesh.vertices.push_back(project({pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]}));
      const int id = static_cast<int>(mesh.vertices.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Face> refined;
    refined.reserve(mesh.faces.size() * 4);
    for (const Face& f : mesh.faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      refined.push_back({f[0], ab, ca});
      refined.push_back({f[1], bc, ab});
      refined.push_back({f[2], ca, bc});
      refined.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(refined);
  }
  for (auto& v : mesh.vertices)
    for (double& c : v) c *= radius;
  return mesh;
}

DomainPtr build_icosphere(int subdivisions, double radius, int declared_dimension) {
  return DiscreteDomain::from_surface(icosphere_mesh(subdivisions, radius), declared_dimension);
}

DomainPtr build_flat_torus(std::vector<GridAxis> dims, int declared_dimension) {
  return DiscreteDomain::from_grid(std::move(dims), declared_dimension);
}

}  // namespace monoiter
