#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "monoiter/errors.hpp"
#include "monoiter/kernels.hpp"

namespace monoiter {

using Vec3 = std::array<double, 3>;
using Face = std::array<int, 3>;

enum class DomainKind { triangle_surface, periodic_grid };

std::string to_string(DomainKind kind);

struct GridAxis {
  int cells = 0;
  double length = 0.0;

  [[nodiscard]] double spacing() const { return length / cells; }
};

struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
};

/// Stiffness L (the discrete Dirichlet form, u^T L u ~ int |grad u|^2) and the
/// lumped mass diagonal M (the discrete volume form).
struct Operators {
  SparseMatrix stiffness;
  Eigen::VectorXd mass;
};

/// Thrown when a triangle is too small to carry a cotangent weight.
class AssemblyError : public InputError {
 public:
  AssemblyError(int face, const std::string& what) : InputError(what), face_(face) {}
  [[nodiscard]] int face() const { return face_; }

 private:
  int face_;
};

/// Linear FEM with cotangent weights and barycentric mass lumping. A face is
/// rejected as degenerate when its area is <= 1e-14 times the mean face area.
Operators assemble_operators(const SurfaceMesh& mesh);

/// Second-order periodic finite differences. Per axis k the edge weight is
/// cell_volume / h_k^2 and every vertex carries mass cell_volume = prod h_k;
/// with equal spacing this is the (2d)-point Laplacian scaled by h^(d-2).
Operators assemble_operators(std::span<const GridAxis> axes);

struct MeshQualityReport {
  int obtuse_triangle_count = 0;
  /// Off-diagonal stiffness entries that are positive (> 1e-12); each one
  /// breaks the sign pattern of an M-matrix.
  int negative_offdiagonal_count = 0;
  double max_offdiagonal = 0.0;
  bool is_m_matrix_compatible = true;
};

/// A discretized compact manifold with its assembled operators. Immutable once
/// built; shared between fields through DomainPtr.
class DiscreteDomain {
 public:
  static std::shared_ptr<const DiscreteDomain> from_surface(SurfaceMesh mesh,
                                                            int declared_dimension = 2);
  static std::shared_ptr<const DiscreteDomain> from_grid(std::vector<GridAxis> axes,
                                                         int declared_dimension = 0);

  [[nodiscard]] DomainKind kind() const { return kind_; }
  [[nodiscard]] int vertex_count() const { return static_cast<int>(coordinates_.size()); }
  [[nodiscard]] const std::vector<Vec3>& coordinates() const { return coordinates_; }
  [[nodiscard]] const std::vector<Face>& faces() const { return faces_; }
  [[nodiscard]] const std::vector<GridAxis>& axes() const { return axes_; }
  [[nodiscard]] int declared_dimension() const { return declared_dimension_; }

  [[nodiscard]] const SparseMatrix& stiffness() const { return ops_.stiffness; }
  [[nodiscard]] const Eigen::VectorXd& mass() const { return ops_.mass; }
  [[nodiscard]] CsrView stiffness_view() const { return csr_view(ops_.stiffness); }
  [[nodiscard]] double total_volume() const { return ops_.mass.sum(); }

  [[nodiscard]] const MeshQualityReport& quality() const { return quality_; }
  /// Whether the stiffness sparsity graph is connected.
  [[nodiscard]] bool is_connected() const { return connected_; }

 private:
  DiscreteDomain() = default;
  void finish();

  DomainKind kind_ = DomainKind::triangle_surface;
  std::vector<Vec3> coordinates_;
  std::vector<Face> faces_;
  std::vector<GridAxis> axes_;
  int declared_dimension_ = 0;
  Operators ops_;
  MeshQualityReport quality_;
  bool connected_ = false;
};

using DomainPtr = std::shared_ptr<const DiscreteDomain>;

/// Geodesic sphere: the icosahedron refined `subdivisions` times by edge
/// midpoints, every vertex pushed back onto the sphere. 10*4^s + 2 vertices.
SurfaceMesh icosphere_mesh(int subdivisions, double radius);
DomainPtr build_icosphere(int subdivisions, double radius, int declared_dimension = 2);

/// Periodic grid with 1 to 3 axes, each with at least 3 cells. A declared
/// dimension of 0 means "number of axes".
DomainPtr build_flat_torus(std::vector<GridAxis> dims, int declared_dimension = 0);

MeshQualityReport mesh_quality(const DiscreteDomain& domain);

/// Number of triangles with an interior angle above 90 degrees.
int count_obtuse_triangles(const SurfaceMesh& mesh);

}  // namespace monoiter
