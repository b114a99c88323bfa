#include "monoiter/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace monoiter {

namespace {

// Next non-empty line with comments stripped; false at end of input.
bool next_record(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

[[noreturn]] void off_error(int line_no, const std::string& what) {
  throw InputError("OFF line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

SurfaceMesh read_off(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!next_record(in, line, line_no)) throw InputError("OFF: empty input");
  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != "OFF") off_error(line_no, "expected 'OFF' header");

  // Counts may share the header line.
  long nv = -1, nf = -1, ne = 0;
  if (!(header >> nv >> nf)) {
    if (!next_record(in, line, line_no)) off_error(line_no, "missing counts line");
    std::istringstream counts(line);
    if (!(counts >> nv >> nf)) off_error(line_no, "malformed counts line");
    counts >> ne;
  }
  if (nv <= 0 || nf <= 0) off_error(line_no, "vertex and face counts must be positive");

  SurfaceMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    if (!next_record(in, line, line_no)) off_error(line_no, "unexpected end of vertex list");
    std::istringstream ls(line);
    Vec3 p{};
    if (!(ls >> p[0] >> p[1] >> p[2])) off_error(line_no, "malformed vertex");
    mesh.vertices.push_back(p);
  }
  mesh.faces.reserve(static_cast<std::size_t>(nf));
  for (long i = 0; i < nf; ++i) {
    if (!next_record(in, line, line_no)) off_error(line_no, "unexpected end of face list");
    std::istringstream ls(line);
    int arity = 0;
    Face f{};
    if (!(ls >> arity)) off_error(line_no, "malformed face");
    if (arity != 3) off_error(line_no, "only triangles are supported, got a " +
                                           std::to_string(arity) + "-gon");
    if (!(ls >> f[0] >> f[1] >> f[2])) off_error(line_no, "malformed face");
    for (int v : f)
      if (v < 0 || v >= nv) off_error(line_no, "vertex index " + std::to_string(v) + " out of range");
    mesh.faces.push_back(f);
  }
  return mesh;
}

SurfaceMesh read_off_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open OFF file " + path.string());
  return read_off(in);
}

void write_off(std::ostream& out, const SurfaceMesh& mesh) {
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
  out << std::setprecision(17);
  for (const auto& p : mesh.vertices) out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

nlohmann::json domain_to_json(const DiscreteDomain& domain) {
  nlohmann::json j;
  j["kind"] = to_string(domain.kind());
  j["vertex_count"] = domain.vertex_count();
  j["declared_dimension"] = domain.declared_dimension();
  auto coords = nlohmann::json::array();
  for (const auto& p : domain.coordinates()) coords.push_back({p[0], p[1], p[2]});
  j["coordinates"] = std::move(coords);
  if (domain.kind() == DomainKind::triangle_surface) {
    auto faces = nlohmann::json::array();
    for (const auto& f : domain.faces()) faces.push_back({f[0], f[1], f[2]});
    j["faces"] = std::move(faces);
  } else {
    auto grid = nlohmann::json::array();
    for (const auto& ax : domain.axes()) grid.push_back({{"cells", ax.cells}, {"length", ax.length}});
    j["grid"] = std::move(grid);
  }
  return j;
}

}  // namespace monoiter
