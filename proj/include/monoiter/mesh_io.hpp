#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "monoiter/geometry.hpp"

namespace monoiter {

/// ASCII OFF: an "OFF" header, a "V F E" counts line, V vertex lines and F
/// face lines ("3 i j k"). Blank lines and '#' comments are skipped. Only
/// triangles are accepted.
SurfaceMesh read_off(std::istream& in);
SurfaceMesh read_off_file(const std::filesystem::path& path);
void write_off(std::ostream& out, const SurfaceMesh& mesh);

/// {kind, vertex_count, declared_dimension, coordinates, faces | grid}
nlohmann::json domain_to_json(const DiscreteDomain& domain);

}  // namespace monoiter
