#pragma once
#include <string>

#include "sdfkit/geom/mesh.hpp"

namespace sdfkit {

// ASCII OBJ, `v`/`f` records, 1-based indices; polygonal faces are fan
// triangulated. Unknown record types are ignored. Degenerate triangles
// (area < 1e-12) are dropped with a warning on stderr.
TriangleMesh load_obj(const std::string& path);

// `comments` lines are written with a leading "# " (OBJ) or "comment " (PLY).
void save_obj(const TriangleMesh& mesh, const std::string& path,
              const std::vector<std::string>& comments = {});

// Binary little-endian PLY, float vertices, uchar-counted int face indices.
void save_ply(const TriangleMesh& mesh, const std::string& path,
              const std::vector<std::string>& comments = {});

} // namespace sdfkit
