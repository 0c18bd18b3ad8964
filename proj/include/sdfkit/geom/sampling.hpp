#pragma once
#include <cstdint>
#include <vector>

#include "sdfkit/geom/mesh.hpp"

namespace sdfkit {

// Area-uniform surface samples: triangle chosen proportional to area, then
// barycentric-uniform within. Deterministic for a fixed seed.
// Throws std::invalid_argument for an empty mesh or n < 1.
std::vector<Vec3> surface_sample(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

} // namespace sdfkit
