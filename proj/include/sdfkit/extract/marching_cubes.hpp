#pragma once
#include "sdfkit/extract/grid.hpp"
#include "sdfkit/geom/mesh.hpp"

namespace sdfkit {

// Table-driven iso-surface extraction over all 256 corner sign patterns.
// Crossing vertices are placed by linear interpolation along cell edges and
// welded through global edge keys, so shared cell faces reuse identical
// vertices and the result is closed whenever the surface stays inside the
// grid. Triangles wind so their normals face the positive side of the field.
// A field that never reaches `iso` yields an empty mesh.
//
// Face-diagonal sign patterns are resolved by always keeping negative corners
// separated. The rule depends only on the shared face's corner signs, so
// neighbouring cells always agree and no cracks open.
TriangleMesh marching_cubes(const ScalarGrid& grid, double iso = 0.0);

} // namespace sdfkit
