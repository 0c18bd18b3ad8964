#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "sdfkit/geom/vec3.hpp"

namespace sdfkit {

// Indexed triangle surface. Intended watertight when used for signed queries;
// check_watertight() is the validator, nothing here repairs anything.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;

    bool empty() const { return triangles.empty(); }

    Vec3 vertex(std::uint32_t i) const { return vertices[i]; }
    Vec3 corner(std::size_t tri, int k) const { return vertices[triangles[tri][k]]; }

    double triangle_area(std::size_t tri) const {
        const Vec3 a = corner(tri, 0), b = corner(tri, 1), c = corner(tri, 2);
        return 0.5 * norm(cross(b - a, c - a));
    }
    Vec3 face_normal(std::size_t tri) const {  // unnormalized, 2*area length
        const Vec3 a = corner(tri, 0), b = corner(tri, 1), c = corner(tri, 2);
        return cross(b - a, c - a);
    }

    double total_area() const;
    Vec3 vertex_centroid() const;
    // Throws std::invalid_argument on out-of-range indices.
    void validate_indices() const;
};

struct NormalizeResult {
    TriangleMesh mesh;
    double scale = 1.0;  // original = normalized * scale + offset
    Vec3 offset;
};

// Center at the vertex centroid and scale so max |v - centroid| == 1.
// Throws std::invalid_argument for an empty mesh or one with zero extent.
NormalizeResult normalize_to_unit_sphere(const TriangleMesh& mesh);

// True iff every edge is shared by exactly two triangles with opposite
// direction (consistent winding), i.e. a closed orientable surface.
bool check_watertight(const TriangleMesh& mesh);

// Drops triangles with area < tol; returns how many were removed.
std::size_t drop_degenerate_triangles(TriangleMesh& mesh, double area_tol = 1e-12);

} // namespace sdfkit
