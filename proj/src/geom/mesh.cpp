#include "sdfkit/geom/mesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace sdfkit {

double TriangleMesh::total_area() const {
    double a = 0.0;
    for (std::size_t t = 0; t < triangles.size(); ++t) a += triangle_area(t);
    return a;
}

Vec3 TriangleMesh::vertex_centroid() const {
    Vec3 c;
    for (const Vec3& v : vertices) c += v;
    return vertices.empty() ? c : c / double(vertices.size());
}

void TriangleMesh::validate_indices() const {
    for (const auto& t : triangles)
        for (std::uint32_t i : t)
            if (i >= vertices.size())
                throw std::invalid_argument("triangle index out of range");
}

NormalizeResult normalize_to_unit_sphere(const TriangleMesh& mesh) {
    if (mesh.vertices.empty() || mesh.triangles.empty())
        throw std::invalid_argument("normalize_to_unit_sphere: empty mesh");
    const Vec3 c = mesh.vertex_centroid();
    double maxd = 0.0;
    for (const Vec3& v : mesh.vertices) maxd = std::max(maxd, norm(v - c));
    if (maxd <= 0.0)
        throw std::invalid_argument("normalize_to_unit_sphere: zero-extent mesh");
    NormalizeResult out;
    out.scale = maxd;
    out.offset = c;
    out.mesh.triangles = mesh.triangles;
    out.mesh.vertices.reserve(mesh.vertices.size());
    for (const Vec3& v : mesh.vertices) out.mesh.vertices.push_back((v - c) / maxd);
    return out;
}

bool check_watertight(const TriangleMesh& mesh) {
    if (mesh.triangles.empty()) return false;
    // directed edge (a,b): count must be 1, and the reverse edge must also occur once
    std::unordered_map<std::uint64_t, int> count;
    count.reserve(mesh.triangles.size() * 3);
    auto key = [](std::uint32_t a, std::uint32_t b) {
        return (std::uint64_t(a) << 32) | b;
    };
    for (const auto& t : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            std::uint32_t a = t[k], b = t[(k + 1) % 3];
            if (a == b) return false;
            if (++count[key(a, b)] > 1) return false;  // repeated directed edge
        }
    }
    for (const auto& [k, n] : count) {
        (void)n;
        std::uint32_t a = std::uint32_t(k >> 32), b = std::uint32_t(k & 0xffffffffu);
        auto it = count.find(key(b, a));
        if (it == count.end()) return false;  // boundary edge
    }
    return true;
}

std::size_t drop_degenerate_triangles(TriangleMesh& mesh, double area_tol) {
    std::size_t before = mesh.triangles.size();
    std::vector<std::array<std::uint32_t, 3>> kept;
    kept.reserve(before);
    for (std::size_t t = 0; t < before; ++t)
        if (mesh.triangle_area(t) >= area_tol) kept.push_back(mesh.triangles[t]);
    mesh.triangles = std::move(kept);
    return before - mesh.triangles.size();
}

} // namespace sdfkit
