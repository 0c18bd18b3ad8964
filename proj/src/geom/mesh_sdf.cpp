#include "sdfkit/geom/mesh_sdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sdfkit/util/rng.hpp"

namespace sdfkit {

namespace {

inline std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(a) << 32) | b;
}

inline double corner_angle(const Vec3& at, const Vec3& p1, const Vec3& p2) {
    const Vec3 u = normalized(p1 - at), v = normalized(p2 - at);
    return std::acos(std::clamp(dot(u, v), -1.0, 1.0));
}

} // namespace

MeshSdf::MeshSdf(TriangleMesh mesh, Options opt) : mesh_(std::move(mesh)) {
    mesh_.validate_indices();
    dropped_ = drop_degenerate_triangles(mesh_, opt.degenerate_area_tol);
    if (dropped_ > 0)
        std::fprintf(stderr, "MeshSdf: dropped %zu degenerate triangle(s)\n", dropped_);
    if (mesh_.triangles.empty())
        throw std::invalid_argument("MeshSdf: no non-degenerate triangles");

    watertight_ = check_watertight(mesh_);
    if (!watertight_ && !opt.force_unsigned)
        throw SignUnreliableError(
            "MeshSdf: mesh is not watertight, sign would be unreliable "
            "(use force_unsigned for unsigned queries)");

    const std::size_t nt = mesh_.triangles.size();
    face_normals_.resize(nt);
    vertex_normals_.assign(mesh_.vertices.size(), Vec3{});
    edge_normals_.reserve(nt * 3);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& tri = mesh_.triangles[t];
        const Vec3 n = normalized(mesh_.face_normal(t));
        face_normals_[t] = n;
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t a = tri[k], b = tri[(k + 1) % 3];
            edge_normals_[edge_key(a, b)] += n;
            vertex_normals_[tri[k]] +=
                n * corner_angle(mesh_.vertices[tri[k]], mesh_.vertices[tri[(k + 1) % 3]],
                                 mesh_.vertices[tri[(k + 2) % 3]]);
        }
    }
    bvh_ = std::make_unique<TriangleBvh>(mesh_);
}

double MeshSdf::unsigned_distance(const Vec3& p) const { return bvh_->distance(p); }

int MeshSdf::pseudonormal_sign(const TriangleBvh::Hit& hit, const Vec3& p) const {
    // classify the closest feature from barycentric coordinates
    constexpr double tol = 1e-12;
    const auto& tri = mesh_.triangles[hit.tri];
    const bool zu = hit.u <= tol, zv = hit.v <= tol, zw = hit.w <= tol;
    Vec3 n;
    if (zv && zw) n = vertex_normals_[tri[0]];
    else if (zu && zw) n = vertex_normals_[tri[1]];
    else if (zu && zv) n = vertex_normals_[tri[2]];
    else if (zw) n = edge_normals_.at(edge_key(tri[0], tri[1]));
    else if (zu) n = edge_normals_.at(edge_key(tri[1], tri[2]));
    else if (zv) n = edge_normals_.at(edge_key(tri[0], tri[2]));
    else n = face_normals_[hit.tri];
    return dot(p - hit.point, n) >= 0.0 ? 1 : -1;
}

double MeshSdf::signed_distance(const Vec3& p) const {
    if (!watertight_)
        throw SignUnreliableError("MeshSdf: signed query on non-watertight mesh");
    const TriangleBvh::Hit hit = bvh_->closest(p);
    const double d = std::sqrt(hit.dist2);
    if (d == 0.0) return 0.0;
    return pseudonormal_sign(hit, p) * d;
}

int MeshSdf::ray_parity_sign(const Vec3& p, std::uint64_t seed, int votes) const {
    Rng rng(derive_seed(seed, "ray_parity"));
    int inside_votes = 0, valid = 0;
    for (int attempt = 0; attempt < votes * 6 && valid < votes; ++attempt) {
        // random unit direction
        const double z = rng.uniform(-1.0, 1.0);
        const double phi = rng.uniform(0.0, 6.283185307179586);
        const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
        const Vec3 dir{rxy * std::cos(phi), rxy * std::sin(phi), z};

        int crossings = 0;
        bool grazing = false;
        for (std::size_t t = 0; t < mesh_.triangles.size() && !grazing; ++t) {
            const auto& tri = mesh_.triangles[t];
            const Vec3 a = mesh_.vertices[tri[0]];
            const Vec3 e1 = mesh_.vertices[tri[1]] - a;
            const Vec3 e2 = mesh_.vertices[tri[2]] - a;
            const Vec3 pv = cross(dir, e2);
            const double det = dot(e1, pv);
            constexpr double eps = 1e-12;
            if (std::abs(det) < eps) continue;  // parallel
            const double inv = 1.0 / det;
            const Vec3 tv = p - a;
            const double u = dot(tv, pv) * inv;
            const Vec3 qv = cross(tv, e1);
            const double v = dot(qv, dir) * inv;
            const double tt = dot(e2, qv) * inv;
            constexpr double edge_eps = 1e-9;
            if (u < -edge_eps || v < -edge_eps || u + v > 1.0 + edge_eps) continue;
            if (tt <= 0.0) continue;
            if (u < edge_eps || v < edge_eps || u + v > 1.0 - edge_eps || tt < edge_eps)
                grazing = true;  // edge/vertex graze, direction unusable
            else
                ++crossings;
        }
        if (grazing) continue;
        ++valid;
        if (crossings % 2 == 1) ++inside_votes;
    }
    if (valid == 0) return 1;  // could not find a clean ray; report outside
    return inside_votes * 2 > valid ? -1 : 1;
}

} // namespace sdfkit
