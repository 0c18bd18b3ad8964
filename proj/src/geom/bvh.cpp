#include "sdfkit/geom/bvh.hpp"

#include <algorithm>
#include <cmath>

namespace sdfkit {

void Aabb::expand(const Vec3& p) {
    lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
}

void Aabb::expand(const Aabb& b) {
    expand(b.lo);
    expand(b.hi);
}

double Aabb::sqdist(const Vec3& p) const {
    double d = 0.0;
    for (int k = 0; k < 3; ++k) {
        double v = p[k];
        double l = lo[k], h = hi[k];
        if (v < l) d += (l - v) * (l - v);
        else if (v > h) d += (v - h) * (v - h);
    }
    return d;
}

// Ericson, Real-Time Collision Detection, 5.1.5.
TriClosest closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return {a, 1.0, 0.0, 0.0};

    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return {b, 0.0, 1.0, 0.0};

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double t = d1 / (d1 - d3);
        return {a + ab * t, 1.0 - t, t, 0.0};
    }

    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return {c, 0.0, 0.0, 1.0};

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double t = d2 / (d2 - d6);
        return {a + ac * t, 1.0 - t, 0.0, t};
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return {b + (c - b) * t, 0.0, 1.0 - t, t};
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return {a + ab * v + ac * w, 1.0 - v - w, v, w};
}

TriangleBvh::TriangleBvh(const TriangleMesh& mesh) : mesh_(mesh) {
    const std::uint32_t n = std::uint32_t(mesh.triangles.size());
    tri_order_.resize(n);
    std::vector<Vec3> centroids(n);
    for (std::uint32_t t = 0; t < n; ++t) {
        tri_order_[t] = t;
        centroids[t] = (mesh.corner(t, 0) + mesh.corner(t, 1) + mesh.corner(t, 2)) / 3.0;
    }
    nodes_.reserve(n > 0 ? 2 * n : 1);
    if (n > 0) build(0, n, centroids);
}

std::int32_t TriangleBvh::build(std::uint32_t first, std::uint32_t count,
                                std::vector<Vec3>& centroids) {
    Node node;
    for (std::uint32_t i = first; i < first + count; ++i) {
        const auto& t = mesh_.triangles[tri_order_[i]];
        node.box.expand(mesh_.vertices[t[0]]);
        node.box.expand(mesh_.vertices[t[1]]);
        node.box.expand(mesh_.vertices[t[2]]);
    }
    const std::int32_t idx = std::int32_t(nodes_.size());
    nodes_.push_back(node);

    if (count <= 4) {
        nodes_[idx].first = first;
        nodes_[idx].count = count;
        return idx;
    }

    // median split along the widest centroid axis
    Aabb cbox;
    for (std::uint32_t i = first; i < first + count; ++i) cbox.expand(centroids[tri_order_[i]]);
    const Vec3 ext = cbox.hi - cbox.lo;
    int axis = 0;
    if (ext.y > ext.x) axis = 1;
    if (ext.z > ext[axis]) axis = 2;

    auto mid = tri_order_.begin() + first + count / 2;
    std::nth_element(tri_order_.begin() + first, mid, tri_order_.begin() + first + count,
                     [&](std::uint32_t a, std::uint32_t b) {
                         if (centroids[a][axis] != centroids[b][axis])
                             return centroids[a][axis] < centroids[b][axis];
                         return a < b;  // deterministic tie-break
                     });

    const std::uint32_t lcount = count / 2;
    const std::int32_t l = build(first, lcount, centroids);
    const std::int32_t r = build(first + lcount, count - lcount, centroids);
    nodes_[idx].left = l;
    nodes_[idx].right = r;
    return idx;
}

TriangleBvh::Hit TriangleBvh::closest(const Vec3& p) const {
    Hit best;
    if (nodes_.empty()) return best;
    // manual stack, nearer child first
    std::int32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (node.box.sqdist(p) >= best.dist2) continue;
        if (node.left < 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const std::uint32_t t = tri_order_[i];
                const auto& tri = mesh_.triangles[t];
                const TriClosest c = closest_point_on_triangle(
                    p, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]], mesh_.vertices[tri[2]]);
                const double d2 = norm2(p - c.point);
                if (d2 < best.dist2) {
                    best.dist2 = d2;
                    best.tri = t;
                    best.point = c.point;
                    best.u = c.u;
                    best.v = c.v;
                    best.w = c.w;
                }
            }
            continue;
        }
        const double dl = nodes_[node.left].box.sqdist(p);
        const double dr = nodes_[node.right].box.sqdist(p);
        // push farther child first so the nearer one is processed next
        if (dl <= dr) {
            if (dr < best.dist2) stack[top++] = node.right;
            if (dl < best.dist2) stack[top++] = node.left;
        } else {
            if (dl < best.dist2) stack[top++] = node.left;
            if (dr < best.dist2) stack[top++] = node.right;
        }
    }
    return best;
}

double TriangleBvh::distance(const Vec3& p) const { return std::sqrt(closest(p).dist2); }

} // namespace sdfkit
