#pragma once
#include <cstdint>
#include <limits>
#include <vector>

#include "sdfkit/geom/mesh.hpp"

namespace sdfkit {

struct Aabb {
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};

    void expand(const Vec3& p);
    void expand(const Aabb& b);
    double sqdist(const Vec3& p) const;
};

// point = u*a + v*b + w*c with u+v+w = 1
struct TriClosest {
    Vec3 point;
    double u = 0.0, v = 0.0, w = 0.0;
};

TriClosest closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Static BVH over mesh triangles for closest-point queries. Built once, then
// read-only; queries are safe from many threads.
class TriangleBvh {
public:
    struct Hit {
        double dist2 = std::numeric_limits<double>::infinity();
        std::uint32_t tri = 0;
        Vec3 point;
        double u = 0.0, v = 0.0, w = 0.0;
    };

    explicit TriangleBvh(const TriangleMesh& mesh);

    Hit closest(const Vec3& p) const;
    double distance(const Vec3& p) const;

private:
    struct Node {
        Aabb box;
        std::int32_t left = -1;   // internal: child indices; leaf: left == -1
        std::int32_t right = -1;
        std::uint32_t first = 0;  // leaf range into tri_order_
        std::uint32_t count = 0;
    };

    std::int32_t build(std::uint32_t first, std::uint32_t count,
                       std::vector<Vec3>& centroids);

    const TriangleMesh& mesh_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> tri_order_;
};

} // namespace sdfkit
