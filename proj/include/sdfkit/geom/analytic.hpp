#pragma once
#include <memory>
#include <string>
#include <vector>

#include "sdfkit/geom/vec3.hpp"

namespace sdfkit {

// Closed-form SDF primitives used as exact oracles for data generation and
// evaluation. Distances are exact for every primitive; a union is exact
// outside and on the surface, and a lower bound inside overlapping members
// (min rule) -- reconstructions must be compared against samples drawn from
// this same oracle.
struct AnalyticShape {
    enum class Kind { Sphere, Box, Torus, Capsule, Union };

    Kind kind = Kind::Sphere;
    Vec3 center;          // sphere, box, torus
    double radius = 0.0;  // sphere, capsule; minor radius for torus
    Vec3 half_extents;    // box
    double major_radius = 0.0;  // torus (axis = z through center)
    Vec3 seg_a, seg_b;          // capsule endpoints
    std::vector<AnalyticShape> members;  // union

    static AnalyticShape sphere(const Vec3& c, double r);
    static AnalyticShape box(const Vec3& c, const Vec3& half);
    static AnalyticShape torus(const Vec3& c, double major, double minor);
    static AnalyticShape capsule(const Vec3& a, const Vec3& b, double r);
    static AnalyticShape make_union(std::vector<AnalyticShape> parts);

    // Throws std::invalid_argument if any size parameter is not positive.
    void validate() const;

    std::string describe() const;  // round-trips through parse_analytic_shape
};

double signed_distance(const AnalyticShape& shape, const Vec3& p);

// Descriptor grammar (used in manifests and run configs):
//   sphere(cx,cy,cz,r)
//   box(cx,cy,cz,hx,hy,hz)
//   torus(cx,cy,cz,R,r)
//   capsule(ax,ay,az,bx,by,bz,r)
//   union(expr,expr,...)
AnalyticShape parse_analytic_shape(const std::string& text);

} // namespace sdfkit
