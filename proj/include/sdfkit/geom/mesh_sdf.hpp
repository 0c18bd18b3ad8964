#pragma once
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "sdfkit/geom/bvh.hpp"
#include "sdfkit/geom/mesh.hpp"

namespace sdfkit {

// Raised when signed queries are requested on a mesh whose inside cannot be
// trusted (non-watertight). Callers may retry with force_unsigned.
class SignUnreliableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Signed distance oracle for a watertight triangle mesh. Magnitude comes from
// the BVH closest-point query; the sign from the angle-weighted pseudonormal
// of the closest feature (face, edge or vertex). Immutable after construction.
class MeshSdf {
public:
    struct Options {
        bool force_unsigned = false;  // skip the watertight gate, signed() then throws
        double degenerate_area_tol = 1e-12;
    };

    explicit MeshSdf(TriangleMesh mesh) : MeshSdf(std::move(mesh), Options()) {}
    MeshSdf(TriangleMesh mesh, Options opt);

    bool watertight() const { return watertight_; }
    const TriangleMesh& mesh() const { return mesh_; }
    std::size_t dropped_degenerate() const { return dropped_; }

    double signed_distance(const Vec3& p) const;    // throws SignUnreliableError if unsigned-only
    double unsigned_distance(const Vec3& p) const;

    // Independent inside test: parity of ray crossings, majority over `votes`
    // random directions. Used as a cross-check on the pseudonormal sign.
    // Returns +1 outside, -1 inside.
    int ray_parity_sign(const Vec3& p, std::uint64_t seed, int votes = 5) const;

private:
    int pseudonormal_sign(const TriangleBvh::Hit& hit, const Vec3& p) const;

    TriangleMesh mesh_;
    std::unique_ptr<TriangleBvh> bvh_;
    std::vector<Vec3> face_normals_;    // unit
    std::vector<Vec3> vertex_normals_;  // angle-weighted sums, unnormalized
    std::unordered_map<std::uint64_t, Vec3> edge_normals_;
    bool watertight_ = false;
    std::size_t dropped_ = 0;
};

} // namespace sdfkit
