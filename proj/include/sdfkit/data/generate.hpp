#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "sdfkit/data/samples.hpp"
#include "sdfkit/geom/analytic.hpp"
#include "sdfkit/geom/mesh.hpp"

namespace sdfkit {

// Draw cfg.count labeled points for one shape: two near-surface bands
// (surface samples plus isotropic Gaussian offsets) and a uniform filler in
// the radius-1.1 ball. Labels come from the exact oracle for the shape kind.
//
// The mesh overload builds a watertight signed-distance oracle and throws
// SignUnreliableError for open meshes. The analytic overload samples surface
// base points from an iso-surface proxy mesh (cfg.proxy_resolution) but labels
// every point with the closed-form distance.
ShapeSamples generate_samples(const TriangleMesh& mesh, const std::string& shape_id,
                              const SamplingConfig& cfg);
ShapeSamples generate_samples(const AnalyticShape& shape, const std::string& shape_id,
                              const SamplingConfig& cfg);

struct PartRemoval {
    ShapeSamples kept;                 // surviving samples, original order
    std::vector<std::size_t> removed;  // removed indices, nearest-to-seed first
    std::size_t seed_index = 0;
};

// Pick one sample uniformly at random and delete the ceil(ratio * K) samples
// nearest to it (itself included). Ties break on the lower index, so the
// removed set is a deterministic function of (samples, ratio, seed).
PartRemoval remove_local_part(const ShapeSamples& s, double ratio, std::uint64_t seed);

} // namespace sdfkit
