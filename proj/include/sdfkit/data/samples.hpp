#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "sdfkit/geom/vec3.hpp"

namespace sdfkit {

// One (point, signed distance) training pair. The generator snaps x to the
// f32 grid used by the sample file format, then labels at the snapped point,
// so coordinates survive a file round trip bit-for-bit and in-memory labels
// are the exact oracle values at the stored coordinates.
struct SdfSample {
    Vec3 x;
    double s = 0.0;
};

struct ShapeSamples {
    std::string shape_id;
    std::string source;  // descriptor: "sphere(...)" / "union(...)" / "mesh <path>"
    std::vector<SdfSample> samples;

    std::size_t size() const { return samples.size(); }
};

struct SamplingConfig {
    std::size_t count = 20000;       // K, samples per shape
    double near_fraction_1 = 0.45;   // surface + N(0, noise_std_1^2) offsets
    double near_fraction_2 = 0.45;   // surface + N(0, noise_std_2^2) offsets
    double uniform_fraction = 0.10;  // uniform in the radius-1.1 ball
    double noise_std_1 = 0.05;
    double noise_std_2 = 0.005;
    std::uint64_t seed = 0;
    int proxy_resolution = 96;  // iso-surface grid used to sample analytic surfaces

    void validate() const;  // throws std::invalid_argument
};

// Little-endian binary: magic "SDFSAMP1", u32 count, count x (f32 x,y,z,s).
// Values already representable in f32 round-trip bit-exactly; labels lose
// their sub-f32 tail on save.
void save_samples(const ShapeSamples& s, const std::string& path);
ShapeSamples load_samples(const std::string& path);  // parse errors carry the byte offset

// Plain-text "x y z s" lines (full precision), for eyeballing and plotting.
void save_samples_text(const ShapeSamples& s, const std::string& path);

} // namespace sdfkit
