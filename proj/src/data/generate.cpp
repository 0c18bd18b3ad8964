#include "sdfkit/data/generate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "sdfkit/extract/grid.hpp"
#include "sdfkit/extract/marching_cubes.hpp"
#include "sdfkit/geom/mesh_sdf.hpp"
#include "sdfkit/geom/sampling.hpp"
#include "sdfkit/util/hash.hpp"
#include "sdfkit/util/rng.hpp"

namespace sdfkit {

namespace {

constexpr double kDomainRadius = 1.2;   // every emitted sample stays inside this ball
constexpr double kUniformRadius = 1.1;  // filler samples are drawn from this ball

// Snap to the sample-file coordinate grid before labeling, so the stored
// label is the exact oracle value at the stored point.
Vec3 snap_f32(const Vec3& v) {
    return {double(float(v.x)), double(float(v.y)), double(float(v.z))};
}

ShapeSamples generate_core(const TriangleMesh& surface, const std::function<double(const Vec3&)>& oracle,
                           const std::string& shape_id, const std::string& source,
                           const SamplingConfig& cfg) {
    cfg.validate();
    const std::size_t K = cfg.count;
    std::size_t n1 = std::size_t(std::llround(cfg.near_fraction_1 * double(K)));
    n1 = std::min(n1, K);
    std::size_t n2 = std::size_t(std::llround(cfg.near_fraction_2 * double(K)));
    n2 = std::min(n2, K - n1);
    const std::size_t nu = K - n1 - n2;

    const std::uint64_t base = derive_seed(cfg.seed, "samples", fnv1a64(shape_id));

    ShapeSamples out;
    out.shape_id = shape_id;
    out.source = source;
    out.samples.reserve(K);

    if (n1 + n2 > 0) {
        std::vector<Vec3> surf =
            surface_sample(surface, n1 + n2, derive_seed(base, "surface"));
        Rng noise(derive_seed(base, "noise"));
        for (std::size_t i = 0; i < surf.size(); ++i) {
            const double std_dev = i < n1 ? cfg.noise_std_1 : cfg.noise_std_2;
            if (norm(surf[i]) > kDomainRadius)
                throw std::invalid_argument(
                    "generate_samples: surface extends beyond radius 1.2; normalize the shape first");
            Vec3 x;
            int tries = 0;
            do {  // redraw offsets that would leave the sampling domain
                x = snap_f32(surf[i] + Vec3{noise.normal(), noise.normal(), noise.normal()} * std_dev);
                if (++tries > 10000)
                    throw std::runtime_error("generate_samples: cannot keep samples inside radius 1.2");
            } while (norm(x) > kDomainRadius);
            out.samples.push_back({x, oracle(x)});
        }
    }

    Rng uni(derive_seed(base, "uniform"));
    for (std::size_t i = 0; i < nu; ++i) {
        Vec3 x;
        do {
            x = {uni.uniform() * 2.0 - 1.0, uni.uniform() * 2.0 - 1.0, uni.uniform() * 2.0 - 1.0};
            x = snap_f32(x * kUniformRadius);
        } while (norm(x) > kUniformRadius);
        out.samples.push_back({x, oracle(x)});
    }

    for (const SdfSample& s : out.samples)
        if (!finite(s.x) || !std::isfinite(s.s))
            throw std::runtime_error("generate_samples: non-finite sample produced");
    return out;
}

} // namespace

ShapeSamples generate_samples(const TriangleMesh& mesh, const std::string& shape_id,
                              const SamplingConfig& cfg) {
    MeshSdf sdf(mesh);  // throws SignUnreliableError for open meshes
    return generate_core(
        sdf.mesh(), [&](const Vec3& p) { return sdf.signed_distance(p); }, shape_id,
        "mesh", cfg);
}

ShapeSamples generate_samples(const AnalyticShape& shape, const std::string& shape_id,
                              const SamplingConfig& cfg) {
    shape.validate();
    cfg.validate();
    // Proxy surface for placing near-surface base points; labels stay analytic.
    GridBounds bounds;  // default [-1.1, 1.1]^3
    ScalarGrid grid = evaluate_grid(
        [&](const Vec3& p) { return signed_distance(shape, p); }, bounds, cfg.proxy_resolution, 1);
    TriangleMesh proxy = marching_cubes(grid, 0.0);
    if (proxy.vertices.empty())
        throw std::invalid_argument("generate_samples: analytic surface not found in [-1.1,1.1]^3");
    return generate_core(
        proxy, [&](const Vec3& p) { return signed_distance(shape, p); }, shape_id,
        shape.describe(), cfg);
}

PartRemoval remove_local_part(const ShapeSamples& s, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0) || !(ratio < 1.0))
        throw std::invalid_argument("remove_local_part: ratio must lie strictly between 0 and 1");
    const std::size_t K = s.samples.size();
    if (K == 0) throw std::invalid_argument("remove_local_part: empty sample set");

    Rng rng(derive_seed(seed, "part-seed", fnv1a64(s.shape_id)));
    const std::size_t seed_index = rng.index(K);
    const Vec3 c = s.samples[seed_index].x;

    // ceil(ratio*K) with a guard against 0.05*10000 = 500.0000000000001-style
    // float dust inflating the count by one.
    std::size_t m = std::size_t(std::ceil(ratio * double(K) - 1e-9));
    m = std::clamp<std::size_t>(m, 1, K);

    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double da = norm2(s.samples[a].x - c);
        double db = norm2(s.samples[b].x - c);
        if (da != db) return da < db;
        return a < b;
    });

    PartRemoval r;
    r.seed_index = seed_index;
    r.removed.assign(order.begin(), order.begin() + std::ptrdiff_t(m));
    std::vector<char> gone(K, 0);
    for (std::size_t i : r.removed) gone[i] = 1;
    r.kept.shape_id = s.shape_id;
    r.kept.source = s.source;
    r.kept.samples.reserve(K - m);
    for (std::size_t i = 0; i < K; ++i)
        if (!gone[i]) r.kept.samples.push_back(s.samples[i]);
    return r;
}

} // namespace sdfkit
