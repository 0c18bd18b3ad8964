#include "sdfkit/geom/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sdfkit/util/rng.hpp"

namespace sdfkit {

std::vector<Vec3> surface_sample(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("surface_sample: n must be >= 1");
    if (mesh.triangles.empty()) throw std::invalid_argument("surface_sample: empty mesh");

    std::vector<double> cdf(mesh.triangles.size());
    double acc = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        acc += mesh.triangle_area(t);
        cdf[t] = acc;
    }
    if (acc <= 0.0) throw std::invalid_argument("surface_sample: zero total area");

    Rng rng(seed);
    std::vector<Vec3> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = rng.uniform() * acc;
        const std::size_t t =
            std::size_t(std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
        const std::size_t ti = std::min(t, cdf.size() - 1);
        const double su = std::sqrt(rng.uniform());
        const double v = rng.uniform();
        const double ba = 1.0 - su, bb = su * (1.0 - v), bc = su * v;
        out.push_back(mesh.corner(ti, 0) * ba + mesh.corner(ti, 1) * bb + mesh.corner(ti, 2) * bc);
    }
    return out;
}

} // namespace sdfkit
