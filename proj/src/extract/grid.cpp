#include "sdfkit/extract/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "sdfkit/util/thread_pool.hpp"

namespace sdfkit {

namespace {

void check_grid_args(const GridBounds& bounds, int resolution) {
    if (resolution < 2) throw std::invalid_argument("grid resolution must be at least 2");
    for (int a = 0; a < 3; ++a) {
        double lo = (&bounds.lo.x)[a], hi = (&bounds.hi.x)[a];
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
            throw std::invalid_argument("grid bounds must be finite with lo < hi");
    }
}

} // namespace

ScalarGrid evaluate_grid(const std::function<double(const Vec3&)>& field, const GridBounds& bounds,
                         int resolution, int jobs) {
    check_grid_args(bounds, resolution);
    ScalarGrid grid;
    grid.resolution = resolution;
    grid.bounds = bounds;
    grid.values.resize(std::size_t(resolution) * resolution * resolution);

    const std::size_t plane = std::size_t(resolution) * resolution;
    ThreadPool pool(jobs < 1 ? 0u : unsigned(jobs));
    pool.parallel_for(std::size_t(resolution), [&](std::size_t iz) {
        std::size_t base = plane * iz;
        for (int iy = 0; iy < resolution; ++iy)
            for (int ix = 0; ix < resolution; ++ix)
                grid.values[base + std::size_t(iy) * resolution + ix] =
                    field(grid.point(ix, iy, int(iz)));
    });

    for (double v : grid.values)
        if (!std::isfinite(v)) throw std::runtime_error("field produced a non-finite grid value");
    return grid;
}

ScalarGrid evaluate_grid(const MlpNetwork& net, const std::vector<float>& z,
                         const GridBounds& bounds, int resolution, int jobs) {
    check_grid_args(bounds, resolution);
    if (int(z.size()) != net.latent_dim())
        throw std::invalid_argument("latent size does not match the network");

    ScalarGrid grid;
    grid.resolution = resolution;
    grid.bounds = bounds;
    grid.values.resize(std::size_t(resolution) * resolution * resolution);

    const std::size_t plane = std::size_t(resolution) * resolution;
    ThreadPool pool(jobs < 1 ? 0u : unsigned(jobs));
    pool.parallel_for(std::size_t(resolution), [&](std::size_t iz) {
        MlpNetwork::Tape tape;  // per-slab scratch; values depend only on (z, x)
        for (int iy = 0; iy < resolution; ++iy)
            for (int ix = 0; ix < resolution; ++ix) {
                Vec3 p = grid.point(ix, iy, int(iz));
                float x[3] = {float(p.x), float(p.y), float(p.z)};
                grid.values[plane * iz + std::size_t(iy) * resolution + ix] =
                    double(net.forward(z.data(), x, tape));
            }
    });
    return grid;
}

} // namespace sdfkit
