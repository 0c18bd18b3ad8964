#pragma once
#include <functional>
#include <vector>

#include "sdfkit/geom/vec3.hpp"
#include "sdfkit/model/mlp.hpp"

namespace sdfkit {

struct GridBounds {
    Vec3 lo{-1.1, -1.1, -1.1};
    Vec3 hi{1.1, 1.1, 1.1};
};

// Regular scalar field samples, x-fastest. `resolution` counts samples per
// axis, so resolution 2 is just the 8 box corners and resolution R spans
// R-1 cells per axis.
struct ScalarGrid {
    int resolution = 0;
    GridBounds bounds;
    std::vector<double> values;  // resolution^3, index ix + iy*R + iz*R^2

    double spacing(int axis) const {
        return ((&bounds.hi.x)[axis] - (&bounds.lo.x)[axis]) / double(resolution - 1);
    }
    Vec3 point(int ix, int iy, int iz) const {
        auto lerp = [&](double lo, double hi, int i) {
            return lo + (hi - lo) * (double(i) / double(resolution - 1));
        };
        return {lerp(bounds.lo.x, bounds.hi.x, ix), lerp(bounds.lo.y, bounds.hi.y, iy),
                lerp(bounds.lo.z, bounds.hi.z, iz)};
    }
    double at(int ix, int iy, int iz) const {
        return values[std::size_t(ix) +
                      std::size_t(resolution) * (std::size_t(iy) + std::size_t(resolution) * iz)];
    }
};

// Fill a grid from an arbitrary field. Parallel over z-slabs; each cell is a
// pure function of its coordinates, so thread count cannot change the result.
ScalarGrid evaluate_grid(const std::function<double(const Vec3&)>& field, const GridBounds& bounds,
                         int resolution, int jobs = 1);

// Fill a grid with the decoder field f(z, x) for a fixed latent code.
ScalarGrid evaluate_grid(const MlpNetwork& net, const std::vector<float>& z,
                         const GridBounds& bounds, int resolution, int jobs = 1);

} // namespace sdfkit
