#include <doctest.h>

#include <cmath>
#include <vector>

#include "sdfkit/extract/grid.hpp"
#include "sdfkit/extract/marching_cubes.hpp"
#include "sdfkit/geom/analytic.hpp"
#include "sdfkit/geom/mesh.hpp"
#include "sdfkit/geom/sampling.hpp"
#include "sdfkit/metrics/metrics.hpp"
#include "sdfkit/model/mlp.hpp"

using namespace sdfkit;

namespace {

double sphere_field(const Vec3& p, double r = 0.5) { return norm(p) - r; }

} // namespace

TEST_CASE("grid geometry bookkeeping") {
    GridBounds b;
    b.lo = {-1, -1, -1};
    b.hi = {1, 1, 1};
    ScalarGrid g = evaluate_grid([](const Vec3& p) { return p.x; }, b, 5);
    CHECK(g.resolution == 5);
    CHECK(g.values.size() == 125);
    CHECK(g.spacing(0) == doctest::Approx(0.5).epsilon(1e-15));
    Vec3 p = g.point(0, 0, 0);
    CHECK(p == Vec3{-1, -1, -1});
    p = g.point(4, 4, 4);
    CHECK(p == Vec3{1, 1, 1});
    p = g.point(2, 0, 4);
    CHECK(p == Vec3{0, -1, 1});
    CHECK(g.at(2, 0, 4) == 0.0);  // field is x itself
    CHECK(g.at(4, 2, 2) == 1.0);
    CHECK(g.at(0, 2, 2) == -1.0);
}

TEST_CASE("sphere extraction stays within a cell diagonal of the true surface") {
    GridBounds b;  // default +-1.1
    const int res = 65;  // 64 cells per axis
    ScalarGrid g = evaluate_grid([](const Vec3& p) { return sphere_field(p); }, b, res);
    TriangleMesh m = marching_cubes(g);
    REQUIRE(!m.vertices.empty());
    const double diag = std::sqrt(3.0) * 2.2 / 64.0;  // ~0.0595
    for (const Vec3& v : m.vertices) CHECK(std::fabs(norm(v) - 0.5) <= diag);
    CHECK(check_watertight(m));

    // linear interpolation actually does much better than the worst case
    double worst = 0.0;
    for (const Vec3& v : m.vertices) worst = std::max(worst, std::fabs(norm(v) - 0.5));
    CHECK(worst < diag * 0.25);
}

TEST_CASE("torus extraction is watertight") {
    AnalyticShape torus = parse_analytic_shape("torus(0,0,0,0.5,0.18)");
    ScalarGrid g = evaluate_grid([&](const Vec3& p) { return signed_distance(torus, p); },
                                 GridBounds{}, 81);
    TriangleMesh m = marching_cubes(g);
    REQUIRE(!m.triangles.empty());
    CHECK(check_watertight(m));
}

TEST_CASE("field with no crossing yields an empty mesh") {
    ScalarGrid g = evaluate_grid([](const Vec3&) { return 1.0; }, GridBounds{}, 17);
    TriangleMesh m = marching_cubes(g);
    CHECK(m.vertices.empty());
    CHECK(m.triangles.empty());

    ScalarGrid gneg = evaluate_grid([](const Vec3&) { return -1.0; }, GridBounds{}, 17);
    CHECK(marching_cubes(gneg).triangles.empty());
}

TEST_CASE("flipping the field flips orientation but not geometry") {
    ScalarGrid g = evaluate_grid([](const Vec3& p) { return sphere_field(p, 0.4); },
                                 GridBounds{}, 33);
    ScalarGrid gf = g;
    for (double& v : gf.values) v = -v;

    TriangleMesh a = marching_cubes(g);
    TriangleMesh bm = marching_cubes(gf);
    REQUIRE(a.vertices.size() == bm.vertices.size());
    REQUIRE(a.triangles.size() == bm.triangles.size());

    // same vertex positions (the crossing points do not move)
    double max_d = 0.0;
    for (std::size_t i = 0; i < a.vertices.size(); ++i)
        max_d = std::max(max_d, norm(a.vertices[i] - bm.vertices[i]));
    CHECK(max_d == 0.0);

    // outward normals: positive-field side; signed volume flips with the field
    auto signed_volume = [](const TriangleMesh& m) {
        double vol = 0.0;
        for (const auto& t : m.triangles) {
            const Vec3& p0 = m.vertices[t[0]];
            const Vec3& p1 = m.vertices[t[1]];
            const Vec3& p2 = m.vertices[t[2]];
            vol += dot(p0, cross(p1, p2)) / 6.0;
        }
        return vol;
    };
    double va = signed_volume(a);
    CHECK(va > 0.0);  // sphere SDF: negative inside, normals point outward
    CHECK(signed_volume(bm) == doctest::Approx(-va).epsilon(1e-12));
}

TEST_CASE("crossing vertices sit exactly at the linear zero") {
    // field linear in x: zero plane x = 0.3, grid chosen so no sample hits it
    GridBounds b;
    b.lo = {-1, -1, -1};
    b.hi = {1, 1, 1};
    ScalarGrid g = evaluate_grid([](const Vec3& p) { return p.x - 0.3; }, b, 9);
    TriangleMesh m = marching_cubes(g);
    REQUIRE(!m.vertices.empty());
    for (const Vec3& v : m.vertices) CHECK(std::fabs(v.x - 0.3) < 1e-12);
}

TEST_CASE("doubling the resolution roughly quarters the chamfer error") {
    AnalyticShape s = parse_analytic_shape("sphere(0,0,0,0.5)");
    auto field = [&](const Vec3& p) { return signed_distance(s, p); };

    TriangleMesh ref = marching_cubes(evaluate_grid(field, GridBounds{}, 129));
    auto pb = surface_sample(ref, 8000, 2);
    auto cd_at = [&](int res) {
        ScalarGrid g = evaluate_grid(field, GridBounds{}, res);
        TriangleMesh m = marching_cubes(g);
        auto pa = surface_sample(m, 8000, 1);
        return chamfer_distance(pa, pb);
    };
    double c33 = cd_at(33);
    double c65 = cd_at(65);
    // squared-distance metric: halving the cell size should shrink it ~4x
    CHECK(c65 < c33 * 0.6);
}

TEST_CASE("grid evaluation is independent of the thread count") {
    auto field = [](const Vec3& p) {
        return std::sin(3 * p.x) * std::cos(2 * p.y) + 0.3 * p.z - 0.1;
    };
    ScalarGrid serial = evaluate_grid(field, GridBounds{}, 49, 1);
    ScalarGrid par = evaluate_grid(field, GridBounds{}, 49, 4);
    REQUIRE(serial.values.size() == par.values.size());
    for (std::size_t i = 0; i < serial.values.size(); ++i)
        CHECK(serial.values[i] == par.values[i]);  // bitwise
}

TEST_CASE("decoder grid matches pointwise forwards") {
    MlpNetwork net = MlpNetwork::init(4, 16, 5, 70);
    std::vector<float> z(4, 0.05f);
    ScalarGrid g = evaluate_grid(net, z, GridBounds{}, 9, 2);
    for (int ix = 0; ix < 9; ix += 3)
        for (int iy = 0; iy < 9; iy += 3)
            for (int iz = 0; iz < 9; iz += 3) {
                Vec3 p = g.point(ix, iy, iz);
                float x[3] = {float(p.x), float(p.y), float(p.z)};
                CHECK(g.at(ix, iy, iz) == double(net.forward(z.data(), x)));
            }

    // all-zero weights: the whole grid is tanh(bias)
    for (auto& layer : net.layers()) {
        std::fill(layer.W.begin(), layer.W.end(), 0.0f);
        std::fill(layer.b.begin(), layer.b.end(), 0.0f);
    }
    net.layers().back().b[0] = -0.2f;
    ScalarGrid flat = evaluate_grid(net, z, GridBounds{}, 5);
    for (double v : flat.values) CHECK(v == double(std::tanh(-0.2f)));
}

TEST_CASE("resolution two samples only the corners") {
    ScalarGrid g = evaluate_grid([](const Vec3& p) { return p.x + p.y + p.z; }, GridBounds{}, 2);
    CHECK(g.values.size() == 8);
    CHECK(g.at(0, 0, 0) == doctest::Approx(-3.3).epsilon(1e-15));
    CHECK(g.at(1, 1, 1) == doctest::Approx(3.3).epsilon(1e-15));

    CHECK_THROWS_AS(evaluate_grid([](const Vec3&) { return 0.0; }, GridBounds{}, 1),
                    std::invalid_argument);
}
