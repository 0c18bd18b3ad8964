#include "sdfkit/extract/marching_cubes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace sdfkit {

namespace {

// Corner c sits at ((c>>0)&1, (c>>1)&1, (c>>2)&1). Edge ids are axis-major:
// ids [4a, 4a+4) run along axis a, ordered by their lower corner.
struct CubeTables {
    int edge_a[12];                                 // corner without the axis bit
    int edge_b[12];                                 // corner with it
    int edge_axis[12];
    int edge_id[8][8];                              // -1 when not an edge
    std::array<std::vector<std::uint8_t>, 256> tris;  // edge-id triples per sign mask
};

Vec3 corner_pos(int c) { return {double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)}; }

// Builds the full 256-case triangle table by tracing, for every sign mask,
// the closed polygons the surface cuts out of the cube boundary. On each face
// every maximal run of inside corners contributes one polygon side between
// the two crossed edges that bound it; this keeps inside corners that only
// touch diagonally on separate sheets, and since the choice reads nothing but
// the face's own signs, the two cells sharing a face always cut it the same
// way. Polygons are wound so triangle normals face the positive side.
CubeTables build_tables() {
    CubeTables t;
    for (auto& row : t.edge_id)
        for (int& v : row) v = -1;
    int id = 0;
    for (int axis = 0; axis < 3; ++axis)
        for (int c = 0; c < 8; ++c) {
            if (c & (1 << axis)) continue;
            t.edge_a[id] = c;
            t.edge_b[id] = c | (1 << axis);
            t.edge_axis[id] = axis;
            t.edge_id[c][c | (1 << axis)] = id;
            t.edge_id[c | (1 << axis)][c] = id;
            ++id;
        }

    for (int mask = 0; mask < 256; ++mask) {
        const auto inside = [&](int c) { return (mask >> c) & 1; };

        int links[12][2];
        int nlinks[12] = {};
        for (int d = 0; d < 3; ++d)
            for (int s = 0; s < 2; ++s) {
                const int u = (d + 1) % 3, v = (d + 2) % 3;
                const int quad[4] = {0, 1, 3, 2};  // (u,v) gray walk: 00,10,11,01
                int c[4];
                for (int j = 0; j < 4; ++j)
                    c[j] = (s << d) | (((quad[j] >> 0) & 1) << u) | (((quad[j] >> 1) & 1) << v);
                for (int j = 0; j < 4; ++j) {
                    if (!inside(c[j]) || inside(c[(j + 3) % 4])) continue;  // run starts at j
                    int k = j;
                    while (inside(c[(k + 1) % 4])) k = (k + 1) % 4;
                    const int e_in = t.edge_id[c[(j + 3) % 4]][c[j]];
                    const int e_out = t.edge_id[c[k]][c[(k + 1) % 4]];
                    for (int e : {e_in, e_out})
                        if (nlinks[e] >= 2) throw std::logic_error("cube table: edge over-linked");
                    links[e_in][nlinks[e_in]++] = e_out;
                    links[e_out][nlinks[e_out]++] = e_in;
                }
            }

        bool cut[12], used[12] = {};
        for (int e = 0; e < 12; ++e) {
            cut[e] = inside(t.edge_a[e]) != inside(t.edge_b[e]);
            if (cut[e] && nlinks[e] != 2) throw std::logic_error("cube table: open polygon");
        }

        for (int e0 = 0; e0 < 12; ++e0) {
            if (!cut[e0] || used[e0]) continue;
            std::vector<int> poly{e0};
            used[e0] = true;
            for (int prev = -1, cur = e0;;) {
                const int nxt = links[cur][0] == prev ? links[cur][1] : links[cur][0];
                if (nxt == e0) break;
                poly.push_back(nxt);
                used[nxt] = true;
                prev = cur;
                cur = nxt;
            }
            if (poly.size() < 3) throw std::logic_error("cube table: degenerate polygon");

            std::vector<Vec3> mid(poly.size());
            Vec3 to_out{0, 0, 0};
            for (std::size_t i = 0; i < poly.size(); ++i) {
                const int a = t.edge_a[poly[i]], b = t.edge_b[poly[i]];
                mid[i] = 0.5 * (corner_pos(a) + corner_pos(b));
                const Vec3 out_minus_in = inside(a) ? corner_pos(b) - corner_pos(a)
                                                    : corner_pos(a) - corner_pos(b);
                to_out = to_out + out_minus_in;
            }
            Vec3 n{0, 0, 0};
            for (std::size_t i = 0; i < poly.size(); ++i) {
                const Vec3& p = mid[i];
                const Vec3& q = mid[(i + 1) % poly.size()];
                n.x += (p.y - q.y) * (p.z + q.z);
                n.y += (p.z - q.z) * (p.x + q.x);
                n.z += (p.x - q.x) * (p.y + q.y);
            }
            const double side = dot(n, to_out);
            if (!(std::fabs(side) > 1e-9)) throw std::logic_error("cube table: ambiguous winding");
            if (side < 0.0) std::reverse(poly.begin(), poly.end());

            for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
                t.tris[std::size_t(mask)].push_back(std::uint8_t(poly[0]));
                t.tris[std::size_t(mask)].push_back(std::uint8_t(poly[i]));
                t.tris[std::size_t(mask)].push_back(std::uint8_t(poly[i + 1]));
            }
        }
    }
    return t;
}

const CubeTables& cube_tables() {
    static const CubeTables t = build_tables();
    return t;
}

} // namespace

TriangleMesh marching_cubes(const ScalarGrid& grid, double iso) {
    const int R = grid.resolution;
    if (R < 2) throw std::invalid_argument("marching_cubes: grid resolution must be at least 2");
    if (grid.values.size() != std::size_t(R) * R * R)
        throw std::invalid_argument("marching_cubes: grid value count does not match resolution");
    if (!std::isfinite(iso)) throw std::invalid_argument("marching_cubes: iso must be finite");

    const CubeTables& tab = cube_tables();
    const std::size_t plane = std::size_t(R) * R;
    const auto gid_of = [&](int ix, int iy, int iz) {
        return std::uint64_t(ix) + std::uint64_t(R) * (std::uint64_t(iy) + std::uint64_t(R) * iz);
    };

    TriangleMesh mesh;
    std::unordered_map<std::uint64_t, std::uint32_t> weld;
    constexpr std::uint64_t kCornerKey = std::uint64_t(1) << 63;

    for (int iz = 0; iz + 1 < R; ++iz)
        for (int iy = 0; iy + 1 < R; ++iy)
            for (int ix = 0; ix + 1 < R; ++ix) {
                double v[8];
                std::uint64_t gid[8];
                int mask = 0;
                for (int c = 0; c < 8; ++c) {
                    const int cx = ix + (c & 1), cy = iy + ((c >> 1) & 1), cz = iz + ((c >> 2) & 1);
                    gid[c] = gid_of(cx, cy, cz);
                    v[c] = grid.values[std::size_t(cx) + std::size_t(R) * cy + plane * cz];
                    if (v[c] < iso) mask |= 1 << c;
                }
                const std::vector<std::uint8_t>& tris = tab.tris[std::size_t(mask)];
                if (tris.empty()) continue;

                int vert[12];
                for (int e = 0; e < 12; ++e) vert[e] = -1;
                const auto edge_vertex = [&](int e) {
                    if (vert[e] >= 0) return std::uint32_t(vert[e]);
                    const int a = tab.edge_a[e], b = tab.edge_b[e];
                    const double va = v[a], vb = v[b];
                    double tt = (iso - va) / (vb - va);
                    std::uint64_t key;
                    if (tt >= 1.0) {  // exact corner hit: weld by corner, not by edge
                        tt = 1.0;
                        key = kCornerKey | gid[b];
                    } else if (tt <= 0.0) {
                        tt = 0.0;
                        key = kCornerKey | gid[a];
                    } else {
                        key = 3 * gid[a] + std::uint64_t(tab.edge_axis[e]);
                    }
                    const auto it = weld.find(key);
                    if (it != weld.end()) {
                        vert[e] = int(it->second);
                        return it->second;
                    }
                    const auto at = [&](int c) {
                        return grid.point(ix + (c & 1), iy + ((c >> 1) & 1), iz + ((c >> 2) & 1));
                    };
                    const Vec3 pa = at(a), pb = at(b);
                    const Vec3 p = tt >= 1.0 ? pb : (tt <= 0.0 ? pa : pa + tt * (pb - pa));
                    const std::uint32_t idx = std::uint32_t(mesh.vertices.size());
                    mesh.vertices.push_back(p);
                    weld.emplace(key, idx);
                    vert[e] = int(idx);
                    return idx;
                };

                for (std::size_t i = 0; i + 2 < tris.size(); i += 3) {
                    const std::uint32_t i0 = edge_vertex(tris[i]);
                    const std::uint32_t i1 = edge_vertex(tris[i + 1]);
                    const std::uint32_t i2 = edge_vertex(tris[i + 2]);
                    if (i0 == i1 || i1 == i2 || i0 == i2) continue;  // collapsed by a corner hit
                    mesh.triangles.push_back({i0, i1, i2});
                }
            }

    return mesh;
}

} // namespace sdfkit
