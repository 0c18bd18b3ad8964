#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "sdfkit/geom/mesh.hpp"
#include "sdfkit/geom/vec3.hpp"

namespace sdfkit {

// Symmetric chamfer between point sets: mean_a min_b ||a-b||^2 plus the same
// the other way. Pass squared = false for the absolute-distance variant
// (mean closest euclidean distance instead of squared). The nearest-neighbour
// scan is a fixed-order kernel, so the result is reproducible bit for bit and
// the two directions commute exactly.
double chamfer_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                        bool squared = true);

// Exact earth mover's distance between equal-size sets: the minimum over
// perfect matchings of the mean pairwise euclidean distance. Cost matrices
// switch from double to float storage above kEmdDoubleCostLimit points to
// keep n = 10000 within memory; the reported value is always re-accumulated
// in double over the chosen matching.
inline constexpr std::size_t kEmdDoubleCostLimit = 4096;
double earth_movers_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

// 1-based order statistic used by mesh_accuracy: ceil(0.9 n).
std::size_t ninth_decile_rank(std::size_t n);

// Unsigned point-to-surface distance at the 90th percentile: the
// ninth_decile_rank(n)-th smallest distance from the sampled points to the
// reference mesh. Needs at least 10 points.
double mesh_accuracy(const std::vector<Vec3>& points, const TriangleMesh& reference);

// Fixed evaluation recipe for reconstructed surfaces. Each metric samples
// both meshes with the same derived seed, so comparing a mesh against itself
// yields exactly zero chamfer/EMD — a cheap end-to-end sanity check.
struct EvalProtocol {
    int cd_points = 30000;
    int emd_points = 500;
    int accuracy_points = 1000;
    std::uint64_t seed = 0;
    bool squared_cd = true;

    void validate() const;
};

struct ShapeEval {
    std::string shape_id;
    double cd_raw = 0.0, emd = 0.0, mesh_acc = 0.0;
    std::uint64_t cd_seed = 0, emd_seed = 0, acc_seed = 0;
    int cd_points = 0, emd_points = 0, acc_points = 0;
    std::string error;  // empty = metrics are valid

    bool ok() const { return error.empty(); }
};

ShapeEval evaluate_reconstruction(const std::string& shape_id, const TriangleMesh& pred,
                                  const TriangleMesh& ground_truth, const EvalProtocol& proto);

// CSV report: one row per shape with raw and rescaled (x1000 chamfer, x10
// accuracy) values, the seeds and point counts that produced them, then
// mean/median aggregate rows over the shapes that evaluated cleanly. A
// non-empty `comment` becomes a leading "# ..." provenance line.
void write_eval_report(const std::string& path, const std::vector<ShapeEval>& rows,
                       const std::string& comment = "");
std::string format_eval_row(const ShapeEval& r);
std::string eval_report_header();

} // namespace sdfkit
