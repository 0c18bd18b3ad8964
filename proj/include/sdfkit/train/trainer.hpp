#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdfkit/data/samples.hpp"
#include "sdfkit/train/checkpoint.hpp"
#include "sdfkit/train/schedule.hpp"

namespace sdfkit {

struct TrainConfig {
    int latent_dim = 64;
    int hidden_width = 128;
    double latent_init_std = 0.01;

    int shapes_per_step = 8;
    int points_per_shape_per_step = 512;
    int points_per_shape_per_epoch = 2048;

    // 0 means "derive as N_b * 1e-5" where N_b is the number of points per
    // optimization step (capped by the shape count).
    double lr_network = 0.0;
    double lr_latent = 1e-3;
    double sigma = 1e-2;  // latent prior strength 1/sigma^2
    double delta = 0.1;   // SDF clamp bound

    std::string optimizer = "adam";  // or "sgd"
    std::uint64_t seed = 0;
    int checkpoint_every = 50;  // epochs between checkpoint rewrites
    std::uint64_t config_hash = 0;

    void validate() const;
    int batch_points(std::size_t n_shapes) const;        // N_b
    double effective_lr_network(std::size_t n_shapes) const;
};

struct TrainLogRow {
    int epoch = 0;
    int stage = 0;
    double epsilon = 0, lambda = 0, alpha = 1;
    double mean_loss = 0;
    double frac_hard = 0, frac_semi_hard = 0, frac_easy = 0;
    double wall_ms = 0;  // timing only; everything before it is deterministic
};

std::string train_log_header();
std::string format_log_row(const TrainLogRow& r);  // stable text, round-trip doubles
TrainLogRow parse_log_row(const std::string& line);

// Log line minus the trailing wall_ms column. Reproducibility checks compare
// these, since wall time is the one column that legitimately varies run-to-run.
std::string strip_timing_column(const std::string& line);

struct TrainResult {
    TrainState state;
    std::vector<TrainLogRow> log;  // rows for the epochs this call ran
};

// Run (or continue) the curriculum: per epoch, look up the stage, apply
// growth/fade transitions, then sweep every shape `points_per_shape_per_epoch
// / points_per_shape_per_step` times in shuffled chunks of `shapes_per_step`
// shapes. All randomness derives from (seed, epoch, round, shape), so a resume
// from a checkpoint replays the identical sample stream.
//
// When out_dir is non-empty, appends to out_dir/train_log.csv (truncating
// first on a fresh run) and rewrites out_dir/checkpoint.bin every
// checkpoint_every epochs and at the end.
TrainResult train(const std::vector<ShapeSamples>& shapes, const CurriculumSchedule& schedule,
                  const TrainConfig& cfg, const std::string& out_dir = "",
                  const TrainState* resume = nullptr, std::ostream* progress = nullptr);

} // namespace sdfkit
