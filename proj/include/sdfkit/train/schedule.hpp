#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace sdfkit {

struct CurriculumStage {
    int epoch_begin = 0, epoch_end = 0;  // [begin, end)
    int depth = 0;                       // live affine layers during the stage
    bool residual_fade = false;          // stage fades in a freshly grown layer
    double epsilon = 0.0;
    double lambda = 0.0;
};

// Stage table driving tolerance, re-weighting and network growth. Stages tile
// [0, total_epochs) exactly; depth/lambda never decrease, epsilon never
// increases; depth steps by one exactly on residual stages.
struct CurriculumSchedule {
    std::vector<CurriculumStage> stages;
    int total_epochs = 0;

    void validate() const;  // throws std::invalid_argument
    int initial_depth() const { return stages.empty() ? 0 : stages.front().depth; }

    // containing stage plus the fade weight: alpha ramps linearly from 0 to 1
    // across a residual stage and is 1 everywhere else
    std::pair<const CurriculumStage*, double> stage_for_epoch(int epoch) const;
    int stage_index(int epoch) const;
};

// The reference seven-stage curriculum (depth 5 -> 8, epsilon 0.025 -> 0,
// lambda 0 -> 0.5), with stage lengths 10/10/10/10/10/10/40 percent of the
// epoch budget. total_epochs = 2000 reproduces the published boundaries
// (200/200/200/200/200/200/800).
CurriculumSchedule default_schedule(int total_epochs);

// Single fixed-depth stage with constant epsilon/lambda (the ablation
// baseline; epsilon = lambda = 0 reproduces plain clamped-L1 training).
CurriculumSchedule flat_schedule(int total_epochs, int depth, double epsilon, double lambda);

// Stage files use the run-config syntax:
//   total_epochs = 2000
//   [stage]
//   begin = 0
//   end = 200
//   depth = 5
//   residual = false
//   epsilon = 0.025
//   lambda = 0
CurriculumSchedule load_schedule(const std::string& path);
void save_schedule(const CurriculumSchedule& s, const std::string& path);

// Proportionally rescale stage boundaries onto a new epoch budget.
CurriculumSchedule scale_schedule(const CurriculumSchedule& s, int new_total_epochs);

} // namespace sdfkit
