#pragma once
#include <cstdint>
#include <vector>

#include "sdfkit/data/samples.hpp"
#include "sdfkit/model/mlp.hpp"

namespace sdfkit {

// Test-time optimization of a single latent code against a frozen decoder.
struct InferenceConfig {
    int iterations = 800;
    double lr = 5e-3;
    int lr_drop_at = 400;         // iteration index where lr is scaled once
    double lr_drop_factor = 0.5;
    double sigma = 1e-2;          // code prior: (1/sigma^2) * |z|^2
    double delta = 0.1;           // loss clamp; epsilon/lambda default off
    double epsilon = 0.0;
    double lambda = 0.0;
    int restarts = 1;             // independent inits, best full objective wins
    int points_per_iter = 512;    // samples per gradient step; 0 = all of them
    int eval_every = 25;          // iterations between full-objective checks
    double init_std = 0.01;
    std::uint64_t seed = 0;

    void validate() const;
};

struct LatentFitResult {
    std::vector<float> z;      // best iterate seen across all restarts
    double objective = 0.0;    // full-sum objective at z
    int best_iteration = 0;    // 0 = the initial code
    int best_restart = 0;
};

// Adam on z only, decoder weights untouched. Gradients come from a
// per-iteration subsample; the kept iterate is chosen on the full objective
// (data sum plus code prior), evaluated at init, every eval_every steps and
// at the end, so the result is never worse than the initial code. Fully
// deterministic for a given (decoder, samples, config) triple.
//
// Requires a fused decoder (not mid-fade) and a non-empty sample set.
LatentFitResult estimate_latent(const MlpNetwork& net, const std::vector<SdfSample>& samples,
                                const InferenceConfig& cfg);

} // namespace sdfkit
