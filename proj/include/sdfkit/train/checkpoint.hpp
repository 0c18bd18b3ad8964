#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "sdfkit/model/mlp.hpp"
#include "sdfkit/train/adam.hpp"

namespace sdfkit {

// Everything needed to continue (or reproduce) a training run: network,
// per-shape latent codes, optimizer moments, and progress counters.
struct TrainState {
    MlpNetwork net;
    std::vector<std::string> shape_ids;          // latent bank order
    std::vector<std::vector<float>> latents;     // one code per shape
    std::vector<AdamTensor> opt_W, opt_b;        // per live layer
    std::vector<AdamTensor> opt_z;               // per shape
    std::uint32_t epochs_done = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;

    void validate() const;  // shape/moment bookkeeping consistency
};

// Versioned binary: magic "SDFCKPT1", u32 version, header (dims, growth state,
// epoch, config hash, seed), layer tensors row-major f32, per-tensor optimizer
// moments, then the latent bank with its optimizer state. Loading rejects
// unknown versions and inconsistent shapes.
void save_checkpoint(const TrainState& st, const std::string& path);
TrainState load_checkpoint(const std::string& path);

} // namespace sdfkit
