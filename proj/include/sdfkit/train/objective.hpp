#pragma once
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sdfkit/model/mlp.hpp"
#include "sdfkit/train/loss.hpp"

namespace sdfkit {

template <typename T>
struct BatchPointT {
    int shape_index = 0;
    T x[3] = {T(0), T(0), T(0)};
    T s = T(0);
};

struct LossStats {
    double sum_loss = 0.0;  // weighted curriculum loss, summed over points
    std::size_t n = 0;
    std::size_t hard = 0, semi_hard = 0, easy = 0;

    void add(SampleClass c, double loss) {
        sum_loss += loss;
        ++n;
        if (c == SampleClass::Hard)
            ++hard;
        else if (c == SampleClass::SemiHard)
            ++semi_hard;
        else
            ++easy;
    }
};

// One optimization step's worth of objective: mean curriculum loss over the
// batch plus, for every shape the batch touches, reg_share * (1/sigma^2) *
// |z_i|^2. The trainer spreads the per-epoch latent regularizer across steps
// via reg_share; tests can pass any value.
//
// Returns the scalar objective. theta_grads accumulates network gradients;
// latent_grads[i] accumulates d(objective)/d(z_i) for touched shapes (both are
// sized/zeroed here for touched entries). Gradients are exact subgradients of
// the returned scalar.
template <typename T>
T objective_batch(const MlpNetworkT<T>& net, const std::vector<std::vector<T>>& latents,
                  const std::vector<BatchPointT<T>>& batch, const LossConfigT<T>& loss_cfg,
                  T sigma, T reg_share, GradBundleT<T>& theta_grads,
                  std::vector<std::vector<T>>& latent_grads, LossStats* stats = nullptr) {
    loss_cfg.validate();
    if (!(sigma > T(0))) throw std::invalid_argument("objective: sigma must be > 0");
    if (batch.empty()) throw std::invalid_argument("objective: empty batch");

    net.size_bundle(theta_grads);
    latent_grads.resize(latents.size());

    const int L = net.latent_dim();
    std::vector<char> touched(latents.size(), 0);
    for (const BatchPointT<T>& p : batch) {
        if (p.shape_index < 0 || std::size_t(p.shape_index) >= latents.size())
            throw std::out_of_range("objective: unknown shape index " +
                                    std::to_string(p.shape_index));
        if (!touched[std::size_t(p.shape_index)]) {
            touched[std::size_t(p.shape_index)] = 1;
            latent_grads[std::size_t(p.shape_index)].assign(std::size_t(L), T(0));
        }
    }

    const T inv_n = T(1) / T(batch.size());
    TapeT<T> tape;
    T scalar = T(0);
    for (const BatchPointT<T>& p : batch) {
        const std::vector<T>& z = latents[std::size_t(p.shape_index)];
        if (int(z.size()) != L) throw std::invalid_argument("objective: latent width mismatch");
        T f = net.forward(z.data(), p.x, tape);

        T fc = clamp_sdf(f, loss_cfg.delta);
        T sc = clamp_sdf(p.s, loss_cfg.delta);
        T loss = weight_factor(fc, sc, loss_cfg.lambda) *
                 loss_tolerance(f, p.s, loss_cfg.delta, loss_cfg.epsilon);
        scalar += loss * inv_n;
        if (stats) stats->add(classify_sample(fc, sc), double(loss));

        T up = dloss_curriculum_df(f, p.s, loss_cfg) * inv_n;
        if (up != T(0)) {
            // accumulate straight into the shared theta bundle; route dz by shape
            std::vector<T>& dz = latent_grads[std::size_t(p.shape_index)];
            std::swap(theta_grads.dz, dz);
            net.backward(tape, up, theta_grads);
            std::swap(theta_grads.dz, dz);
        }
    }

    // latent regularizer, once per touched shape
    const T reg_w = reg_share / (sigma * sigma);
    for (std::size_t i = 0; i < latents.size(); ++i) {
        if (!touched[i]) continue;
        const std::vector<T>& z = latents[i];
        T zz = T(0);
        for (T v : z) zz += v * v;
        scalar += reg_w * zz;
        std::vector<T>& dz = latent_grads[i];
        for (std::size_t d = 0; d < z.size(); ++d) dz[d] += T(2) * reg_w * z[d];
    }
    return scalar;
}

} // namespace sdfkit
