#include "sdfkit/infer/latent_fit.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sdfkit/train/adam.hpp"
#include "sdfkit/train/loss.hpp"
#include "sdfkit/util/rng.hpp"

namespace sdfkit {

void InferenceConfig::validate() const {
    if (iterations < 1) throw std::invalid_argument("inference: iterations must be >= 1");
    if (!(lr >= 0.0) || !std::isfinite(lr))
        throw std::invalid_argument("inference: lr must be finite and >= 0");
    if (lr_drop_at < 0) throw std::invalid_argument("inference: lr_drop_at must be >= 0");
    if (!(lr_drop_factor > 0.0 && lr_drop_factor <= 1.0))
        throw std::invalid_argument("inference: lr_drop_factor must lie in (0, 1]");
    if (!(sigma > 0.0)) throw std::invalid_argument("inference: sigma must be positive");
    LossConfigT<double> lc{delta, epsilon, lambda};
    lc.validate();
    if (restarts < 1) throw std::invalid_argument("inference: restarts must be >= 1");
    if (points_per_iter < 0)
        throw std::invalid_argument("inference: points_per_iter must be >= 0");
    if (eval_every < 1) throw std::invalid_argument("inference: eval_every must be >= 1");
    if (!(init_std >= 0.0)) throw std::invalid_argument("inference: init_std must be >= 0");
}

namespace {

double full_objective(const MlpNetwork& net, const std::vector<float>& z,
                      const std::vector<std::array<float, 4>>& pts,
                      const LossConfigT<float>& lcfg, double sigma, MlpNetwork::Tape& tape) {
    double data = 0.0;
    for (const auto& p : pts) {
        const float f = net.forward(z.data(), p.data(), tape);
        data += double(loss_curriculum(f, p[3], lcfg));
    }
    double zz = 0.0;
    for (float v : z) zz += double(v) * double(v);
    return data + zz / (sigma * sigma);
}

} // namespace

LatentFitResult estimate_latent(const MlpNetwork& net, const std::vector<SdfSample>& samples,
                                const InferenceConfig& cfg) {
    cfg.validate();
    if (net.growth().fading)
        throw std::logic_error("estimate_latent: decoder is mid-growth; fuse it first");
    if (samples.empty()) throw std::invalid_argument("estimate_latent: no samples to fit against");

    std::vector<std::array<float, 4>> pts(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const SdfSample& s = samples[i];
        pts[i] = {float(s.x.x), float(s.x.y), float(s.x.z), float(s.s)};
    }

    LossConfigT<float> lcfg{float(cfg.delta), float(cfg.epsilon), float(cfg.lambda)};
    const int dim = net.latent_dim();
    const std::size_t K = pts.size();
    const bool subsample = cfg.points_per_iter > 0 && std::size_t(cfg.points_per_iter) < K;
    const std::size_t batch_n = subsample ? std::size_t(cfg.points_per_iter) : K;
    // prior gradient scaled to the per-point mean objective J/K
    const float reg_g = float(2.0 / (double(K) * cfg.sigma * cfg.sigma));

    LatentFitResult best;
    best.objective = std::numeric_limits<double>::infinity();

    MlpNetwork::Tape tape;
    MlpNetwork::GradBundle grads;
    std::vector<float> z(std::size_t(dim), 0.0f);
    std::vector<float> dz(std::size_t(dim), 0.0f);

    for (int r = 0; r < cfg.restarts; ++r) {
        {
            Rng init_rng(derive_seed(cfg.seed, "restart", std::uint64_t(r)));
            for (float& v : z) v = float(init_rng.normal() * cfg.init_std);
        }
        AdamTensor opt;

        const auto consider = [&](int iteration) {
            const double J = full_objective(net, z, pts, lcfg, cfg.sigma, tape);
            if (J < best.objective) {
                best.objective = J;
                best.z = z;
                best.best_iteration = iteration;
                best.best_restart = r;
            }
        };
        consider(0);

        for (int it = 0; it < cfg.iterations; ++it) {
            std::fill(dz.begin(), dz.end(), 0.0f);
            grads.dz.assign(std::size_t(dim), 0.0f);

            Rng pick(derive_seed(cfg.seed, "fit-points", std::uint64_t(r), std::uint64_t(it)));
            const float inv_n = 1.0f / float(batch_n);
            for (std::size_t j = 0; j < batch_n; ++j) {
                const auto& p = subsample ? pts[pick.index(K)] : pts[j];
                const float f = net.forward(z.data(), p.data(), tape);
                const float up = dloss_curriculum_df(f, p[3], lcfg) * inv_n;
                if (up != 0.0f) net.backward_z(tape, up, grads);
            }
            for (int i = 0; i < dim; ++i) dz[std::size_t(i)] = grads.dz[std::size_t(i)] + reg_g * z[std::size_t(i)];

            const double lr = it >= cfg.lr_drop_at ? cfg.lr * cfg.lr_drop_factor : cfg.lr;
            adam_step(z.data(), dz.data(), z.size(), opt, float(lr));

            if ((it + 1) % cfg.eval_every == 0 || it + 1 == cfg.iterations) consider(it + 1);
        }
    }
    return best;
}

} // namespace sdfkit
