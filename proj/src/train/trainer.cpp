#include "sdfkit/train/trainer.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sdfkit/train/objective.hpp"
#include "sdfkit/util/hash.hpp"
#include "sdfkit/util/ini.hpp"
#include "sdfkit/util/rng.hpp"

namespace sdfkit {

void TrainConfig::validate() const {
    if (latent_dim < 1 || hidden_width < 1)
        throw std::invalid_argument("train: latent_dim and hidden_width must be >= 1");
    if (shapes_per_step < 1 || points_per_shape_per_step < 1)
        throw std::invalid_argument("train: batch policy counts must be >= 1");
    if (points_per_shape_per_epoch < points_per_shape_per_step)
        throw std::invalid_argument(
            "train: points_per_shape_per_epoch must be >= points_per_shape_per_step");
    if (lr_network < 0.0 || !(lr_latent > 0.0))
        throw std::invalid_argument("train: learning rates must be positive (lr_network 0 = derive)");
    if (!(sigma > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("train: sigma and delta must be positive");
    if (optimizer != "adam" && optimizer != "sgd")
        throw std::invalid_argument("train: optimizer must be 'adam' or 'sgd'");
    if (latent_init_std <= 0.0)
        throw std::invalid_argument("train: latent_init_std must be positive");
    if (checkpoint_every < 1) throw std::invalid_argument("train: checkpoint_every must be >= 1");
}

int TrainConfig::batch_points(std::size_t n_shapes) const {
    std::size_t per_step = std::min<std::size_t>(std::size_t(shapes_per_step), n_shapes);
    return int(per_step) * points_per_shape_per_step;
}

double TrainConfig::effective_lr_network(std::size_t n_shapes) const {
    return lr_network > 0.0 ? lr_network : double(batch_points(n_shapes)) * 1e-5;
}

std::string train_log_header() {
    return "epoch,stage,epsilon,lambda,alpha,mean_loss,frac_hard,frac_semi_hard,frac_easy,wall_ms";
}

std::string format_log_row(const TrainLogRow& r) {
    std::string s = std::to_string(r.epoch) + "," + std::to_string(r.stage);
    for (double v : {r.epsilon, r.lambda, r.alpha, r.mean_loss, r.frac_hard, r.frac_semi_hard,
                     r.frac_easy, r.wall_ms})
        s += "," + format_double(v);
    return s;
}

TrainLogRow parse_log_row(const std::string& line) {
    std::vector<std::string> parts;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) parts.push_back(tok);
    if (parts.size() != 10) throw std::runtime_error("train log: expected 10 columns: " + line);
    TrainLogRow r;
    r.epoch = int(parse_int(parts[0], "epoch"));
    r.stage = int(parse_int(parts[1], "stage"));
    r.epsilon = parse_double(parts[2], "epsilon");
    r.lambda = parse_double(parts[3], "lambda");
    r.alpha = parse_double(parts[4], "alpha");
    r.mean_loss = parse_double(parts[5], "mean_loss");
    r.frac_hard = parse_double(parts[6], "frac_hard");
    r.frac_semi_hard = parse_double(parts[7], "frac_semi_hard");
    r.frac_easy = parse_double(parts[8], "frac_easy");
    r.wall_ms = parse_double(parts[9], "wall_ms");
    return r;
}

std::string strip_timing_column(const std::string& line) {
    const std::size_t pos = line.rfind(',');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

namespace {

// samples flattened to f32 once so the hot loop never touches doubles
struct ShapeCache {
    std::vector<std::array<float, 4>> pts;  // x, y, z, s
};

void apply_growth_transitions(TrainState& st, const CurriculumStage& stage, double alpha,
                              std::uint64_t seed, int epoch) {
    MlpNetwork& net = st.net;
    // a fade that ran to the end of its stage fuses on the first epoch after it
    if (net.growth().fading && (!stage.residual_fade || stage.depth > net.depth()))
        net.set_alpha(1.0);
    if (stage.depth > net.depth()) {
        if (stage.depth != net.depth() + 1)
            throw std::logic_error("train: schedule asks for depth " + std::to_string(stage.depth) +
                                   " but network is at " + std::to_string(net.depth()));
        net.grow(derive_seed(seed, "grow-epoch", std::uint64_t(epoch)));
        // fresh optimizer slots for the inserted layer (position depth-2)
        std::size_t pos = std::size_t(net.depth()) - 2;
        st.opt_W.insert(st.opt_W.begin() + std::ptrdiff_t(pos), AdamTensor{});
        st.opt_b.insert(st.opt_b.begin() + std::ptrdiff_t(pos), AdamTensor{});
    }
    if (net.growth().fading)
        net.set_alpha(alpha);
    else if (alpha != 1.0)
        throw std::logic_error("train: schedule wants a fade but no layer is fading");
}

} // namespace

TrainResult train(const std::vector<ShapeSamples>& shapes, const CurriculumSchedule& schedule,
                  const TrainConfig& cfg, const std::string& out_dir, const TrainState* resume,
                  std::ostream* progress) {
    cfg.validate();
    schedule.validate();
    if (shapes.empty()) throw std::invalid_argument("train: empty dataset");
    for (const ShapeSamples& s : shapes)
        if (s.samples.empty())
            throw std::invalid_argument("train: shape '" + s.shape_id + "' has no samples");

    const std::size_t N = shapes.size();
    const int rounds = (cfg.points_per_shape_per_epoch + cfg.points_per_shape_per_step - 1) /
                       cfg.points_per_shape_per_step;
    const float lr_net = float(cfg.effective_lr_network(N));
    const float lr_lat = float(cfg.lr_latent);
    const bool use_adam = cfg.optimizer == "adam";

    TrainResult res;
    TrainState& st = res.state;
    if (resume) {
        st = *resume;
        st.validate();
        if (st.shape_ids.size() != N)
            throw std::invalid_argument("train resume: dataset shape count changed");
        for (std::size_t i = 0; i < N; ++i)
            if (st.shape_ids[i] != shapes[i].shape_id)
                throw std::invalid_argument("train resume: dataset order changed at '" +
                                            shapes[i].shape_id + "'");
        if (st.epochs_done >= std::uint32_t(schedule.total_epochs))
            throw std::invalid_argument("train resume: checkpoint is already past total_epochs");
        const CurriculumStage* stage = schedule.stage_for_epoch(int(st.epochs_done)).first;
        bool depth_ok = st.net.depth() == stage->depth ||
                        (stage->residual_fade && int(st.epochs_done) == stage->epoch_begin &&
                         st.net.depth() + 1 == stage->depth);
        if (!depth_ok)
            throw std::invalid_argument("train resume: network depth does not match the schedule");
    } else {
        st.net = MlpNetwork::init(cfg.latent_dim, cfg.hidden_width, schedule.initial_depth(),
                                  derive_seed(cfg.seed, "net"));
        st.latents = make_latent_codes(N, cfg.latent_dim, derive_seed(cfg.seed, "latents"),
                                       float(cfg.latent_init_std));
        st.shape_ids.reserve(N);
        for (const ShapeSamples& s : shapes) st.shape_ids.push_back(s.shape_id);
        st.opt_W.assign(st.net.layers().size(), AdamTensor{});
        st.opt_b.assign(st.net.layers().size(), AdamTensor{});
        st.opt_z.assign(N, AdamTensor{});
        st.epochs_done = 0;
        st.config_hash = cfg.config_hash;
        st.seed = cfg.seed;
    }

    std::vector<ShapeCache> cache(N);
    for (std::size_t i = 0; i < N; ++i) {
        cache[i].pts.reserve(shapes[i].samples.size());
        for (const SdfSample& p : shapes[i].samples)
            cache[i].pts.push_back(
                {float(p.x.x), float(p.x.y), float(p.x.z), float(p.s)});
    }

    std::ofstream log_file;
    if (!out_dir.empty()) {
        const std::string log_path = out_dir + "/train_log.csv";
        const bool fresh = st.epochs_done == 0;
        log_file.open(log_path, fresh ? std::ios::trunc : std::ios::app);
        if (!log_file) throw std::runtime_error("train: cannot open log " + log_path);
        if (fresh) log_file << train_log_header() << "\n";
    }

    LossConfigT<float> lcfg;
    lcfg.delta = float(cfg.delta);
    // The data term is a batch mean, i.e. the per-epoch point sum scaled by
    // 1/batch_points. The code prior gets the same scaling (spread over the
    // epoch's rounds) so the data:prior ratio of the summed objective is
    // preserved; at full strength the prior pins every code to zero and the
    // decoder collapses to one mean shape.
    const float reg_share = 1.0f / (float(rounds) * float(cfg.batch_points(N)));

    std::vector<std::size_t> order(N);
    std::vector<BatchPointT<float>> batch;
    GradBundleT<float> theta_grads;
    std::vector<std::vector<float>> latent_grads;
    const int progress_every = std::max(1, schedule.total_epochs / 20);

    for (int epoch = int(st.epochs_done); epoch < schedule.total_epochs; ++epoch) {
        const auto epoch_t0 = std::chrono::steady_clock::now();
        auto [stage, alpha] = schedule.stage_for_epoch(epoch);
        apply_growth_transitions(st, *stage, alpha, cfg.seed, epoch);
        lcfg.epsilon = float(stage->epsilon);
        lcfg.lambda = float(stage->lambda);

        LossStats epoch_stats;
        for (int r = 0; r < rounds; ++r) {
            std::iota(order.begin(), order.end(), 0);
            Rng shuffle_rng(derive_seed(cfg.seed, "order", std::uint64_t(epoch), std::uint64_t(r)));
            for (std::size_t i = N; i > 1; --i)
                std::swap(order[i - 1], order[shuffle_rng.index(i)]);

            for (std::size_t chunk = 0; chunk < N; chunk += std::size_t(cfg.shapes_per_step)) {
                const std::size_t chunk_end = std::min(N, chunk + std::size_t(cfg.shapes_per_step));
                batch.clear();
                for (std::size_t c = chunk; c < chunk_end; ++c) {
                    const std::size_t i = order[c];
                    Rng pt_rng(derive_seed(cfg.seed, "points", std::uint64_t(epoch),
                                           std::uint64_t(r) * N + i));
                    const auto& pts = cache[i].pts;
                    for (int j = 0; j < cfg.points_per_shape_per_step; ++j) {
                        const auto& p = pts[pt_rng.index(pts.size())];
                        BatchPointT<float> bp;
                        bp.shape_index = int(i);
                        bp.x[0] = p[0];
                        bp.x[1] = p[1];
                        bp.x[2] = p[2];
                        bp.s = p[3];
                        batch.push_back(bp);
                    }
                }

                objective_batch(st.net, st.latents, batch, lcfg, float(cfg.sigma), reg_share,
                                theta_grads, latent_grads, &epoch_stats);

                auto& layers = st.net.layers();
                for (std::size_t k = 0; k < layers.size(); ++k) {
                    if (use_adam) {
                        adam_step(layers[k].W.data(), theta_grads.dW[k].data(), layers[k].W.size(),
                                  st.opt_W[k], lr_net);
                        adam_step(layers[k].b.data(), theta_grads.db[k].data(), layers[k].b.size(),
                                  st.opt_b[k], lr_net);
                    } else {
                        sgd_step(layers[k].W.data(), theta_grads.dW[k].data(), layers[k].W.size(),
                                 lr_net);
                        sgd_step(layers[k].b.data(), theta_grads.db[k].data(), layers[k].b.size(),
                                 lr_net);
                    }
                }
                for (std::size_t c = chunk; c < chunk_end; ++c) {
                    const std::size_t i = order[c];
                    if (use_adam)
                        adam_step(st.latents[i].data(), latent_grads[i].data(), st.latents[i].size(),
                                  st.opt_z[i], lr_lat);
                    else
                        sgd_step(st.latents[i].data(), latent_grads[i].data(), st.latents[i].size(),
                                 lr_lat);
                }
            }
        }

        TrainLogRow row;
        row.epoch = epoch;
        row.stage = schedule.stage_index(epoch);
        row.epsilon = stage->epsilon;
        row.lambda = stage->lambda;
        row.alpha = alpha;
        row.mean_loss = epoch_stats.sum_loss / double(std::max<std::size_t>(1, epoch_stats.n));
        row.frac_hard = double(epoch_stats.hard) / double(std::max<std::size_t>(1, epoch_stats.n));
        row.frac_semi_hard =
            double(epoch_stats.semi_hard) / double(std::max<std::size_t>(1, epoch_stats.n));
        row.frac_easy = double(epoch_stats.easy) / double(std::max<std::size_t>(1, epoch_stats.n));
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                epoch_t0)
                          .count();
        res.log.push_back(row);
        st.epochs_done = std::uint32_t(epoch + 1);

        if (log_file.is_open()) {
            log_file << format_log_row(row) << "\n";
            log_file.flush();
        }
        if (!out_dir.empty() &&
            ((epoch + 1) % cfg.checkpoint_every == 0 || epoch + 1 == schedule.total_epochs))
            save_checkpoint(st, out_dir + "/checkpoint.bin");
        if (progress && ((epoch + 1) % progress_every == 0 || epoch + 1 == schedule.total_epochs))
            *progress << "epoch " << (epoch + 1) << "/" << schedule.total_epochs << " stage "
                      << row.stage << " mean_loss " << row.mean_loss << " hard " << row.frac_hard
                      << "\n";
    }
    return res;
}

} // namespace sdfkit
