#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "sdfkit/train/adam.hpp"
#include "sdfkit/train/loss.hpp"
#include "sdfkit/train/objective.hpp"
#include "sdfkit/train/schedule.hpp"
#include "sdfkit/train/trainer.hpp"
#include "sdfkit/util/rng.hpp"

using namespace sdfkit;

TEST_CASE("clamp and sign conventions") {
    CHECK(clamp_sdf(0.2, 0.1) == 0.1);
    CHECK(clamp_sdf(-0.15, 0.1) == -0.1);
    CHECK(clamp_sdf(0.05, 0.1) == 0.05);
    CHECK(sgn(0.0) == 1.0);  // zero counts as outside
    CHECK(sgn(-1e-300) == -1.0);
    CHECK(sgn(3.0) == 1.0);
}

TEST_CASE("hand-computed loss values") {
    // plain clamped L1: prediction saturates at the bound
    CHECK(loss_deepsdf(0.2, 0.05, 0.1) == doctest::Approx(0.05).epsilon(1e-12));
    // tolerance hinge shaves epsilon off the error
    CHECK(loss_tolerance(0.05, 0.02, 0.1, 0.025) == doctest::Approx(0.005).epsilon(1e-12));
    // wrong-sign prediction gets the 1+lambda weight
    LossConfig cfg;
    cfg.delta = 0.1;
    cfg.epsilon = 0.025;
    cfg.lambda = 0.5;
    CHECK(loss_curriculum(-0.01, 0.05, cfg) == doctest::Approx(0.0525).epsilon(1e-12));
    // weight factor alone
    CHECK(weight_factor(-0.01, 0.05, 0.5) == 1.5);
    CHECK(weight_factor(0.08, 0.05, 0.5) == 0.5);   // overshoot outward: easy
    CHECK(weight_factor(0.05, 0.05, 0.5) == 1.5);   // exact hit: sgn(0) = +1
    CHECK(weight_factor(-0.02, -0.05, 0.5) == 0.5); // inside, pulled toward surface
}

TEST_CASE("epsilon = lambda = 0 degenerates to the plain clamped loss") {
    LossConfig cfg;  // delta 0.1, epsilon 0, lambda 0
    for (int i = 0; i <= 200; ++i) {
        for (int j = 0; j <= 200; ++j) {
            double f = -0.2 + 0.4 * i / 200.0;
            double s = -0.2 + 0.4 * j / 200.0;
            CHECK(loss_curriculum(f, s, cfg) == loss_deepsdf(f, s, cfg.delta));
        }
    }
}

TEST_CASE("tolerance band and weight range on the same grid") {
    const double delta = 0.1, eps = 0.025, lambda = 0.5;
    int zero_inside = 0, nonzero_outside = 0;
    for (int i = 0; i <= 200; ++i) {
        for (int j = 0; j <= 200; ++j) {
            double f = -0.2 + 0.4 * i / 200.0;
            double s = -0.2 + 0.4 * j / 200.0;
            double base = loss_deepsdf(f, s, delta);
            double tol = loss_tolerance(f, s, delta, eps);
            if (base <= eps) {
                CHECK(tol == 0.0);
                ++zero_inside;
            } else {
                CHECK(tol == base - eps);
                ++nonzero_outside;
            }
            double w = weight_factor(clamp_sdf(f, delta), clamp_sdf(s, delta), lambda);
            CHECK((w == 1.5 || w == 0.5));
            LossConfig cfg;
            cfg.delta = delta;
            cfg.epsilon = eps;
            cfg.lambda = lambda;
            CHECK(loss_curriculum(f, s, cfg) >= 0.0);
        }
    }
    CHECK(zero_inside > 0);
    CHECK(nonzero_outside > 0);
}

TEST_CASE("the exact prediction is always optimal") {
    LossConfig cfg;
    cfg.epsilon = 0.01;
    cfg.lambda = 0.4;
    Rng rng(40);
    for (int i = 0; i < 500; ++i) {
        double s = rng.uniform(-0.3, 0.3);
        CHECK(loss_curriculum(s, s, cfg) == 0.0);
    }
}

TEST_CASE("sample difficulty taxonomy") {
    CHECK(classify_sample(-0.01, 0.05) == SampleClass::Hard);     // wrong sign
    CHECK(classify_sample(0.02, 0.05) == SampleClass::SemiHard);  // short of the target
    CHECK(classify_sample(0.08, 0.05) == SampleClass::Easy);      // at or past it
    CHECK(classify_sample(0.05, 0.05) == SampleClass::Easy);
    CHECK(classify_sample(0.0, -0.03) == SampleClass::Hard);      // sgn(0) = +1
    CHECK(classify_sample(-0.02, -0.05) == SampleClass::SemiHard);
    CHECK(classify_sample(-0.07, -0.05) == SampleClass::Easy);
}

TEST_CASE("loss config validation") {
    LossConfig bad;
    bad.delta = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = LossConfig{};
    bad.epsilon = -0.01;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = LossConfig{};
    bad.lambda = 1.0;  // would zero out easy samples entirely
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    LossConfig ok;
    ok.epsilon = 0.025;
    ok.lambda = 0.999;
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("loss subgradient matches finite differences away from kinks") {
    LossConfig cfg;
    cfg.delta = 0.1;
    cfg.epsilon = 0.02;
    cfg.lambda = 0.3;
    Rng rng(41);
    const double h = 1e-7, kink_margin = 1e-4;
    int checked = 0;
    for (int i = 0; i < 4000 && checked < 1000; ++i) {
        double f = rng.uniform(-0.2, 0.2);
        double s = rng.uniform(-0.2, 0.2);
        if (std::fabs(f - cfg.delta) < kink_margin || std::fabs(f + cfg.delta) < kink_margin)
            continue;
        double base = loss_deepsdf(f, s, cfg.delta);
        if (std::fabs(base - cfg.epsilon) < kink_margin) continue;
        if (std::fabs(f - s) < kink_margin) continue;  // |.| kink
        double want = (loss_curriculum(f + h, s, cfg) - loss_curriculum(f - h, s, cfg)) / (2 * h);
        double got = dloss_curriculum_df(f, s, cfg);
        CHECK(std::fabs(got - want) < 1e-6 * std::max(1.0, std::fabs(want)));
        ++checked;
    }
    CHECK(checked >= 1000);

    // flat regions report an exact zero
    CHECK(dloss_curriculum_df(0.15, 0.0, cfg) == 0.0);    // clamp plateau
    CHECK(dloss_curriculum_df(-0.2, 0.05, cfg) == 0.0);
    CHECK(dloss_curriculum_df(0.051, 0.05, cfg) == 0.0);  // inside the tolerance band
}

TEST_CASE("reference curriculum stage table") {
    CurriculumSchedule s = default_schedule(2000);
    REQUIRE(s.stages.size() == 7);
    CHECK_NOTHROW(s.validate());
    const int begins[] = {0, 200, 400, 600, 800, 1000, 1200};
    const int ends[] = {200, 400, 600, 800, 1000, 1200, 2000};
    const int depths[] = {5, 6, 6, 7, 7, 8, 8};
    const bool fades[] = {false, true, false, true, false, true, false};
    const double epsilons[] = {0.025, 0.01, 0.01, 0.0025, 0.0025, 0.0, 0.0};
    const double lambdas[] = {0.0, 0.1, 0.1, 0.2, 0.2, 0.5, 0.5};
    for (int i = 0; i < 7; ++i) {
        CAPTURE(i);
        CHECK(s.stages[std::size_t(i)].epoch_begin == begins[i]);
        CHECK(s.stages[std::size_t(i)].epoch_end == ends[i]);
        CHECK(s.stages[std::size_t(i)].depth == depths[i]);
        CHECK(s.stages[std::size_t(i)].residual_fade == fades[i]);
        CHECK(s.stages[std::size_t(i)].epsilon == epsilons[i]);
        CHECK(s.stages[std::size_t(i)].lambda == lambdas[i]);
    }
    CHECK(s.initial_depth() == 5);

    auto [st100, a100] = s.stage_for_epoch(100);
    CHECK(st100->depth == 5);
    CHECK(st100->epsilon == 0.025);
    CHECK(st100->lambda == 0.0);
    CHECK(a100 == 1.0);

    auto [st300, a300] = s.stage_for_epoch(300);  // halfway through the first fade
    CHECK(st300->depth == 6);
    CHECK(st300->residual_fade);
    CHECK(st300->epsilon == 0.01);
    CHECK(st300->lambda == 0.1);
    CHECK(a300 == 0.5);

    auto [st1500, a1500] = s.stage_for_epoch(1500);
    CHECK(st1500->depth == 8);
    CHECK(st1500->epsilon == 0.0);
    CHECK(st1500->lambda == 0.5);
    CHECK(a1500 == 1.0);

    CHECK(s.stage_index(0) == 0);
    CHECK(s.stage_index(199) == 0);
    CHECK(s.stage_index(200) == 1);
    CHECK(s.stage_index(1999) == 6);
    CHECK_THROWS_AS(s.stage_for_epoch(-1), std::out_of_range);
    CHECK_THROWS_AS(s.stage_for_epoch(2000), std::out_of_range);
}

TEST_CASE("schedule scales proportionally onto smaller budgets") {
    CurriculumSchedule s300 = default_schedule(300);
    const int ends300[] = {30, 60, 90, 120, 150, 180, 300};
    REQUIRE(s300.stages.size() == 7);
    for (int i = 0; i < 7; ++i) CHECK(s300.stages[std::size_t(i)].epoch_end == ends300[i]);

    CurriculumSchedule scaled = scale_schedule(default_schedule(2000), 300);
    REQUIRE(scaled.stages.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(scaled.stages[i].epoch_begin == s300.stages[i].epoch_begin);
        CHECK(scaled.stages[i].epoch_end == s300.stages[i].epoch_end);
        CHECK(scaled.stages[i].depth == s300.stages[i].depth);
    }
    CHECK(scaled.total_epochs == 300);

    // every stage survives even a budget of exactly one epoch per stage
    CurriculumSchedule tiny = default_schedule(7);
    REQUIRE(tiny.stages.size() == 7);
    for (std::size_t i = 0; i < 7; ++i)
        CHECK(tiny.stages[i].epoch_end - tiny.stages[i].epoch_begin >= 1);
    CHECK_THROWS_AS(default_schedule(6), std::invalid_argument);
}

TEST_CASE("flat schedule and validation rejections") {
    CurriculumSchedule flat = flat_schedule(50, 8, 0.0, 0.0);
    REQUIRE(flat.stages.size() == 1);
    CHECK(flat.stages[0].depth == 8);
    CHECK(flat.initial_depth() == 8);
    CHECK(flat.stage_for_epoch(49).first == &flat.stages[0]);

    auto broken = [](auto mutate) {
        CurriculumSchedule s = default_schedule(2000);
        mutate(s);
        return s;
    };
    CHECK_THROWS_AS(broken([](CurriculumSchedule& s) { s.stages[2].epoch_begin = 401; }).validate(),
                    std::invalid_argument);  // gap
    CHECK_THROWS_AS(broken([](CurriculumSchedule& s) { s.stages[2].depth = 5; }).validate(),
                    std::invalid_argument);  // depth decreases
    CHECK_THROWS_AS(broken([](CurriculumSchedule& s) { s.stages[2].epsilon = 0.03; }).validate(),
                    std::invalid_argument);  // epsilon rises
    CHECK_THROWS_AS(broken([](CurriculumSchedule& s) { s.stages[2].lambda = 0.05; }).validate(),
                    std::invalid_argument);  // lambda drops
    CHECK_THROWS_AS(broken([](CurriculumSchedule& s) { s.stages[0].residual_fade = true; }).validate(),
                    std::invalid_argument);  // nothing to fade at the start
    CHECK_THROWS_AS(broken([](CurriculumSchedule& s) { s.stages[1].depth = 7; }).validate(),
                    std::invalid_argument);  // grows by two
    CHECK_THROWS_AS(broken([](CurriculumSchedule& s) { s.stages[2].residual_fade = true; }).validate(),
                    std::invalid_argument);  // fade without growth
}

TEST_CASE("schedule file round trip") {
    CurriculumSchedule s = default_schedule(300);
    std::string path = (std::filesystem::temp_directory_path() / "unit_sched.ini").string();
    save_schedule(s, path);
    CurriculumSchedule back = load_schedule(path);
    std::remove(path.c_str());
    CHECK(back.total_epochs == s.total_epochs);
    REQUIRE(back.stages.size() == s.stages.size());
    for (std::size_t i = 0; i < s.stages.size(); ++i) {
        CHECK(back.stages[i].epoch_begin == s.stages[i].epoch_begin);
        CHECK(back.stages[i].epoch_end == s.stages[i].epoch_end);
        CHECK(back.stages[i].depth == s.stages[i].depth);
        CHECK(back.stages[i].residual_fade == s.stages[i].residual_fade);
        CHECK(back.stages[i].epsilon == s.stages[i].epsilon);  // shortest-round-trip text
        CHECK(back.stages[i].lambda == s.stages[i].lambda);
    }
}

TEST_CASE("adam update algebra") {
    AdamTensor st;
    float p[2] = {1.0f, -2.0f};
    float g0[2] = {0.0f, 0.0f};
    adam_step(p, g0, 2, st, 0.1f);
    CHECK(p[0] == 1.0f);  // zero gradient moves nothing
    CHECK(p[1] == -2.0f);
    CHECK(st.t == 1);
    CHECK(st.m.size() == 2);  // state sized lazily

    // first real step has magnitude ~lr regardless of gradient scale
    AdamTensor st2;
    float q[1] = {0.0f};
    float g1[1] = {1e-3f};
    adam_step(q, g1, 1, st2, 0.01f);
    CHECK(q[0] == doctest::Approx(-0.01).epsilon(1e-3));
    AdamTensor st3;
    float r[1] = {0.0f};
    float g2[1] = {100.0f};
    adam_step(r, g2, 1, st3, 0.01f);
    CHECK(r[0] == doctest::Approx(-0.01).epsilon(1e-3));

    // descends a 1-d quadratic 0.5*(p-3)^2
    AdamTensor st4;
    float w = 0.0f;
    for (int it = 0; it < 400; ++it) {
        float grad = w - 3.0f;
        adam_step(&w, &grad, 1, st4, 0.05f);
    }
    CHECK(std::fabs(w - 3.0f) < 0.05f);

    float u[2] = {1.0f, 2.0f};
    float gu[2] = {0.5f, -0.25f};
    sgd_step(u, gu, 2, 0.1f);
    CHECK(u[0] == 0.95f);
    CHECK(u[1] == 2.025f);
}

namespace {

// deterministic double-precision micro-setup for objective checks
struct MicroSetup {
    MlpNetworkT<double> net = MlpNetworkT<double>::init(4, 16, 6, 77);
    std::vector<std::vector<double>> latents;
    std::vector<BatchPointT<double>> batch;
    LossConfigT<double> cfg;

    MicroSetup() {
        cfg.delta = 0.1;
        cfg.epsilon = 0.01;
        cfg.lambda = 0.3;
        Rng rng(42);
        latents.resize(2);
        for (auto& z : latents) {
            z.resize(4);
            for (auto& v : z) v = rng.uniform(-0.1, 0.1);
        }
        // points chosen away from every loss kink so finite differences are clean
        while (batch.size() < 8) {
            BatchPointT<double> p;
            p.shape_index = int(batch.size() % 2);
            for (double& c : p.x) c = rng.uniform(-0.5, 0.5);
            p.s = rng.uniform(-0.15, 0.15);
            double f = net.forward(latents[std::size_t(p.shape_index)].data(), p.x);
            if (std::fabs(f - cfg.delta) < 1e-3 || std::fabs(f + cfg.delta) < 1e-3) continue;
            double base = loss_deepsdf(f, p.s, cfg.delta);
            if (std::fabs(base - cfg.epsilon) < 1e-3) continue;
            if (std::fabs(f - p.s) < 1e-3) continue;
            batch.push_back(p);
        }
    }
};

} // namespace

TEST_CASE("batch objective gradients match finite differences") {
    MicroSetup ms;
    const double sigma = 0.01, reg_share = 1e-4, h = 1e-6;

    GradBundleT<double> tg;
    std::vector<std::vector<double>> zg;
    double base = objective_batch(ms.net, ms.latents, ms.batch, ms.cfg, sigma, reg_share, tg, zg);
    CHECK(base > 0.0);

    auto eval = [&] {
        GradBundleT<double> t2;
        std::vector<std::vector<double>> z2;
        return objective_batch(ms.net, ms.latents, ms.batch, ms.cfg, sigma, reg_share, t2, z2);
    };

    for (std::size_t l = 0; l < ms.net.layers().size(); ++l) {
        auto& layer = ms.net.layers()[l];
        std::size_t stride = std::max<std::size_t>(1, layer.W.size() / 5);
        for (std::size_t k = 0; k < layer.W.size(); k += stride) {
            double orig = layer.W[k];
            layer.W[k] = orig + h;
            double fp = eval();
            layer.W[k] = orig - h;
            double fm = eval();
            layer.W[k] = orig;
            double want = (fp - fm) / (2 * h);
            if (std::fabs(want) < 1e-7) continue;
            CHECK(std::fabs(tg.dW[l][k] - want) / std::max(1e-6, std::fabs(want)) < 1e-4);
        }
    }
    for (std::size_t i = 0; i < ms.latents.size(); ++i) {
        for (std::size_t d = 0; d < ms.latents[i].size(); ++d) {
            double orig = ms.latents[i][d];
            ms.latents[i][d] = orig + h;
            double fp = eval();
            ms.latents[i][d] = orig - h;
            double fm = eval();
            ms.latents[i][d] = orig;
            double want = (fp - fm) / (2 * h);
            if (std::fabs(want) < 1e-7) continue;
            CHECK(std::fabs(zg[i][d] - want) / std::max(1e-6, std::fabs(want)) < 1e-4);
        }
    }
}

TEST_CASE("objective degenerations and bookkeeping") {
    MicroSetup ms;
    GradBundleT<double> tg;
    std::vector<std::vector<double>> zg;

    // epsilon = lambda = 0, no regularizer: exactly the mean plain clamped loss
    LossConfigT<double> plain;
    plain.delta = 0.1;
    double got = objective_batch(ms.net, ms.latents, ms.batch, plain, 0.01, 0.0, tg, zg);
    double want = 0.0;
    for (const auto& p : ms.batch) {
        double f = ms.net.forward(ms.latents[std::size_t(p.shape_index)].data(), p.x);
        want += loss_deepsdf(f, p.s, plain.delta);
    }
    want /= double(ms.batch.size());
    CHECK(got == doctest::Approx(want).epsilon(1e-12));

    // zero latents: the regularizer term contributes nothing
    std::vector<std::vector<double>> zero_lat(2, std::vector<double>(4, 0.0));
    double with_reg = objective_batch(ms.net, zero_lat, ms.batch, plain, 0.01, 10.0, tg, zg);
    double no_reg = objective_batch(ms.net, zero_lat, ms.batch, plain, 0.01, 0.0, tg, zg);
    CHECK(with_reg == with_reg);  // finite
    CHECK(with_reg == doctest::Approx(no_reg).epsilon(1e-15));

    // the regularizer adds reg_share/sigma^2 * |z|^2 per touched shape
    double zz = 0.0;
    for (const auto& z : ms.latents)
        for (double v : z) zz += v * v;
    double base = objective_batch(ms.net, ms.latents, ms.batch, plain, 0.01, 0.0, tg, zg);
    double reg = objective_batch(ms.net, ms.latents, ms.batch, plain, 0.01, 0.5, tg, zg);
    CHECK(reg - base == doctest::Approx(0.5 / (0.01 * 0.01) * zz).epsilon(1e-9));

    // stats count every point exactly once
    LossStats stats;
    objective_batch(ms.net, ms.latents, ms.batch, ms.cfg, 0.01, 0.0, tg, zg, &stats);
    CHECK(stats.n == ms.batch.size());
    CHECK(stats.hard + stats.semi_hard + stats.easy == stats.n);

    // errors
    auto bad = ms.batch;
    bad[0].shape_index = 7;
    CHECK_THROWS_AS(objective_batch(ms.net, ms.latents, bad, ms.cfg, 0.01, 0.0, tg, zg),
                    std::out_of_range);
    std::vector<BatchPointT<double>> empty;
    CHECK_THROWS_AS(objective_batch(ms.net, ms.latents, empty, ms.cfg, 0.01, 0.0, tg, zg),
                    std::invalid_argument);
    CHECK_THROWS_AS(objective_batch(ms.net, ms.latents, ms.batch, ms.cfg, 0.0, 0.0, tg, zg),
                    std::invalid_argument);
}

TEST_CASE("train log rows round-trip and strip cleanly") {
    TrainLogRow r;
    r.epoch = 42;
    r.stage = 3;
    r.epsilon = 0.0025;
    r.lambda = 0.2;
    r.alpha = 0.625;
    r.mean_loss = 0.012345678901234567;
    r.frac_hard = 1.0 / 3.0;
    r.frac_semi_hard = 0.25;
    r.frac_easy = 1.0 - 1.0 / 3.0 - 0.25;
    r.wall_ms = 123.456;

    std::string line = format_log_row(r);
    TrainLogRow back = parse_log_row(line);
    CHECK(back.epoch == r.epoch);
    CHECK(back.stage == r.stage);
    CHECK(back.epsilon == r.epsilon);
    CHECK(back.lambda == r.lambda);
    CHECK(back.alpha == r.alpha);
    CHECK(back.mean_loss == r.mean_loss);  // doubles survive the text round trip
    CHECK(back.frac_hard == r.frac_hard);
    CHECK(back.wall_ms == r.wall_ms);
    CHECK(format_log_row(back) == line);

    // the timing column is the only difference between reruns
    TrainLogRow r2 = r;
    r2.wall_ms = 987.0;
    CHECK(strip_timing_column(format_log_row(r)) == strip_timing_column(format_log_row(r2)));
    CHECK(strip_timing_column(line) != line);

    // header names the timing column last
    std::string header = train_log_header();
    CHECK(header.rfind("wall_ms") == header.size() - 7);
}

namespace {

// tiny synthetic dataset: two spheres, exact analytic labels
std::vector<ShapeSamples> micro_shapes(std::size_t n_per_shape) {
    std::vector<ShapeSamples> out(2);
    Rng rng(50);
    const double radii[2] = {0.4, 0.25};
    for (int s = 0; s < 2; ++s) {
        out[std::size_t(s)].shape_id = s == 0 ? "big" : "small";
        out[std::size_t(s)].source = "sphere(0,0,0," + std::to_string(radii[s]) + ")";
        for (std::size_t i = 0; i < n_per_shape; ++i) {
            SdfSample p;
            p.x = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            p.s = norm(p.x) - radii[s];
            out[std::size_t(s)].samples.push_back(p);
        }
    }
    return out;
}

TrainConfig micro_cfg() {
    TrainConfig cfg;
    cfg.latent_dim = 8;
    cfg.hidden_width = 24;
    cfg.shapes_per_step = 2;
    cfg.points_per_shape_per_step = 64;
    cfg.points_per_shape_per_epoch = 128;
    cfg.lr_network = 5e-4;
    cfg.seed = 7;
    cfg.checkpoint_every = 100;
    return cfg;
}

} // namespace

TEST_CASE("trainer is deterministic per seed") {
    auto shapes = micro_shapes(500);
    CurriculumSchedule sched = flat_schedule(6, 5, 0.005, 0.2);
    TrainConfig cfg = micro_cfg();

    TrainResult a = train(shapes, sched, cfg);
    TrainResult b = train(shapes, sched, cfg);
    REQUIRE(a.log.size() == 6);
    REQUIRE(b.log.size() == 6);
    for (std::size_t i = 0; i < a.log.size(); ++i)
        CHECK(strip_timing_column(format_log_row(a.log[i])) ==
              strip_timing_column(format_log_row(b.log[i])));
    CHECK(a.state.latents == b.state.latents);
    for (std::size_t l = 0; l < a.state.net.layers().size(); ++l)
        CHECK(a.state.net.layers()[l].W == b.state.net.layers()[l].W);

    TrainConfig cfg2 = cfg;
    cfg2.seed = 8;
    TrainResult c = train(shapes, sched, cfg2);
    CHECK(a.state.latents != c.state.latents);

    // loss actually goes down over the run
    CHECK(a.log.back().mean_loss < a.log.front().mean_loss);
}

TEST_CASE("resume continues the identical trajectory") {
    auto shapes = micro_shapes(400);
    TrainConfig cfg = micro_cfg();
    CurriculumSchedule s6 = flat_schedule(6, 5, 0.005, 0.2);
    CurriculumSchedule s3 = flat_schedule(3, 5, 0.005, 0.2);

    TrainResult full = train(shapes, s6, cfg);
    TrainResult head = train(shapes, s3, cfg);
    CHECK(head.state.epochs_done == 3);
    TrainResult tail = train(shapes, s6, cfg, "", &head.state);
    CHECK(tail.state.epochs_done == 6);
    REQUIRE(tail.log.size() == 3);  // only the epochs this call ran

    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(tail.log[i].epoch == full.log[i + 3].epoch);
        CHECK(strip_timing_column(format_log_row(tail.log[i])) ==
              strip_timing_column(format_log_row(full.log[i + 3])));
    }
    CHECK(tail.state.latents == full.state.latents);
    for (std::size_t l = 0; l < full.state.net.layers().size(); ++l) {
        CHECK(tail.state.net.layers()[l].W == full.state.net.layers()[l].W);
        CHECK(tail.state.net.layers()[l].b == full.state.net.layers()[l].b);
    }
    for (std::size_t l = 0; l < full.state.opt_W.size(); ++l) {
        CHECK(tail.state.opt_W[l].m == full.state.opt_W[l].m);
        CHECK(tail.state.opt_W[l].v == full.state.opt_W[l].v);
    }
}

TEST_CASE("trainer executes growth stages and fuses faded layers") {
    auto shapes = micro_shapes(300);
    TrainConfig cfg = micro_cfg();
    CurriculumSchedule sched;
    sched.total_epochs = 8;
    sched.stages.push_back({0, 3, 5, false, 0.01, 0.0});
    sched.stages.push_back({3, 6, 6, true, 0.005, 0.1});
    sched.stages.push_back({6, 8, 6, false, 0.005, 0.1});
    sched.validate();

    TrainResult r = train(shapes, sched, cfg);
    CHECK(r.state.net.depth() == 6);
    CHECK_FALSE(r.state.net.growth().fading);  // fused on entering the last stage
    CHECK(r.state.opt_W.size() == 6);          // optimizer slots follow the growth
    REQUIRE(r.log.size() == 8);
    CHECK(r.log[0].alpha == 1.0);
    CHECK(r.log[3].alpha == 0.0);  // fade starts at zero
    CHECK(r.log[4].alpha == doctest::Approx(1.0 / 3.0));
    CHECK(r.log[6].alpha == 1.0);
    CHECK(r.log[3].stage == 1);
    CHECK(r.log[6].stage == 2);
    CHECK(r.log[3].epsilon == 0.005);
    CHECK(r.log[3].lambda == doctest::Approx(0.1));
}

TEST_CASE("trainer writes a log file with the header") {
    auto shapes = micro_shapes(200);
    TrainConfig cfg = micro_cfg();
    std::string dir =
        (std::filesystem::temp_directory_path() / "unit_train_out").string();
    std::filesystem::create_directories(dir);
    CurriculumSchedule sched = flat_schedule(4, 5, 0.0, 0.0);
    TrainResult r = train(shapes, sched, cfg, dir);
    (void)r;

    std::ifstream log(dir + "/train_log.csv");
    REQUIRE(bool(log));
    std::string line;
    REQUIRE(std::getline(log, line));
    CHECK(line == train_log_header());
    int rows = 0;
    while (std::getline(log, line))
        if (!line.empty()) {
            TrainLogRow row = parse_log_row(line);
            CHECK(row.epoch == rows);
            ++rows;
        }
    CHECK(rows == 4);
    CHECK(std::filesystem::exists(dir + "/checkpoint.bin"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("train config validation and derived learning rate") {
    TrainConfig cfg = micro_cfg();
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.batch_points(2) == 128);   // 64 points x min(2 shapes, 2 per step)
    CHECK(cfg.batch_points(1) == 64);

    TrainConfig derive = micro_cfg();
    derive.lr_network = 0.0;
    CHECK(derive.effective_lr_network(2) == doctest::Approx(128 * 1e-5).epsilon(1e-12));
    CHECK(cfg.effective_lr_network(2) == doctest::Approx(5e-4).epsilon(1e-12));

    TrainConfig bad = micro_cfg();
    bad.latent_dim = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = micro_cfg();
    bad.optimizer = "lbfgs";
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = micro_cfg();
    bad.sigma = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = micro_cfg();
    bad.points_per_shape_per_step = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    auto shapes = micro_shapes(100);
    CurriculumSchedule sched = flat_schedule(2, 5, 0.0, 0.0);
    std::vector<ShapeSamples> none;
    CHECK_THROWS_AS(train(none, sched, cfg), std::invalid_argument);
    std::vector<ShapeSamples> hollow(1);
    hollow[0].shape_id = "empty";
    CHECK_THROWS_AS(train(hollow, sched, cfg), std::invalid_argument);
}
