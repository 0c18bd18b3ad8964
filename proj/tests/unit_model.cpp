#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "sdfkit/model/mlp.hpp"
#include "sdfkit/train/checkpoint.hpp"
#include "sdfkit/util/rng.hpp"

using namespace sdfkit;

namespace {

using Net64 = MlpNetworkT<double>;

std::vector<double> rand_input(int n, Rng& rng) {
    std::vector<double> v(std::size_t(n));
    for (auto& x : v) x = rng.uniform(-1, 1);
    return v;
}

// central finite difference of f w.r.t. one scalar location
template <typename Get, typename Set>
double central_diff(Net64& net, const std::vector<double>& z, const double* x, Get get, Set set,
                    double h = 1e-6) {
    double orig = get();
    set(orig + h);
    double fp = net.forward(z.data(), x);
    set(orig - h);
    double fm = net.forward(z.data(), x);
    set(orig);
    return (fp - fm) / (2 * h);
}

double max_rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(1e-6, std::fabs(want));
}

} // namespace

TEST_CASE("init is deterministic per seed and respects the schedule depth") {
    auto a = MlpNetwork::init(8, 24, 5, 7);
    auto b = MlpNetwork::init(8, 24, 5, 7);
    auto c = MlpNetwork::init(8, 24, 5, 8);
    REQUIRE(a.layers().size() == 5);
    CHECK(a.depth() == 5);
    CHECK(a.skip_enabled());
    CHECK(a.growth().fading == false);
    CHECK(a.growth().alpha == 1.0);
    bool all_same = true, any_diff = false;
    for (std::size_t l = 0; l < a.layers().size(); ++l) {
        if (a.layers()[l].W != b.layers()[l].W) all_same = false;
        if (a.layers()[l].W != c.layers()[l].W) any_diff = true;
    }
    CHECK(all_same);
    CHECK(any_diff);
}

TEST_CASE("layer dimensioning: skip layer narrows, widths line up") {
    const int latent = 8, width = 32;
    auto net = MlpNetwork::init(latent, width, 8, 1);
    const auto& L = net.layers();
    REQUIRE(L.size() == 8);
    CHECK(L[0].in == latent + 3);
    CHECK(L[0].out == width);
    CHECK(L[MlpNetwork::kSkipLayer].out == width - (latent + 3));  // concat restores width
    CHECK(L[MlpNetwork::kSkipLayer + 1].in == width);
    CHECK(L.back().out == 1);
    CHECK(L.back().in == width);
}

TEST_CASE("forward output lives in (-1, 1) and is finite") {
    auto net = MlpNetwork::init(8, 24, 6, 3);
    Rng rng(30);
    for (int i = 0; i < 200; ++i) {
        std::vector<float> z(8);
        for (auto& v : z) v = float(rng.uniform(-1, 1));
        float x[3] = {float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)),
                      float(rng.uniform(-1, 1))};
        float f = net.forward(z.data(), x);
        CHECK(std::isfinite(f));
        CHECK(f > -1.0f);
        CHECK(f < 1.0f);
    }
}

TEST_CASE("constant network: all-zero weights give tanh(final bias)") {
    auto net = MlpNetwork::init(4, 16, 5, 2);
    for (auto& layer : net.layers()) {
        std::fill(layer.W.begin(), layer.W.end(), 0.0f);
        std::fill(layer.b.begin(), layer.b.end(), 0.0f);
    }
    net.layers().back().b[0] = 0.3f;
    std::vector<float> z(4, 0.5f);
    float x[3] = {0.1f, -0.2f, 0.7f};
    CHECK(net.forward(z.data(), x) == doctest::Approx(std::tanh(0.3f)).epsilon(1e-6));

    // zero network: gradient w.r.t. z is exactly zero
    net.layers().back().b[0] = 0.0f;
    MlpNetwork::Tape tape;
    MlpNetwork::GradBundle g;
    net.forward(z.data(), x, tape);
    net.size_bundle(g);
    net.backward(tape, 1.0f, g);
    for (float v : g.dz) CHECK(v == 0.0f);
}

TEST_CASE("backward matches finite differences across depths and fade states") {
    Rng rng(31);
    for (int depth = 5; depth <= 8; ++depth) {
        for (double alpha : {-1.0, 0.25, 0.5, 0.75}) {  // -1 marks "no fade"
            const int latent = 6, width = 20;
            Net64 net = Net64::init(latent, width, depth, std::uint64_t(100 + depth));
            if (alpha >= 0.0) {
                if (depth == 8) continue;  // cannot grow past max depth
                net.grow(55);
                net.set_alpha(alpha);
            }
            auto z = rand_input(latent, rng);
            double x[3] = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};

            Net64::Tape tape;
            Net64::GradBundle g;
            net.forward(z.data(), x, tape);
            net.size_bundle(g);
            net.backward(tape, 1.0, g);

            // spot-check a spread of weight coordinates in every live layer
            for (std::size_t l = 0; l < net.layers().size(); ++l) {
                auto& layer = net.layers()[l];
                for (std::size_t k = 0; k < layer.W.size(); k += std::max<std::size_t>(1, layer.W.size() / 7)) {
                    double want = central_diff(
                        net, z, x, [&] { return layer.W[k]; }, [&](double v) { layer.W[k] = v; });
                    double got = g.dW[l][k];
                    if (std::fabs(want) > 1e-7) CHECK(max_rel_err(got, want) < 1e-4);
                }
                double wantb = central_diff(
                    net, z, x, [&] { return layer.b[0]; }, [&](double v) { layer.b[0] = v; });
                if (std::fabs(wantb) > 1e-7) CHECK(max_rel_err(g.db[l][0], wantb) < 1e-4);
            }
            for (int k = 0; k < latent; ++k) {
                double want = central_diff(
                    net, z, x, [&] { return z[std::size_t(k)]; },
                    [&](double v) { z[std::size_t(k)] = v; });
                if (std::fabs(want) > 1e-7) CHECK(max_rel_err(g.dz[std::size_t(k)], want) < 1e-4);
            }
        }
    }
}

TEST_CASE("backward_z reproduces backward's dz at half the work") {
    Rng rng(32);
    Net64 net = Net64::init(10, 24, 6, 9);
    net.grow(10);
    net.set_alpha(0.4);
    auto z = rand_input(10, rng);
    double x[3] = {0.3, -0.5, 0.2};
    Net64::Tape tape;
    net.forward(z.data(), x, tape);

    Net64::GradBundle full, zonly;
    net.size_bundle(full);
    net.size_bundle(zonly);
    net.backward(tape, 0.7, full);
    net.backward_z(tape, 0.7, zonly);
    REQUIRE(full.dz.size() == zonly.dz.size());
    for (std::size_t i = 0; i < full.dz.size(); ++i)
        CHECK(zonly.dz[i] == doctest::Approx(full.dz[i]).epsilon(1e-12));
    for (int i = 0; i < 3; ++i) CHECK(zonly.dx[i] == doctest::Approx(full.dx[i]).epsilon(1e-12));
}

TEST_CASE("zero upstream gives a zero bundle") {
    auto net = MlpNetwork::init(4, 16, 5, 11);
    std::vector<float> z(4, 0.3f);
    float x[3] = {0.1f, 0.2f, 0.3f};
    MlpNetwork::Tape tape;
    MlpNetwork::GradBundle g;
    net.forward(z.data(), x, tape);
    net.size_bundle(g);
    net.backward(tape, 0.0f, g);
    for (auto& dW : g.dW)
        for (float v : dW) CHECK(v == 0.0f);
    for (float v : g.dz) CHECK(v == 0.0f);
}

TEST_CASE("stale tape is rejected") {
    auto net = MlpNetwork::init(4, 16, 5, 12);
    std::vector<float> z(4, 0.1f);
    float x[3] = {0, 0, 0};
    MlpNetwork::Tape tape;
    net.forward(z.data(), x, tape);
    net.grow(13);  // bumps revision
    MlpNetwork::GradBundle g;
    net.size_bundle(g);
    CHECK_THROWS_AS(net.backward(tape, 1.0f, g), std::logic_error);
}

TEST_CASE("growth fade endpoints are bitwise exact") {
    auto net = MlpNetwork::init(8, 32, 5, 14);
    Rng rng(33);
    const int probes = 1000;
    std::vector<std::vector<float>> zs;
    std::vector<std::array<float, 3>> xs;
    std::vector<float> before;
    for (int i = 0; i < probes; ++i) {
        std::vector<float> z(8);
        for (auto& v : z) v = float(rng.uniform(-1, 1));
        std::array<float, 3> x = {float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)),
                                  float(rng.uniform(-1, 1))};
        before.push_back(net.forward(z.data(), x.data()));
        zs.push_back(std::move(z));
        xs.push_back(x);
    }

    net.grow(15);
    CHECK(net.depth() == 6);
    CHECK(net.growth().fading);
    CHECK(net.growth().alpha == 0.0);
    for (int i = 0; i < probes; ++i)
        CHECK(net.forward(zs[std::size_t(i)].data(), xs[std::size_t(i)].data()) ==
              before[std::size_t(i)]);  // bitwise: alpha = 0 bypasses the new layer

    // a still-fading network at alpha = 1 is bitwise the fused one
    net.set_alpha(0.5);
    auto mid_layers = net.layers();  // set_alpha never touches weights
    net.set_alpha(1.0);
    CHECK_FALSE(net.growth().fading);  // fused
    auto faded = MlpNetwork::init(8, 32, 5, 999);
    faded.restore(mid_layers, GrowthState{6, 1.0, true}, net.skip_enabled());
    for (int i = 0; i < probes; ++i)
        CHECK(net.forward(zs[std::size_t(i)].data(), xs[std::size_t(i)].data()) ==
              faded.forward(zs[std::size_t(i)].data(), xs[std::size_t(i)].data()));
}

TEST_CASE("alpha midpoint equals the hand-composed two-path blend") {
    using Net = MlpNetworkT<double>;
    Net net = Net::init(4, 16, 5, 16);
    Rng rng(34);
    std::vector<double> z = rand_input(4, rng);
    double x[3] = {0.2, -0.1, 0.4};

    Net pre = net;  // depth-5 copy
    net.grow(17);
    net.set_alpha(0.5);

    // manual: h = what the old output layer consumed, then
    // 0.5*relu(Wn h + bn) + 0.5*h, then the final affine + tanh
    Net::Tape tape;
    pre.forward(z.data(), x, tape);
    const std::vector<double>& h = tape.in.back();
    const auto& Wn = net.layers()[net.layers().size() - 2];
    std::vector<double> blended(h.size());
    for (std::size_t r = 0; r < blended.size(); ++r) {
        double acc = Wn.b[r];
        for (std::size_t c = 0; c < h.size(); ++c) acc += Wn.W[r * h.size() + c] * h[c];
        double relu = acc > 0 ? acc : 0;
        blended[r] = 0.5 * relu + 0.5 * h[r];
    }
    const auto& Wout = net.layers().back();
    double acc = Wout.b[0];
    for (std::size_t c = 0; c < blended.size(); ++c) acc += Wout.W[c] * blended[c];
    double want = std::tanh(acc);
    CHECK(net.forward(z.data(), x) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("grow sequence 5..8 then error") {
    auto net = MlpNetwork::init(4, 16, 5, 18);
    for (int d = 6; d <= 8; ++d) {
        net.grow(std::uint64_t(d));
        net.set_alpha(1.0);
        CHECK(net.depth() == d);
    }
    CHECK_THROWS_AS(net.grow(99), std::logic_error);
}

TEST_CASE("latent codes are gaussian-scaled and deterministic") {
    auto codes = make_latent_codes(100, 64, 5, 0.01f);
    auto codes2 = make_latent_codes(100, 64, 5, 0.01f);
    CHECK(codes == codes2);
    double sum = 0, sum2 = 0;
    for (const auto& c : codes)
        for (float v : c) {
            sum += v;
            sum2 += double(v) * v;
        }
    const double n = 100 * 64;
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(std::fabs(mean) < 0.001);
    CHECK(std::sqrt(var) == doctest::Approx(0.01).epsilon(0.1));
}

TEST_CASE("checkpoint round trip preserves the whole train state") {
    TrainState st;
    st.net = MlpNetwork::init(8, 24, 6, 19);
    st.net.grow(20);
    st.net.set_alpha(0.25);  // mid-fade state must survive
    st.shape_ids = {"a", "b", "c"};
    st.latents = make_latent_codes(3, 8, 21);
    st.opt_W.resize(st.net.layers().size());
    st.opt_b.resize(st.net.layers().size());
    Rng rng(35);
    for (std::size_t l = 0; l < st.net.layers().size(); ++l) {
        auto& w = st.opt_W[l];
        w.t = 5;
        w.m.assign(st.net.layers()[l].W.size(), 0.25f);
        w.v.assign(st.net.layers()[l].W.size(), 0.5f);
        auto& b = st.opt_b[l];
        b.t = 5;
        b.m.assign(st.net.layers()[l].b.size(), float(rng.uniform(0, 1)));
        b.v.assign(st.net.layers()[l].b.size(), 0.125f);
    }
    st.opt_z.resize(3);
    for (auto& oz : st.opt_z) {
        oz.t = 7;
        oz.m.assign(8, 0.0f);
        oz.v.assign(8, 1.0f);
    }
    st.epochs_done = 123;
    st.config_hash = 0xfeedbeef12345678ull;
    st.seed = 0xFFFFFFFFFFFFFFF0ull;

    std::string path =
        (std::filesystem::temp_directory_path() / "unit_model_ckpt.bin").string();
    save_checkpoint(st, path);
    TrainState back = load_checkpoint(path);
    std::remove(path.c_str());

    CHECK(back.epochs_done == 123);
    CHECK(back.config_hash == st.config_hash);
    CHECK(back.seed == st.seed);
    CHECK(back.shape_ids == st.shape_ids);
    CHECK(back.latents == st.latents);
    CHECK(back.net.depth() == st.net.depth());
    CHECK(back.net.growth().alpha == st.net.growth().alpha);
    CHECK(back.net.growth().fading == st.net.growth().fading);
    CHECK(back.net.skip_enabled() == st.net.skip_enabled());
    REQUIRE(back.net.layers().size() == st.net.layers().size());
    for (std::size_t l = 0; l < st.net.layers().size(); ++l) {
        CHECK(back.net.layers()[l].W == st.net.layers()[l].W);
        CHECK(back.net.layers()[l].b == st.net.layers()[l].b);
        CHECK(back.opt_W[l].m == st.opt_W[l].m);
        CHECK(back.opt_W[l].v == st.opt_W[l].v);
        CHECK(back.opt_W[l].t == st.opt_W[l].t);
    }
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.opt_z[i].m == st.opt_z[i].m);
        CHECK(back.opt_z[i].t == st.opt_z[i].t);
    }

    // identical forwards after the round trip
    std::vector<float> z(8, 0.05f);
    float x[3] = {0.3f, 0.1f, -0.2f};
    CHECK(back.net.forward(z.data(), x) == st.net.forward(z.data(), x));
}

TEST_CASE("checkpoint loader rejects garbage") {
    std::string path =
        (std::filesystem::temp_directory_path() / "unit_model_bad_ckpt.bin").string();
    {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        std::fputs("not a checkpoint at all", f);
        std::fclose(f);
    }
    CHECK_THROWS(load_checkpoint(path));
    std::remove(path.c_str());
}
