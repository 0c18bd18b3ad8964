#include "sdfkit/train/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sdfkit {

namespace {

constexpr char kMagic[8] = {'S', 'D', 'F', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    }
    void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), std::streamsize(n)); }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) {
        char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
        bytes(b, 4);
    }
    void u64(std::uint64_t v) {
        u32(std::uint32_t(v & 0xffffffffu));
        u32(std::uint32_t(v >> 32));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void f32s(const float* p, std::size_t n) {
        static_assert(sizeof(float) == 4);
        bytes(p, n * 4);  // little-endian host
    }
    void str(const std::string& s) {
        u32(std::uint32_t(s.size()));
        bytes(s.data(), s.size());
    }
    void done(const std::string& path) {
        out_.flush();
        if (!out_) throw std::runtime_error("write failed: " + path);
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open: " + path);
    }
    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), std::streamsize(n));
        if (std::size_t(in_.gcount()) != n)
            throw std::runtime_error(path_ + ": truncated checkpoint");
    }
    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        unsigned char b[4];
        bytes(b, 4);
        return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
               std::uint32_t(b[3]) << 24;
    }
    std::uint64_t u64() {
        std::uint64_t lo = u32();
        return lo | std::uint64_t(u32()) << 32;
    }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    void f32s(float* p, std::size_t n) { bytes(p, n * 4); }
    std::string str() {
        std::uint32_t n = u32();
        if (n > (1u << 20)) throw std::runtime_error(path_ + ": implausible string length");
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
};

void write_adam(Writer& w, const AdamTensor& a, std::size_t n) {
    w.u64(a.t);
    if (a.m.empty()) {  // never stepped: store explicit zeros to keep layout fixed
        std::vector<float> zeros(n, 0.0f);
        w.f32s(zeros.data(), n);
        w.f32s(zeros.data(), n);
    } else {
        if (a.m.size() != n || a.v.size() != n)
            throw std::logic_error("checkpoint: optimizer tensor size mismatch");
        w.f32s(a.m.data(), n);
        w.f32s(a.v.data(), n);
    }
}

AdamTensor read_adam(Reader& r, std::size_t n) {
    AdamTensor a;
    a.t = r.u64();
    a.m.resize(n);
    a.v.resize(n);
    r.f32s(a.m.data(), n);
    r.f32s(a.v.data(), n);
    return a;
}

} // namespace

void TrainState::validate() const {
    const std::size_t n_layers = net.layers().size();
    if (opt_W.size() != n_layers || opt_b.size() != n_layers)
        throw std::logic_error("train state: per-layer optimizer count mismatch");
    if (shape_ids.size() != latents.size() || opt_z.size() != latents.size())
        throw std::logic_error("train state: latent bank bookkeeping mismatch");
    for (const std::vector<float>& z : latents)
        if (int(z.size()) != net.latent_dim())
            throw std::logic_error("train state: latent width mismatch");
}

void save_checkpoint(const TrainState& st, const std::string& path) {
    st.validate();
    Writer w(path);
    w.bytes(kMagic, 8);
    w.u32(kVersion);
    w.u32(std::uint32_t(st.net.latent_dim()));
    w.u32(std::uint32_t(st.net.hidden_width()));
    w.u32(std::uint32_t(st.net.depth()));
    w.u8(st.net.skip_enabled() ? 1 : 0);
    w.u8(st.net.growth().fading ? 1 : 0);
    w.f64(st.net.growth().alpha);
    w.u32(st.epochs_done);
    w.u64(st.config_hash);
    w.u64(st.seed);

    const auto& layers = st.net.layers();
    w.u32(std::uint32_t(layers.size()));
    for (const auto& L : layers) {
        w.u32(std::uint32_t(L.in));
        w.u32(std::uint32_t(L.out));
        w.f32s(L.W.data(), L.W.size());
        w.f32s(L.b.data(), L.b.size());
    }
    for (std::size_t k = 0; k < layers.size(); ++k) {
        write_adam(w, st.opt_W[k], layers[k].W.size());
        write_adam(w, st.opt_b[k], layers[k].b.size());
    }

    w.u32(std::uint32_t(st.latents.size()));
    for (std::size_t i = 0; i < st.latents.size(); ++i) {
        w.str(st.shape_ids[i]);
        w.f32s(st.latents[i].data(), st.latents[i].size());
        write_adam(w, st.opt_z[i], st.latents[i].size());
    }
    w.done(path);
}

TrainState load_checkpoint(const std::string& path) {
    Reader r(path);
    char magic[8];
    r.bytes(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error(path + ": not a checkpoint file (bad magic)");
    std::uint32_t version = r.u32();
    if (version != kVersion)
        throw std::runtime_error(path + ": unsupported checkpoint version " +
                                 std::to_string(version));

    TrainState st;
    const int latent_dim = int(r.u32());
    const int hidden_width = int(r.u32());
    const int depth = int(r.u32());
    const bool skip_enabled = r.u8() != 0;
    GrowthState growth;
    growth.active_depth = depth;
    growth.fading = r.u8() != 0;
    growth.alpha = r.f64();
    st.epochs_done = r.u32();
    st.config_hash = r.u64();
    st.seed = r.u64();

    if (latent_dim < 1 || hidden_width < 1 || depth < 2 || depth > MlpNetwork::kMaxDepth)
        throw std::runtime_error(path + ": implausible checkpoint header");

    std::uint32_t n_layers = r.u32();
    if (int(n_layers) != depth) throw std::runtime_error(path + ": layer count != depth");
    std::vector<AffineT<float>> layers(n_layers);
    for (auto& L : layers) {
        L.in = int(r.u32());
        L.out = int(r.u32());
        if (L.in < 1 || L.out < 1 || L.in > 1 << 20 || L.out > 1 << 20)
            throw std::runtime_error(path + ": implausible layer shape");
        L.W.resize(std::size_t(L.in) * L.out);
        L.b.resize(std::size_t(L.out));
        r.f32s(L.W.data(), L.W.size());
        r.f32s(L.b.data(), L.b.size());
    }

    // restore() re-derives and validates the topology against these dims
    MlpNetwork probe = MlpNetwork::init(latent_dim, hidden_width, 2, 1);
    probe.restore(std::move(layers), growth, skip_enabled);
    st.net = std::move(probe);

    for (std::size_t k = 0; k < n_layers; ++k) {
        st.opt_W.push_back(read_adam(r, st.net.layers()[k].W.size()));
        st.opt_b.push_back(read_adam(r, st.net.layers()[k].b.size()));
    }

    std::uint32_t n_shapes = r.u32();
    st.shape_ids.resize(n_shapes);
    st.latents.resize(n_shapes);
    st.opt_z.resize(n_shapes);
    for (std::uint32_t i = 0; i < n_shapes; ++i) {
        st.shape_ids[i] = r.str();
        st.latents[i].resize(std::size_t(latent_dim));
        r.f32s(st.latents[i].data(), st.latents[i].size());
        st.opt_z[i] = read_adam(r, std::size_t(latent_dim));
    }
    st.validate();
    return st;
}

} // namespace sdfkit
