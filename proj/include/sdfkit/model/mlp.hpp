#pragma once
#include <cstdint>
#include <vector>

namespace sdfkit {

template <typename T>
struct AffineT {
    int in = 0, out = 0;
    std::vector<T> W;  // row-major [out x in]
    std::vector<T> b;  // [out]
};

// Depth bookkeeping for progressive growth. `active_depth` counts live affine
// layers including the output layer. While `fading`, the newest hidden layer
// runs as a residual block: h' = alpha * relu(W h + b) + (1 - alpha) * h.
// alpha = 0 and alpha = 1 short-circuit to the bypass / the plain layer, so
// those endpoints are bitwise identical to the un-grown / fused network.
struct GrowthState {
    int active_depth = 0;
    double alpha = 1.0;
    bool fading = false;
};

// Activation record from one forward pass; feeds the matching backward pass.
template <typename T>
struct TapeT {
    std::uint64_t revision = 0;           // must equal the network's revision
    std::vector<T> input;                 // [z; x]
    std::vector<std::vector<T>> in;       // input vector seen by each affine layer
    std::vector<std::vector<T>> act;      // post-relu output of each hidden layer
    T pre_out = T(0);                     // final pre-tanh scalar
    T f = T(0);
};

// Gradients of one scalar output w.r.t. every parameter and the inputs.
// backward() accumulates, so a micro-batch can sum into one bundle.
template <typename T>
struct GradBundleT {
    std::vector<std::vector<T>> dW, db;  // mirror the live layers
    std::vector<T> dz;
    T dx[3] = {T(0), T(0), T(0)};

    void zero();

    // scratch reused across backward calls; one bundle per thread
    std::vector<T> cur_, prev_, pre_, du_;
};

// Feed-forward SDF decoder: input [z; x], relu hidden layers, tanh output.
// When built with depth >= 5, the fourth hidden layer narrows to
// hidden_width - (latent_dim + 3) and its output is re-concatenated with the
// raw input. grow() inserts a fresh hidden layer right before the output
// layer and fades it in as a residual block.
template <typename T>
class MlpNetworkT {
public:
    static constexpr int kSkipLayer = 3;  // 0-based index of the narrowed layer
    static constexpr int kMaxDepth = 8;   // affine layers at full size

    using Tape = TapeT<T>;
    using GradBundle = GradBundleT<T>;

    static MlpNetworkT init(int latent_dim, int hidden_width, int initial_depth,
                            std::uint64_t seed);

    int latent_dim() const { return latent_dim_; }
    int hidden_width() const { return hidden_width_; }
    int input_dim() const { return latent_dim_ + 3; }
    int depth() const { return growth_.active_depth; }
    const GrowthState& growth() const { return growth_; }
    bool skip_enabled() const { return skip_enabled_; }
    std::uint64_t revision() const { return revision_; }

    std::vector<AffineT<T>>& layers() { return layers_; }
    const std::vector<AffineT<T>>& layers() const { return layers_; }

    // f = tanh(final affine); tape records what backward needs
    T forward(const T* z, const T* x3, TapeT<T>& tape) const;
    T forward(const T* z, const T* x3) const;

    // d(upstream * f)/d(params, z, x) accumulated into `out`
    void backward(const TapeT<T>& tape, T upstream, GradBundleT<T>& out) const;

    // Same propagation, but only out.dz (and out.dx) are written; the
    // parameter outer products are skipped. Latent-only fitting uses this —
    // it is roughly half the work of the full backward.
    void backward_z(const TapeT<T>& tape, T upstream, GradBundleT<T>& out) const;

    void grow(std::uint64_t seed);     // throws std::logic_error at max depth
    void set_alpha(double alpha);      // fuses the layer when alpha reaches 1

    void size_bundle(GradBundleT<T>& g) const;  // resize + zero to mirror layers
    std::size_t parameter_count() const;

    // direct state access for checkpoint IO; bumps the revision
    void restore(std::vector<AffineT<T>> layers, GrowthState g, bool skip_enabled);

private:
    int latent_dim_ = 0, hidden_width_ = 0;
    bool skip_enabled_ = false;
    GrowthState growth_;
    std::vector<AffineT<T>> layers_;
    std::uint64_t revision_ = 0;

    int fade_layer() const { return growth_.active_depth - 2; }
    void check_dims() const;
};

using MlpNetwork = MlpNetworkT<float>;

// Per-shape latent codes, drawn from N(0, stddev^2), deterministic per seed.
std::vector<std::vector<float>> make_latent_codes(std::size_t count, int dim,
                                                  std::uint64_t seed, float stddev = 0.01f);

} // namespace sdfkit
