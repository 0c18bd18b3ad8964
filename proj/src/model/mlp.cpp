#include "sdfkit/model/mlp.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <type_traits>

#include "sdfkit/kern/kernels.hpp"
#include "sdfkit/util/rng.hpp"

namespace sdfkit {

namespace {

// Float goes through the runtime-dispatched kernels; double uses plain loops
// with the same accumulation order as the scalar kernel table.
template <typename T>
void k_affine(const AffineT<T>& L, const T* x, T* y) {
    if constexpr (std::is_same_v<T, float>) {
        kern::ops().affine_f32(L.W.data(), L.b.data(), x, y, L.out, L.in);
    } else {
        for (int r = 0; r < L.out; ++r) {
            T acc = L.b[std::size_t(r)];
            const T* w = L.W.data() + std::size_t(r) * L.in;
            for (int c = 0; c < L.in; ++c) acc += w[c] * x[c];
            y[r] = acc;
        }
    }
}

template <typename T>
void k_matvec_t_acc(const T* W, const T* u, T* g, int rows, int cols) {
    if constexpr (std::is_same_v<T, float>) {
        kern::ops().matvec_t_acc_f32(W, u, g, rows, cols);
    } else {
        for (int r = 0; r < rows; ++r) {
            T ur = u[r];
            if (ur == T(0)) continue;
            const T* w = W + std::size_t(r) * cols;
            for (int c = 0; c < cols; ++c) g[c] += ur * w[c];
        }
    }
}

template <typename T>
void k_outer_acc(T* dW, const T* u, const T* h, int rows, int cols) {
    if constexpr (std::is_same_v<T, float>) {
        kern::ops().outer_acc_f32(dW, u, h, rows, cols);
    } else {
        for (int r = 0; r < rows; ++r) {
            T ur = u[r];
            if (ur == T(0)) continue;
            T* row = dW + std::size_t(r) * cols;
            for (int c = 0; c < cols; ++c) row[c] += ur * h[c];
        }
    }
}

template <typename T>
void k_axpy(T* y, T a, const T* x, int n) {
    if constexpr (std::is_same_v<T, float>) {
        kern::ops().axpy_f32(y, a, x, n);
    } else {
        for (int i = 0; i < n; ++i) y[i] += a * x[i];
    }
}

// in/out width of layer k in a depth-D network (I = latent_dim + 3, W = hidden width)
void layer_dims(int D, int I, int W, bool skip, int k, int& in, int& out) {
    in = (k == 0) ? I : W;
    if (k == D - 1)
        out = 1;
    else if (skip && k == MlpNetworkT<float>::kSkipLayer)
        out = W - I;
    else
        out = W;
}

} // namespace

template <typename T>
void GradBundleT<T>::zero() {
    for (auto& w : dW) std::fill(w.begin(), w.end(), T(0));
    for (auto& b : db) std::fill(b.begin(), b.end(), T(0));
    std::fill(dz.begin(), dz.end(), T(0));
    dx[0] = dx[1] = dx[2] = T(0);
}

template <typename T>
MlpNetworkT<T> MlpNetworkT<T>::init(int latent_dim, int hidden_width, int initial_depth,
                                    std::uint64_t seed) {
    if (latent_dim < 1 || hidden_width < 1)
        throw std::invalid_argument("mlp: latent_dim and hidden_width must be >= 1");
    if (initial_depth < 2 || initial_depth > kMaxDepth)
        throw std::invalid_argument("mlp: initial_depth must lie in [2, 8]");

    MlpNetworkT net;
    net.latent_dim_ = latent_dim;
    net.hidden_width_ = hidden_width;
    net.skip_enabled_ = initial_depth >= kSkipLayer + 2;  // layer 3 must be hidden
    const int I = net.input_dim();
    if (net.skip_enabled_ && hidden_width - I < 1)
        throw std::invalid_argument(
            "mlp: hidden_width must exceed latent_dim + 3 for the input re-concatenation");

    net.growth_ = {initial_depth, 1.0, false};
    net.layers_.resize(std::size_t(initial_depth));
    for (int k = 0; k < initial_depth; ++k) {
        AffineT<T>& L = net.layers_[std::size_t(k)];
        layer_dims(initial_depth, I, hidden_width, net.skip_enabled_, k, L.in, L.out);
        L.W.resize(std::size_t(L.in) * L.out);
        L.b.assign(std::size_t(L.out), T(0));
        Rng rng(derive_seed(seed, "layer", std::uint64_t(k)));
        // fan-in scaling: sqrt(2/in) before relu, sqrt(1/in) into the tanh output
        const double s = std::sqrt((k == initial_depth - 1 ? 1.0 : 2.0) / double(L.in));
        for (T& w : L.W) w = T(rng.normal() * s);
    }
    net.revision_ = 1;
    net.check_dims();
    return net;
}

template <typename T>
void MlpNetworkT<T>::check_dims() const {
    const int D = growth_.active_depth;
    if (int(layers_.size()) != D) throw std::logic_error("mlp: layer count != active depth");
    const int I = input_dim();
    for (int k = 0; k < D; ++k) {
        int in = 0, out = 0;
        layer_dims(D, I, hidden_width_, skip_enabled_, k, in, out);
        const AffineT<T>& L = layers_[std::size_t(k)];
        if (L.in != in || L.out != out || int(L.W.size()) != in * out || int(L.b.size()) != out)
            throw std::logic_error("mlp: layer " + std::to_string(k) + " has wrong shape");
    }
    if (growth_.fading && (growth_.alpha < 0.0 || growth_.alpha > 1.0))
        throw std::logic_error("mlp: alpha out of range");
    if (!growth_.fading && growth_.alpha != 1.0)
        throw std::logic_error("mlp: fused network must have alpha 1");
}

template <typename T>
T MlpNetworkT<T>::forward(const T* z, const T* x3, TapeT<T>& tape) const {
    const int D = growth_.active_depth;
    const int I = input_dim();
    tape.revision = revision_;
    tape.input.resize(std::size_t(I));
    std::memcpy(tape.input.data(), z, sizeof(T) * std::size_t(latent_dim_));
    std::memcpy(tape.input.data() + latent_dim_, x3, sizeof(T) * 3);

    tape.in.resize(std::size_t(D));
    tape.act.resize(std::size_t(D - 1));
    tape.in[0] = tape.input;

    const bool fade = growth_.fading;
    const int fl = fade_layer();
    const T alpha = T(growth_.alpha);

    for (int k = 0;; ++k) {
        const AffineT<T>& L = layers_[std::size_t(k)];
        std::vector<T>& in = tape.in[std::size_t(k)];
        if (int(in.size()) != L.in) throw std::logic_error("mlp forward: width mismatch");

        if (k == D - 1) {
            T t;
            k_affine(L, in.data(), &t);
            tape.pre_out = t;
            tape.f = std::tanh(t);
            return tape.f;
        }

        std::vector<T>& a = tape.act[std::size_t(k)];
        a.resize(std::size_t(L.out));
        k_affine(L, in.data(), a.data());
        for (T& v : a)
            if (!(v > T(0))) v = T(0);

        std::vector<T>& nxt = tape.in[std::size_t(k + 1)];
        if (skip_enabled_ && k == kSkipLayer) {
            nxt.resize(std::size_t(hidden_width_));
            std::memcpy(nxt.data(), a.data(), sizeof(T) * a.size());
            std::memcpy(nxt.data() + a.size(), tape.input.data(), sizeof(T) * std::size_t(I));
        } else if (fade && k == fl) {
            if (growth_.alpha == 0.0) {
                nxt = in;  // exact bypass: the new layer is invisible
            } else if (growth_.alpha == 1.0) {
                nxt = a;
            } else {
                nxt.resize(a.size());
                for (std::size_t j = 0; j < a.size(); ++j)
                    nxt[j] = alpha * a[j] + (T(1) - alpha) * in[j];
            }
        } else {
            nxt = a;
        }
    }
}

template <typename T>
T MlpNetworkT<T>::forward(const T* z, const T* x3) const {
    TapeT<T> tape;
    return forward(z, x3, tape);
}

template <typename T>
void MlpNetworkT<T>::size_bundle(GradBundleT<T>& g) const {
    g.dW.resize(layers_.size());
    g.db.resize(layers_.size());
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        g.dW[k].assign(layers_[k].W.size(), T(0));
        g.db[k].assign(layers_[k].b.size(), T(0));
    }
    g.dz.assign(std::size_t(latent_dim_), T(0));
    g.dx[0] = g.dx[1] = g.dx[2] = T(0);
}

template <typename T>
void MlpNetworkT<T>::backward(const TapeT<T>& tape, T upstream, GradBundleT<T>& g) const {
    if (tape.revision != revision_)
        throw std::logic_error("mlp backward: tape is stale (network changed since forward)");
    const int D = growth_.active_depth;
    const int I = input_dim();
    if (int(tape.in.size()) != D) throw std::logic_error("mlp backward: malformed tape");

    bool sized = int(g.dW.size()) == D && int(g.dz.size()) == latent_dim_;
    if (sized)
        for (int k = 0; k < D && sized; ++k)
            sized = g.dW[std::size_t(k)].size() == layers_[std::size_t(k)].W.size();
    if (!sized) size_bundle(g);

    const bool fade = growth_.fading;
    const int fl = fade_layer();
    const T alpha = T(growth_.alpha);

    g.du_.assign(std::size_t(I), T(0));

    // output layer: f = tanh(t), t = W_out v + b_out
    T dt = upstream * (T(1) - tape.f * tape.f);
    {
        const AffineT<T>& L = layers_[std::size_t(D - 1)];
        const std::vector<T>& v = tape.in[std::size_t(D - 1)];
        k_outer_acc(g.dW[std::size_t(D - 1)].data(), &dt, v.data(), 1, L.in);
        g.db[std::size_t(D - 1)][0] += dt;
        g.cur_.assign(std::size_t(L.in), T(0));
        k_matvec_t_acc(L.W.data(), &dt, g.cur_.data(), 1, L.in);
    }

    for (int k = D - 2; k >= 0; --k) {
        const AffineT<T>& L = layers_[std::size_t(k)];
        const std::vector<T>& in = tape.in[std::size_t(k)];
        const std::vector<T>& a = tape.act[std::size_t(k)];
        std::vector<T>& dcur = g.cur_;  // gradient w.r.t. this layer's (post-merge) output

        if (fade && k == fl && growth_.alpha == 0.0) {
            continue;  // bypass only: dcur flows through unchanged, no parameter grads
        }

        if (skip_enabled_ && k == kSkipLayer) {
            // dcur = [d_act (W-I) ; d_input (I)]
            for (int i = 0; i < I; ++i) g.du_[std::size_t(i)] += dcur[a.size() + std::size_t(i)];
            g.pre_.resize(a.size());
            for (std::size_t j = 0; j < a.size(); ++j)
                g.pre_[j] = a[j] > T(0) ? dcur[j] : T(0);
        } else if (fade && k == fl) {
            g.pre_.resize(a.size());
            if (growth_.alpha == 1.0) {
                for (std::size_t j = 0; j < a.size(); ++j)
                    g.pre_[j] = a[j] > T(0) ? dcur[j] : T(0);
            } else {
                for (std::size_t j = 0; j < a.size(); ++j)
                    g.pre_[j] = a[j] > T(0) ? alpha * dcur[j] : T(0);
            }
        } else {
            g.pre_.resize(a.size());
            for (std::size_t j = 0; j < a.size(); ++j)
                g.pre_[j] = a[j] > T(0) ? dcur[j] : T(0);
        }

        k_outer_acc(g.dW[std::size_t(k)].data(), g.pre_.data(), in.data(), L.out, L.in);
        k_axpy(g.db[std::size_t(k)].data(), T(1), g.pre_.data(), L.out);

        g.prev_.assign(std::size_t(L.in), T(0));
        k_matvec_t_acc(L.W.data(), g.pre_.data(), g.prev_.data(), L.out, L.in);
        if (fade && k == fl && growth_.alpha != 1.0)
            k_axpy(g.prev_.data(), T(1) - alpha, dcur.data(), L.in);

        std::swap(g.cur_, g.prev_);
    }

    for (int i = 0; i < I; ++i) g.du_[std::size_t(i)] += g.cur_[std::size_t(i)];
    for (int i = 0; i < latent_dim_; ++i) g.dz[std::size_t(i)] += g.du_[std::size_t(i)];
    for (int i = 0; i < 3; ++i) g.dx[i] += g.du_[std::size_t(latent_dim_ + i)];
}

template <typename T>
void MlpNetworkT<T>::backward_z(const TapeT<T>& tape, T upstream, GradBundleT<T>& g) const {
    if (tape.revision != revision_)
        throw std::logic_error("mlp backward: tape is stale (network changed since forward)");
    const int D = growth_.active_depth;
    const int I = input_dim();
    if (int(tape.in.size()) != D) throw std::logic_error("mlp backward: malformed tape");
    if (int(g.dz.size()) != latent_dim_) g.dz.assign(std::size_t(latent_dim_), T(0));

    const bool fade = growth_.fading;
    const int fl = fade_layer();
    const T alpha = T(growth_.alpha);

    g.du_.assign(std::size_t(I), T(0));

    T dt = upstream * (T(1) - tape.f * tape.f);
    {
        const AffineT<T>& L = layers_[std::size_t(D - 1)];
        g.cur_.assign(std::size_t(L.in), T(0));
        k_matvec_t_acc(L.W.data(), &dt, g.cur_.data(), 1, L.in);
    }

    for (int k = D - 2; k >= 0; --k) {
        const AffineT<T>& L = layers_[std::size_t(k)];
        const std::vector<T>& a = tape.act[std::size_t(k)];
        std::vector<T>& dcur = g.cur_;

        if (fade && k == fl && growth_.alpha == 0.0) continue;

        if (skip_enabled_ && k == kSkipLayer) {
            for (int i = 0; i < I; ++i) g.du_[std::size_t(i)] += dcur[a.size() + std::size_t(i)];
            g.pre_.resize(a.size());
            for (std::size_t j = 0; j < a.size(); ++j)
                g.pre_[j] = a[j] > T(0) ? dcur[j] : T(0);
        } else if (fade && k == fl && growth_.alpha != 1.0) {
            g.pre_.resize(a.size());
            for (std::size_t j = 0; j < a.size(); ++j)
                g.pre_[j] = a[j] > T(0) ? alpha * dcur[j] : T(0);
        } else {
            g.pre_.resize(a.size());
            for (std::size_t j = 0; j < a.size(); ++j)
                g.pre_[j] = a[j] > T(0) ? dcur[j] : T(0);
        }

        g.prev_.assign(std::size_t(L.in), T(0));
        k_matvec_t_acc(L.W.data(), g.pre_.data(), g.prev_.data(), L.out, L.in);
        if (fade && k == fl && growth_.alpha != 1.0)
            k_axpy(g.prev_.data(), T(1) - alpha, dcur.data(), L.in);

        std::swap(g.cur_, g.prev_);
    }

    for (int i = 0; i < I; ++i) g.du_[std::size_t(i)] += g.cur_[std::size_t(i)];
    for (int i = 0; i < latent_dim_; ++i) g.dz[std::size_t(i)] += g.du_[std::size_t(i)];
    for (int i = 0; i < 3; ++i) g.dx[i] += g.du_[std::size_t(latent_dim_ + i)];
}

template <typename T>
void MlpNetworkT<T>::grow(std::uint64_t seed) {
    const int D = growth_.active_depth;
    if (D >= kMaxDepth)
        throw std::logic_error("mlp grow: already at max depth (" + std::to_string(kMaxDepth) + ")");
    if (growth_.fading)
        throw std::logic_error("mlp grow: previous layer still fading in");

    AffineT<T> L;
    L.in = hidden_width_;
    L.out = hidden_width_;
    L.W.resize(std::size_t(L.in) * L.out);
    L.b.assign(std::size_t(L.out), T(0));
    Rng rng(derive_seed(seed, "grow", std::uint64_t(D)));
    const double s = std::sqrt(2.0 / double(L.in));
    for (T& w : L.W) w = T(rng.normal() * s);

    layers_.insert(layers_.end() - 1, std::move(L));  // right before the output layer
    growth_ = {D + 1, 0.0, true};
    ++revision_;
    check_dims();
}

template <typename T>
void MlpNetworkT<T>::set_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("mlp set_alpha: alpha must lie in [0, 1]");
    if (!growth_.fading && alpha != 1.0)
        throw std::logic_error("mlp set_alpha: network is not fading");
    if (alpha == 1.0) {
        growth_.alpha = 1.0;
        growth_.fading = false;  // fused: residual bypass gone
    } else {
        growth_.alpha = alpha;
    }
    ++revision_;
}

template <typename T>
std::size_t MlpNetworkT<T>::parameter_count() const {
    std::size_t n = 0;
    for (const AffineT<T>& L : layers_) n += L.W.size() + L.b.size();
    return n;
}

template <typename T>
void MlpNetworkT<T>::restore(std::vector<AffineT<T>> layers, GrowthState gr, bool skip_enabled) {
    layers_ = std::move(layers);
    growth_ = gr;
    skip_enabled_ = skip_enabled;
    ++revision_;
    check_dims();
}

template class MlpNetworkT<float>;
template class MlpNetworkT<double>;
template struct GradBundleT<float>;
template struct GradBundleT<double>;

std::vector<std::vector<float>> make_latent_codes(std::size_t count, int dim, std::uint64_t seed,
                                                  float stddev) {
    std::vector<std::vector<float>> codes(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, "latent", i));
        codes[i].resize(std::size_t(dim));
        for (float& v : codes[i]) v = float(rng.normal()) * stddev;
    }
    return codes;
}

} // namespace sdfkit
