#include "sdfkit/train/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "sdfkit/kern/kernels.hpp"

namespace sdfkit {

void adam_step(float* p, const float* g, std::size_t n, AdamTensor& st, float lr,
               const AdamConfig& cfg) {
    if (st.m.empty()) {
        st.m.assign(n, 0.0f);
        st.v.assign(n, 0.0f);
    }
    if (st.m.size() != n || st.v.size() != n)
        throw std::logic_error("adam: state size does not match parameter tensor");
    ++st.t;
    const float inv_bc1 = float(1.0 / (1.0 - std::pow(double(cfg.beta1), double(st.t))));
    const float inv_bc2 = float(1.0 / (1.0 - std::pow(double(cfg.beta2), double(st.t))));
    kern::ops().adam_step_f32(p, st.m.data(), st.v.data(), g, int(n), lr, cfg.beta1, cfg.beta2,
                              cfg.eps, inv_bc1, inv_bc2);
}

void sgd_step(float* p, const float* g, std::size_t n, float lr) {
    kern::ops().axpy_f32(p, -lr, g, int(n));
}

} // namespace sdfkit
