#pragma once
#include <cstdint>
#include <vector>

namespace sdfkit {

// First/second-moment state for one parameter tensor.
struct AdamTensor {
    std::vector<float> m, v;
    std::uint64_t t = 0;
};

struct AdamConfig {
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;
};

// Bias-corrected adaptive-moment update, p -= lr * m_hat / (sqrt(v_hat) + eps).
// Sizes state lazily on first use.
void adam_step(float* p, const float* g, std::size_t n, AdamTensor& st, float lr,
               const AdamConfig& cfg = {});

// Plain gradient step, p -= lr * g (ablation path).
void sgd_step(float* p, const float* g, std::size_t n, float lr);

} // namespace sdfkit
