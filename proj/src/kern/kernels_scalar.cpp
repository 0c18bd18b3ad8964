#include "sdfkit/kern/kernels.hpp"

#include <cmath>

namespace sdfkit::kern {
namespace {

void affine_f32_scalar(const float* W, const float* b, const float* x, float* y,
                       int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        const float* w = W + std::size_t(r) * cols;
        float acc = 0.0f;
        for (int c = 0; c < cols; ++c) acc += w[c] * x[c];
        y[r] = acc + b[r];
    }
}

void matvec_t_acc_f32_scalar(const float* W, const float* u, float* g,
                             int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        const float a = u[r];
        if (a == 0.0f) continue;
        const float* w = W + std::size_t(r) * cols;
        for (int c = 0; c < cols; ++c) g[c] += a * w[c];
    }
}

void outer_acc_f32_scalar(float* dW, const float* u, const float* h,
                          int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        const float a = u[r];
        if (a == 0.0f) continue;
        float* w = dW + std::size_t(r) * cols;
        for (int c = 0; c < cols; ++c) w[c] += a * h[c];
    }
}

void axpy_f32_scalar(float* y, float a, const float* x, int n) {
    for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

void adam_step_f32_scalar(float* p, float* m, float* v, const float* g, int n,
                          float lr, float beta1, float beta2, float eps,
                          float inv_bc1, float inv_bc2) {
    for (int i = 0; i < n; ++i) {
        const float gi = g[i];
        m[i] = beta1 * m[i] + (1.0f - beta1) * gi;
        v[i] = beta2 * v[i] + (1.0f - beta2) * gi * gi;
        const float mhat = m[i] * inv_bc1;
        const float vhat = v[i] * inv_bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

double min_sqdist_f64_scalar(double qx, double qy, double qz, const double* px,
                             const double* py, const double* pz, std::size_t n) {
    double best = 1.0 / 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = qx - px[i];
        const double dy = qy - py[i];
        const double dz = qz - pz[i];
        const double d = dx * dx + dy * dy + dz * dz;
        if (d < best) best = d;
    }
    return best;
}

} // namespace

const Ops& scalar_ops() {
    static const Ops table{
        "scalar",
        affine_f32_scalar,
        matvec_t_acc_f32_scalar,
        outer_acc_f32_scalar,
        axpy_f32_scalar,
        adam_step_f32_scalar,
        min_sqdist_f64_scalar,
    };
    return table;
}

} // namespace sdfkit::kern
