// AVX2/FMA kernel variants. This TU is the only one built with -mavx2 -mfma;
// callers reach it through the dispatcher after a cpuid check.
#include "sdfkit/kern/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>

namespace sdfkit::kern {
namespace {

inline float hsum8(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 s = _mm_add_ps(lo, hi);
    s = _mm_add_ps(s, _mm_movehl_ps(s, s));
    s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 1));
    return _mm_cvtss_f32(s);
}

void affine_f32_avx2(const float* W, const float* b, const float* x, float* y,
                     int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        const float* w = W + std::size_t(r) * cols;
        __m256 acc0 = _mm256_setzero_ps();
        __m256 acc1 = _mm256_setzero_ps();
        int c = 0;
        for (; c + 16 <= cols; c += 16) {
            acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(w + c), _mm256_loadu_ps(x + c), acc0);
            acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(w + c + 8), _mm256_loadu_ps(x + c + 8), acc1);
        }
        for (; c + 8 <= cols; c += 8)
            acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(w + c), _mm256_loadu_ps(x + c), acc0);
        float acc = hsum8(_mm256_add_ps(acc0, acc1));
        for (; c < cols; ++c) acc += w[c] * x[c];
        y[r] = acc + b[r];
    }
}

void matvec_t_acc_f32_avx2(const float* W, const float* u, float* g,
                           int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        const float a = u[r];
        if (a == 0.0f) continue;
        const float* w = W + std::size_t(r) * cols;
        const __m256 va = _mm256_set1_ps(a);
        int c = 0;
        for (; c + 8 <= cols; c += 8) {
            __m256 gv = _mm256_loadu_ps(g + c);
            gv = _mm256_fmadd_ps(va, _mm256_loadu_ps(w + c), gv);
            _mm256_storeu_ps(g + c, gv);
        }
        for (; c < cols; ++c) g[c] += a * w[c];
    }
}

void outer_acc_f32_avx2(float* dW, const float* u, const float* h,
                        int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        const float a = u[r];
        if (a == 0.0f) continue;
        float* w = dW + std::size_t(r) * cols;
        const __m256 va = _mm256_set1_ps(a);
        int c = 0;
        for (; c + 8 <= cols; c += 8) {
            __m256 wv = _mm256_loadu_ps(w + c);
            wv = _mm256_fmadd_ps(va, _mm256_loadu_ps(h + c), wv);
            _mm256_storeu_ps(w + c, wv);
        }
        for (; c < cols; ++c) w[c] += a * h[c];
    }
}

void axpy_f32_avx2(float* y, float a, const float* x, int n) {
    const __m256 va = _mm256_set1_ps(a);
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 yv = _mm256_loadu_ps(y + i);
        yv = _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), yv);
        _mm256_storeu_ps(y + i, yv);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void adam_step_f32_avx2(float* p, float* m, float* v, const float* g, int n,
                        float lr, float beta1, float beta2, float eps,
                        float inv_bc1, float inv_bc2) {
    const __m256 vb1 = _mm256_set1_ps(beta1);
    const __m256 vb2 = _mm256_set1_ps(beta2);
    const __m256 v1mb1 = _mm256_set1_ps(1.0f - beta1);
    const __m256 v1mb2 = _mm256_set1_ps(1.0f - beta2);
    const __m256 vlr = _mm256_set1_ps(lr);
    const __m256 veps = _mm256_set1_ps(eps);
    const __m256 vbc1 = _mm256_set1_ps(inv_bc1);
    const __m256 vbc2 = _mm256_set1_ps(inv_bc2);
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 gv = _mm256_loadu_ps(g + i);
        __m256 mv = _mm256_loadu_ps(m + i);
        __m256 vv = _mm256_loadu_ps(v + i);
        mv = _mm256_fmadd_ps(vb1, mv, _mm256_mul_ps(v1mb1, gv));
        vv = _mm256_fmadd_ps(vb2, vv, _mm256_mul_ps(v1mb2, _mm256_mul_ps(gv, gv)));
        _mm256_storeu_ps(m + i, mv);
        _mm256_storeu_ps(v + i, vv);
        const __m256 mhat = _mm256_mul_ps(mv, vbc1);
        const __m256 vhat = _mm256_mul_ps(vv, vbc2);
        const __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(vhat), veps);
        const __m256 step = _mm256_div_ps(_mm256_mul_ps(vlr, mhat), denom);
        _mm256_storeu_ps(p + i, _mm256_sub_ps(_mm256_loadu_ps(p + i), step));
    }
    for (; i < n; ++i) {
        const float gi = g[i];
        m[i] = beta1 * m[i] + (1.0f - beta1) * gi;
        v[i] = beta2 * v[i] + (1.0f - beta2) * gi * gi;
        p[i] -= lr * (m[i] * inv_bc1) / (std::sqrt(v[i] * inv_bc2) + eps);
    }
}

// mul/add only (no fma): each lane evaluates (dx*dx + dy*dy) + dz*dz with the
// same rounding as the scalar reference, and min carries no rounding, so the
// result is bit-identical to the scalar scan.
double min_sqdist_f64_avx2(double qx, double qy, double qz, const double* px,
                           const double* py, const double* pz, std::size_t n) {
    const __m256d vqx = _mm256_set1_pd(qx);
    const __m256d vqy = _mm256_set1_pd(qy);
    const __m256d vqz = _mm256_set1_pd(qz);
    __m256d vbest = _mm256_set1_pd(1.0 / 0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(vqx, _mm256_loadu_pd(px + i));
        const __m256d dy = _mm256_sub_pd(vqy, _mm256_loadu_pd(py + i));
        const __m256d dz = _mm256_sub_pd(vqz, _mm256_loadu_pd(pz + i));
        const __m256d d = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
            _mm256_mul_pd(dz, dz));
        vbest = _mm256_min_pd(vbest, d);
    }
    double lanes[4];
    _mm256_storeu_pd(lanes, vbest);
    double best = lanes[0];
    for (int k = 1; k < 4; ++k)
        if (lanes[k] < best) best = lanes[k];
    for (; i < n; ++i) {
        const double dx = qx - px[i];
        const double dy = qy - py[i];
        const double dz = qz - pz[i];
        const double d = dx * dx + dy * dy + dz * dz;
        if (d < best) best = d;
    }
    return best;
}

} // namespace

const Ops* avx2_ops_table() {
    static const Ops table{
        "avx2",
        affine_f32_avx2,
        matvec_t_acc_f32_avx2,
        outer_acc_f32_avx2,
        axpy_f32_avx2,
        adam_step_f32_avx2,
        min_sqdist_f64_avx2,
    };
    return &table;
}

} // namespace sdfkit::kern

#else

namespace sdfkit::kern {
const Ops* avx2_ops_table() { return nullptr; }
} // namespace sdfkit::kern

#endif
