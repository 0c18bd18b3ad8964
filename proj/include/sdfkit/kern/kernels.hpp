#pragma once
#include <cstddef>

namespace sdfkit::kern {

// Inner-loop kernels behind the network math, the optimizer and the point-set
// scans. The scalar table is the reference semantics; ISA variants must agree
// within round-off (equivalence-tested), except min_sqdist_f64 which is written
// to reproduce the scalar rounding bit-exactly in every variant.
struct Ops {
    const char* name;

    // y = W x + b, W row-major [rows x cols]
    void (*affine_f32)(const float* W, const float* b, const float* x, float* y,
                       int rows, int cols);
    // g += W^T u
    void (*matvec_t_acc_f32)(const float* W, const float* u, float* g,
                             int rows, int cols);
    // dW += u h^T (rank-1 accumulate)
    void (*outer_acc_f32)(float* dW, const float* u, const float* h,
                          int rows, int cols);
    // y += a x
    void (*axpy_f32)(float* y, float a, const float* x, int n);
    // fused adaptive-moment update with precomputed bias corrections:
    //   m = b1 m + (1-b1) g ; v = b2 v + (1-b2) g^2
    //   p -= lr (m inv_bc1) / (sqrt(v inv_bc2) + eps)
    void (*adam_step_f32)(float* p, float* m, float* v, const float* g, int n,
                          float lr, float beta1, float beta2, float eps,
                          float inv_bc1, float inv_bc2);
    // min over points of |q - p_i|^2, points given as SoA arrays
    double (*min_sqdist_f64)(double qx, double qy, double qz, const double* px,
                             const double* py, const double* pz, std::size_t n);
};

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when not compiled in or not supported by the CPU
// Selected at first use: AVX2 when available, overridable with SDFKIT_KERNEL=scalar|avx2.
const Ops& ops();

} // namespace sdfkit::kern
