#include "sdfkit/kern/kernels.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace sdfkit::kern {

#if defined(SDFKIT_HAVE_AVX2_TU)
const Ops* avx2_ops_table();  // defined in kernels_avx2.cpp
#endif

const Ops* avx2_ops() {
#if defined(SDFKIT_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return avx2_ops_table();
#endif
    return nullptr;
}

namespace {

const Ops* select() {
    const char* want = std::getenv("SDFKIT_KERNEL");
    if (want && std::strcmp(want, "scalar") == 0) return &scalar_ops();
    if (want && std::strcmp(want, "avx2") == 0) {
        if (const Ops* t = avx2_ops()) return t;
        std::fprintf(stderr, "sdfkit: SDFKIT_KERNEL=avx2 requested but unavailable, using scalar\n");
        return &scalar_ops();
    }
    if (const Ops* t = avx2_ops()) return t;
    return &scalar_ops();
}

} // namespace

const Ops& ops() {
    static const Ops* selected = select();
    return *selected;
}

} // namespace sdfkit::kern
