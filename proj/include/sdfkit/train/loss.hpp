#pragma once
#include <cmath>
#include <stdexcept>

namespace sdfkit {

// Loss knobs for one training stage: clamp bound, tolerance band, and the
// hard/easy re-weighting strength. delta stays fixed; epsilon and lambda are
// driven by the curriculum schedule.
template <typename T>
struct LossConfigT {
    T delta = T(0.1);
    T epsilon = T(0);
    T lambda = T(0);

    void validate() const {
        if (!(delta > T(0))) throw std::invalid_argument("loss: delta must be > 0");
        if (!(epsilon >= T(0))) throw std::invalid_argument("loss: epsilon must be >= 0");
        if (!(lambda >= T(0)) || lambda >= T(1))
            throw std::invalid_argument("loss: lambda must lie in [0, 1)");
    }
};

using LossConfig = LossConfigT<double>;

// min(delta, max(-delta, s))
template <typename T>
inline T clamp_sdf(T s, T delta) {
    return s > delta ? delta : (s < -delta ? -delta : s);
}

// sign convention used throughout: sgn(0) = +1
template <typename T>
inline T sgn(T v) {
    return v >= T(0) ? T(1) : T(-1);
}

// |clamp(f) - clamp(s)|
template <typename T>
inline T loss_deepsdf(T f, T s, T delta) {
    T d = clamp_sdf(f, delta) - clamp_sdf(s, delta);
    return d < T(0) ? -d : d;
}

// max(|clamp(f) - clamp(s)| - epsilon, 0): errors inside the tolerance band are free
template <typename T>
inline T loss_tolerance(T f, T s, T delta, T epsilon) {
    T l = loss_deepsdf(f, s, delta) - epsilon;
    return l > T(0) ? l : T(0);
}

enum class SampleClass { Hard, SemiHard, Easy };

// Difficulty taxonomy on clamped values: wrong sign = hard; right sign but
// magnitude short of the target = semi-hard; the rest = easy.
template <typename T>
inline SampleClass classify_sample(T f_clamped, T s_clamped) {
    if (sgn(f_clamped) != sgn(s_clamped)) return SampleClass::Hard;
    T af = f_clamped < T(0) ? -f_clamped : f_clamped;
    T as = s_clamped < T(0) ? -s_clamped : s_clamped;
    return af < as ? SampleClass::SemiHard : SampleClass::Easy;
}

// 1 + lambda * sgn(s) * sgn(s - f), always one of {1-lambda, 1+lambda}.
// Treated as a detached constant: no gradient flows through the sign terms.
template <typename T>
inline T weight_factor(T f_clamped, T s_clamped, T lambda) {
    return T(1) + lambda * sgn(s_clamped) * sgn(s_clamped - f_clamped);
}

template <typename T>
inline T loss_curriculum(T f, T s, const LossConfigT<T>& cfg) {
    T fc = clamp_sdf(f, cfg.delta);
    T sc = clamp_sdf(s, cfg.delta);
    return weight_factor(fc, sc, cfg.lambda) * loss_tolerance(f, s, cfg.delta, cfg.epsilon);
}

// Subgradient of loss_curriculum w.r.t. the prediction f; 0 at every kink
// (clamp saturation boundary, hinge boundary). The weight factor is constant.
template <typename T>
inline T dloss_curriculum_df(T f, T s, const LossConfigT<T>& cfg) {
    if (f >= cfg.delta || f <= -cfg.delta) return T(0);  // clamp plateau (and its kinks)
    T fc = f;  // inside the clamp band
    T sc = clamp_sdf(s, cfg.delta);
    T diff = fc - sc;
    T ad = diff < T(0) ? -diff : diff;
    if (ad <= cfg.epsilon) return T(0);  // inside the tolerance band (and hinge kink)
    return weight_factor(fc, sc, cfg.lambda) * (diff > T(0) ? T(1) : T(-1));
}

} // namespace sdfkit
