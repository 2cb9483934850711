#if defined(__aarch64__)

#include "simcrit/kernels.hpp"

#include <arm_neon.h>

// Two float64x2 registers hold the four stride-4 partial sums: acc0 lanes
// are a0,a1 and acc1 lanes are a2,a3. Reduce order matches the scalar
// backend: (a0+a1)+(a2+a3).
namespace simcrit::kernels::neon {

double sum(std::span<const double> x) {
    float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    const std::size_t n4 = x.size() & ~std::size_t(3);
    for (; i < n4; i += 4) {
        acc0 = vaddq_f64(acc0, vld1q_f64(x.data() + i));
        acc1 = vaddq_f64(acc1, vld1q_f64(x.data() + i + 2));
    }
    double tail = 0;
    for (; i < x.size(); ++i) tail += x[i];
    return ((vgetq_lane_f64(acc0, 0) + vgetq_lane_f64(acc0, 1)) +
            (vgetq_lane_f64(acc1, 0) + vgetq_lane_f64(acc1, 1))) + tail;
}

double sum_sq_dev(std::span<const double> x, double mean) {
    const float64x2_t mu = vdupq_n_f64(mean);
    float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    const std::size_t n4 = x.size() & ~std::size_t(3);
    for (; i < n4; i += 4) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(x.data() + i), mu);
        const float64x2_t d1 = vsubq_f64(vld1q_f64(x.data() + i + 2), mu);
        acc0 = vaddq_f64(acc0, vmulq_f64(d0, d0));
        acc1 = vaddq_f64(acc1, vmulq_f64(d1, d1));
    }
    double tail = 0;
    for (; i < x.size(); ++i) {
        const double d = x[i] - mean;
        tail += d * d;
    }
    return ((vgetq_lane_f64(acc0, 0) + vgetq_lane_f64(acc0, 1)) +
            (vgetq_lane_f64(acc1, 0) + vgetq_lane_f64(acc1, 1))) + tail;
}

double sum_min_clamped(std::span<const double> x, double cap) {
    const float64x2_t capv = vdupq_n_f64(cap);
    float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    const std::size_t n4 = x.size() & ~std::size_t(3);
    for (; i < n4; i += 4) {
        acc0 = vaddq_f64(acc0, vminq_f64(vld1q_f64(x.data() + i), capv));
        acc1 = vaddq_f64(acc1, vminq_f64(vld1q_f64(x.data() + i + 2), capv));
    }
    double tail = 0;
    for (; i < x.size(); ++i) tail += x[i] < cap ? x[i] : cap;
    return ((vgetq_lane_f64(acc0, 0) + vgetq_lane_f64(acc0, 1)) +
            (vgetq_lane_f64(acc1, 0) + vgetq_lane_f64(acc1, 1))) + tail;
}

}  // namespace simcrit::kernels::neon

#endif  // __aarch64__
