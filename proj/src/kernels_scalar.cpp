#include "simcrit/kernels.hpp"

#include <algorithm>

namespace simcrit::kernels::scalar {

double sum(std::span<const double> x) {
    double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    std::size_t i = 0;
    const std::size_t n4 = x.size() & ~std::size_t(3);
    for (; i < n4; i += 4) {
        a0 += x[i];
        a1 += x[i + 1];
        a2 += x[i + 2];
        a3 += x[i + 3];
    }
    double tail = 0;
    for (; i < x.size(); ++i) tail += x[i];
    return ((a0 + a1) + (a2 + a3)) + tail;
}

double sum_sq_dev(std::span<const double> x, double mean) {
    double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    std::size_t i = 0;
    const std::size_t n4 = x.size() & ~std::size_t(3);
    for (; i < n4; i += 4) {
        const double d0 = x[i] - mean;
        const double d1 = x[i + 1] - mean;
        const double d2 = x[i + 2] - mean;
        const double d3 = x[i + 3] - mean;
        a0 += d0 * d0;
        a1 += d1 * d1;
        a2 += d2 * d2;
        a3 += d3 * d3;
    }
    double tail = 0;
    for (; i < x.size(); ++i) {
        const double d = x[i] - mean;
        tail += d * d;
    }
    return ((a0 + a1) + (a2 + a3)) + tail;
}

double sum_min_clamped(std::span<const double> x, double cap) {
    double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    std::size_t i = 0;
    const std::size_t n4 = x.size() & ~std::size_t(3);
    for (; i < n4; i += 4) {
        a0 += std::min(x[i], cap);
        a1 += std::min(x[i + 1], cap);
        a2 += std::min(x[i + 2], cap);
        a3 += std::min(x[i + 3], cap);
    }
    double tail = 0;
    for (; i < x.size(); ++i) tail += std::min(x[i], cap);
    return ((a0 + a1) + (a2 + a3)) + tail;
}

}  // namespace simcrit::kernels::scalar
