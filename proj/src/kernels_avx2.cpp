#if defined(__x86_64__) || defined(_M_X64)

#include "simcrit/kernels.hpp"

#include <immintrin.h>

// Lane j of the vector accumulator is exactly the scalar backend's partial
// sum a_j; the reduce order below matches the scalar ((a0+a1)+(a2+a3)).
namespace simcrit::kernels::avx2 {

namespace {
inline double reduce4(__m256d acc) {
    alignas(32) double a[4];
    _mm256_store_pd(a, acc);
    return (a[0] + a[1]) + (a[2] + a[3]);
}
}  // namespace

double sum(std::span<const double> x) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    const std::size_t n4 = x.size() & ~std::size_t(3);
    for (; i < n4; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
    }
    double tail = 0;
    for (; i < x.size(); ++i) tail += x[i];
    return reduce4(acc) + tail;
}

double sum_sq_dev(std::span<const double> x, double mean) {
    const __m256d mu = _mm256_set1_pd(mean);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    const std::size_t n4 = x.size() & ~std::size_t(3);
    for (; i < n4; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), mu);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double tail = 0;
    for (; i < x.size(); ++i) {
        const double d = x[i] - mean;
        tail += d * d;
    }
    return reduce4(acc) + tail;
}

double sum_min_clamped(std::span<const double> x, double cap) {
    const __m256d capv = _mm256_set1_pd(cap);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    const std::size_t n4 = x.size() & ~std::size_t(3);
    for (; i < n4; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_min_pd(_mm256_loadu_pd(x.data() + i), capv));
    }
    double tail = 0;
    for (; i < x.size(); ++i) tail += x[i] < cap ? x[i] : cap;
    return reduce4(acc) + tail;
}

}  // namespace simcrit::kernels::avx2

#endif  // x86_64
