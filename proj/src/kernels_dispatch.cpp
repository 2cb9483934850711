#include "simcrit/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace simcrit::kernels {

namespace {

Backend detect() {
    const char* force = std::getenv("SIMCRIT_KERNELS");
    if (force != nullptr) {
        if (std::strcmp(force, "scalar") == 0) return Backend::scalar;
#if defined(__x86_64__) || defined(_M_X64)
        if (std::strcmp(force, "avx2") == 0 && __builtin_cpu_supports("avx2"))
            return Backend::avx2;
#endif
#if defined(__aarch64__)
        if (std::strcmp(force, "neon") == 0) return Backend::neon;
#endif
        return Backend::scalar;  // unknown or unavailable value: fall back
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return Backend::avx2;
#endif
#if defined(__aarch64__)
    return Backend::neon;
#endif
    return Backend::scalar;
}

struct Table {
    double (*sum)(std::span<const double>);
    double (*sum_sq_dev)(std::span<const double>, double);
    double (*sum_min_clamped)(std::span<const double>, double);
    Backend backend;
};

Table make_table() {
    switch (detect()) {
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::avx2:
            return {&avx2::sum, &avx2::sum_sq_dev, &avx2::sum_min_clamped, Backend::avx2};
#endif
#if defined(__aarch64__)
        case Backend::neon:
            return {&neon::sum, &neon::sum_sq_dev, &neon::sum_min_clamped, Backend::neon};
#endif
        default:
            return {&scalar::sum, &scalar::sum_sq_dev, &scalar::sum_min_clamped,
                    Backend::scalar};
    }
}

const Table& table() {
    static const Table t = make_table();
    return t;
}

}  // namespace

Backend active_backend() { return table().backend; }

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

double sum(std::span<const double> x) { return table().sum(x); }
double sum_sq_dev(std::span<const double> x, double mean) {
    return table().sum_sq_dev(x, mean);
}
double sum_min_clamped(std::span<const double> x, double cap) {
    return table().sum_min_clamped(x, cap);
}

}  // namespace simcrit::kernels
