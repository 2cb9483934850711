#pragma once

#include <cstddef>
#include <span>

// Data-parallel reduction kernels for the per-feature inner loops.
//
// Every backend (scalar, AVX2, NEON) accumulates into four stride-4 partial
// sums and reduces them as ((a0+a1)+(a2+a3)) + tail, and the kernel sources
// are compiled with FP contraction off, so all backends produce bit-identical
// results. The equivalence tests assert exact equality, not a tolerance.
namespace simcrit::kernels {

enum class Backend { scalar, avx2, neon };

// Backend chosen at startup: best available unless the SIMCRIT_KERNELS
// environment variable ("scalar" | "avx2" | "neon") forces one.
Backend active_backend();
const char* backend_name(Backend b);

// sum of x_i
double sum(std::span<const double> x);
// sum of (x_i - mean)^2
double sum_sq_dev(std::span<const double> x, double mean);
// sum of min(x_i, cap); intended for nonnegative x
double sum_min_clamped(std::span<const double> x, double cap);

namespace scalar {
double sum(std::span<const double> x);
double sum_sq_dev(std::span<const double> x, double mean);
double sum_min_clamped(std::span<const double> x, double cap);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double sum(std::span<const double> x);
double sum_sq_dev(std::span<const double> x, double mean);
double sum_min_clamped(std::span<const double> x, double cap);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double sum(std::span<const double> x);
double sum_sq_dev(std::span<const double> x, double mean);
double sum_min_clamped(std::span<const double> x, double cap);
}  // namespace neon
#endif

}  // namespace simcrit::kernels
