#include "simcrit/pi1.hpp"

#include <cmath>
#include <stdexcept>

#include "simcrit/kernels.hpp"
#include "simcrit/numerics.hpp"

namespace simcrit {

double g_hat(const TStatVector& tv, double c) {
    if (!(c > 0.0)) throw std::domain_error("g_hat: c must be > 0");
    if (tv.num_valid == 0) throw std::domain_error("g_hat: no valid features");
    const double s = kernels::sum_min_clamped(tv.abs_sorted, c);
    return s / (c * static_cast<double>(tv.num_valid));
}

Pi1Estimate estimate_pi1(const TStatVector& tv, const GridSpec& grid) {
    if (tv.num_valid == 0) throw std::domain_error("estimate_pi1: no valid features");
    if (grid.points < 1) throw std::domain_error("estimate_pi1: empty grid");
    if (!(grid.c_min > 0.0) || !(grid.c_max >= grid.c_min))
        throw std::domain_error("estimate_pi1: bad grid bounds");

    Pi1Estimate est;
    est.grid.reserve(static_cast<std::size_t>(grid.points));
    const double log_lo = std::log(grid.c_min);
    const double log_hi = std::log(grid.c_max);
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid.points; ++j) {
        const double frac =
            grid.points == 1 ? 0.0 : static_cast<double>(j) / (grid.points - 1);
        const double c = std::exp(log_lo + frac * (log_hi - log_lo));
        const double gh = g_hat(tv, c);
        const double eg = numerics::expected_gc(c);
        const double ratio = (gh - eg) / (1.0 - eg);
        est.grid.push_back({c, gh, eg, ratio});
        if (ratio > best) {  // strict: ties keep the smallest c
            best = ratio;
            est.c_star = c;
        }
    }
    est.clamped = best < 0.0 || best > 1.0;
    est.pi1_hat = std::min(std::max(best, 0.0), 1.0);
    return est;
}

}  // namespace simcrit
