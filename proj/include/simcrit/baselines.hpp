#pragma once

#include <span>
#include <utility>
#include <vector>

#include "simcrit/critical.hpp"
#include "simcrit/tstats.hpp"

namespace simcrit {

// Two-sided p-values for the baseline procedures. Features with an undefined
// statistic get p = 1 (counted in num_flagged).
struct PValueVector {
    enum class Source { student_t, normal };
    std::vector<double> p;
    Source source = Source::student_t;
    std::size_t num_flagged = 0;
};

PValueVector p_values(const TStatVector& tv, PValueVector::Source source);

// Step-up rule: r = max{i in {0,...,m+1} : p_(i) <= gamma i/m} with
// p_(0) = 0 and p_(m+1) = 1; rejects every p_i <= p_(r).
DecisionSet bh_procedure(const PValueVector& pv, double gamma);

struct QValueResult {
    double pi0_hat = 1.0;
    std::vector<double> q;
    std::vector<std::pair<double, double>> lambda_grid;  // (lambda, pi0(lambda))
};

inline constexpr double kDefaultLambdaGrid[] = {
    0.00, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45,
    0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};

// pi0(lambda) = #{p_i > lambda}/(m (1-lambda)) over the grid, smoothed by a
// cubic smoothing spline tuned to 3 effective degrees of freedom and
// extrapolated to lambda = 1; clamped to [1/m, 1]. q is left empty.
QValueResult storey_pi0(const PValueVector& pv,
                        std::span<const double> lambdas = kDefaultLambdaGrid);

// Step-up minimum q_(i) = min_{j>=i} pi0 * m * p_(j) / j, capped at 1,
// mapped back to input order. lambda_grid is left empty.
QValueResult q_values(const PValueVector& pv, double pi0);

// Convenience: storey_pi0 + q_values composed.
QValueResult storey_q_values(const PValueVector& pv);

namespace detail {
// Natural cubic smoothing spline with the smoothing parameter tuned so that
// trace(smoother) == target_df; returns the fit evaluated at x_eval (linear
// extrapolation beyond the last knot). Exposed for tests.
double smooth_spline_eval(std::span<const double> x, std::span<const double> y,
                          double target_df, double x_eval);
}  // namespace detail

}  // namespace simcrit
