#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "simcrit/tstats.hpp"

namespace simcrit {

struct ControlSpec {
    enum class Method { fdtp, fdr, kfwer };
    enum class Dependence { dependent, independent };

    Method method = Method::fdr;
    double gamma = 0.05;  // significance level for all three rules
    double alpha = 0.1;   // FDP proportion (fdtp only)
    int k = 1;            // tolerated false rejections (kfwer only)
    Dependence dependence = Dependence::dependent;

    void validate() const;
};

// Result of a threshold search. t_hat empty means no threshold satisfies the
// rule on this data (no rejection).
struct CriticalValue {
    std::optional<double> t_hat;
    ControlSpec spec;
    double pi1_used = 0.0;
    std::size_t m = 0;
    bool degenerate = false;   // kfwer: criterion already met at t = 0
    bool pi1_clipped = false;  // fdtp: pi1 was outside (0, 1 - alpha)
    // Scanned candidates where a repair in tau^2 was load-bearing: the a(t)
    // clamp rescued a sign-flipped variance, or the 1e-12 floor bound.
    int clamp_activations = 0;
    int floor_activations = 0;
    std::vector<std::pair<double, double>> path;  // (t, criterion value)
};

// nu_m(t) = alpha * phat(t) - 2 (1 - pi1) * normal_tail(t)
double nu_m(const TStatVector& tv, double pi1, double alpha, double t);

// Variance proxy for the dependent case. The alternative-mass term
// a(t) = phat(t) - 2(1-pi1)*normal_tail(t) estimates pi1*F1(t) in [0, pi1];
// sampling noise can leave that range and flip the sign, so a(t) is clamped
// before use and the result is floored at 1e-12.
double tau_sq_dependent(const TStatVector& tv, double pi1, double alpha, double t);

// Variance proxy under fully independent tests.
double tau_sq_independent(const TStatVector& tv, double pi1, double alpha, double t);

// Smallest candidate t with sqrt(m) * nu_m(t) / tau_m(t) >= z_gamma.
CriticalValue critical_fdtp(const TStatVector& tv, double pi1, double alpha,
                            double gamma,
                            ControlSpec::Dependence dep = ControlSpec::Dependence::dependent);

// Smallest candidate t with 2 (1 - pi1) * normal_tail(t) / phat(t) <= gamma.
CriticalValue critical_fdr(const TStatVector& tv, double pi1, double gamma);

// Smallest t >= 0 with P(Poisson(2 m (1 - pi1) normal_tail(t)) >= k) <= gamma,
// found by bisection; depends on the data only through m and pi1.
CriticalValue critical_kfwer(std::size_t m, double pi1, int k, double gamma);

// Ground-truth model for validation: hidden labels plus the standardized
// location shifts of the alternatives (sqrt(n) mu/sigma, or (mu-nu)/B for
// two-sample designs).
struct OracleModel {
    std::vector<std::uint8_t> labels;  // 1 = alternative
    std::vector<double> deltas;        // one entry per alternative, label order
    std::size_t m0 = 0, m1 = 0;

    static OracleModel from_labels(const std::vector<std::uint8_t>& labels,
                                   std::vector<double> deltas);
    // F0(t) = 2 * normal_tail(t); F1(t) averages the two-sided shifted tails.
    double f0(double t) const;
    double f1(double t) const;
};

// Threshold from the population-level rules with known m0, m1, F0, F1;
// coarse scan then bisection to 1e-8.
CriticalValue oracle_critical(const OracleModel& model, const ControlSpec& spec);

struct DecisionSet {
    std::vector<std::uint8_t> rejected;  // aligned with tv.stats; flagged = 0
    std::size_t num_rejected = 0;
};

// rejected[i] = valid[i] && |T_i| >= t_hat; empty set when t_hat is absent.
DecisionSet reject(const TStatVector& tv, const CriticalValue& cv);

}  // namespace simcrit
