#include "simcrit/critical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "simcrit/numerics.hpp"

namespace simcrit {

using numerics::normal_tail;
using numerics::normal_upper_quantile;
using numerics::poisson_tail;

namespace {
constexpr double kTauFloor = 1e-12;
}

void ControlSpec::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("ControlSpec: gamma must be in (0,1)");
    if (method == Method::fdtp && !(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("ControlSpec: alpha must be in (0,1)");
    if (method == Method::kfwer && k < 1)
        throw std::domain_error("ControlSpec: k must be >= 1");
}

double nu_m(const TStatVector& tv, double pi1, double alpha, double t) {
    return alpha * empirical_tail(tv, t) - 2.0 * (1.0 - pi1) * normal_tail(t);
}

namespace {

double tau_sq_dependent_impl(double phat, double pb, double pi1, double alpha,
                             int* clamped, int* floored) {
    const double second =
        2.0 * (1.0 - alpha) * (1.0 - alpha) * (1.0 - pi1) * pb * (1.0 - 2.0 * pb);
    const double a_raw = phat - 2.0 * (1.0 - pi1) * pb;
    const double a = std::min(std::max(a_raw, 0.0), pi1);
    double tau2 = alpha * alpha * a * (1.0 - a / pi1) + second;
    // The clamp repairs a sampling-noise sign flip; count it only when it is
    // load-bearing, i.e. the unclamped formula would not have produced a
    // usable variance.
    if (a != a_raw && clamped != nullptr) {
        const double unrepaired = alpha * alpha * a_raw * (1.0 - a_raw / pi1) + second;
        if (unrepaired < kTauFloor) ++*clamped;
    }
    if (tau2 < kTauFloor) {
        tau2 = kTauFloor;
        if (floored != nullptr) ++*floored;
    }
    return tau2;
}

double tau_sq_independent_impl(double phat, double pb, double pi1, double alpha,
                               int* floored) {
    double tau2 = alpha * alpha * phat * (1.0 - phat) +
                  4.0 * alpha * (1.0 - pi1) * phat * pb +
                  2.0 * (1.0 - pi1) * pb * (1.0 - 2.0 * alpha - 2.0 * (1.0 - pi1) * pb);
    if (tau2 < kTauFloor) {
        tau2 = kTauFloor;
        if (floored != nullptr) ++*floored;
    }
    return tau2;
}

}  // namespace

double tau_sq_dependent(const TStatVector& tv, double pi1, double alpha, double t) {
    if (!(pi1 > 0.0)) throw std::domain_error("tau_sq_dependent: pi1 must be > 0");
    return tau_sq_dependent_impl(empirical_tail(tv, t), normal_tail(t), pi1, alpha,
                                 nullptr, nullptr);
}

double tau_sq_independent(const TStatVector& tv, double pi1, double alpha, double t) {
    return tau_sq_independent_impl(empirical_tail(tv, t), normal_tail(t), pi1, alpha,
                                   nullptr);
}

CriticalValue critical_fdtp(const TStatVector& tv, double pi1, double alpha,
                            double gamma, ControlSpec::Dependence dep) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("critical_fdtp: alpha and gamma must be in (0,1)");
    if (tv.num_valid < 2)
        throw std::domain_error("critical_fdtp: need at least 2 valid features");

    CriticalValue cv;
    cv.spec = {ControlSpec::Method::fdtp, gamma, alpha, 1, dep};
    cv.m = tv.num_valid;

    // The variance formula needs 0 < pi1 < 1 - alpha; estimates outside that
    // range are clipped here (and the clip surfaced to the caller).
    double p = pi1;
    const double p_lo = 1e-4, p_hi = 1.0 - alpha - 1e-4;
    if (p < p_lo || p > p_hi) {
        p = std::min(std::max(p, p_lo), p_hi);
        cv.pi1_clipped = true;
    }
    cv.pi1_used = p;

    const double z_gamma = normal_upper_quantile(gamma);
    const double sqrt_m = std::sqrt(static_cast<double>(tv.num_valid));
    const bool dependent = dep == ControlSpec::Dependence::dependent;

    for (double t : candidate_thresholds(tv)) {
        const double phat = empirical_tail(tv, t);
        const double pb = normal_tail(t);
        const double nu = alpha * phat - 2.0 * (1.0 - p) * pb;
        const double tau2 =
            dependent
                ? tau_sq_dependent_impl(phat, pb, p, alpha, &cv.clamp_activations,
                                        &cv.floor_activations)
                : tau_sq_independent_impl(phat, pb, p, alpha, &cv.floor_activations);
        const double crit = sqrt_m * nu / std::sqrt(tau2);
        cv.path.emplace_back(t, crit);
        if (crit >= z_gamma) {
            cv.t_hat = t;
            return cv;
        }
    }
    return cv;  // no rejection
}

CriticalValue critical_fdr(const TStatVector& tv, double pi1, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("critical_fdr: gamma must be in (0,1)");
    if (tv.num_valid == 0)
        throw std::domain_error("critical_fdr: no valid features");

    CriticalValue cv;
    cv.spec = {ControlSpec::Method::fdr, gamma, 0.0, 1, ControlSpec::Dependence::dependent};
    cv.pi1_used = pi1;
    cv.m = tv.num_valid;

    for (double t : candidate_thresholds(tv)) {
        const double phat = empirical_tail(tv, t);
        if (phat <= 0.0) continue;  // no discoveries at t: rule not certifiable
        const double ratio = 2.0 * (1.0 - pi1) * normal_tail(t) / phat;
        cv.path.emplace_back(t, ratio);
        if (ratio <= gamma) {
            cv.t_hat = t;
            return cv;
        }
    }
    return cv;
}

CriticalValue critical_kfwer(std::size_t m, double pi1, int k, double gamma) {
    if (k < 1) throw std::domain_error("critical_kfwer: k must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("critical_kfwer: gamma must be in (0,1)");
    if (m == 0) throw std::domain_error("critical_kfwer: m must be positive");

    CriticalValue cv;
    cv.spec = {ControlSpec::Method::kfwer, gamma, 0.0, k,
               ControlSpec::Dependence::dependent};
    cv.pi1_used = pi1;
    cv.m = m;

    const double scale = 2.0 * static_cast<double>(m) * (1.0 - pi1);
    const auto crit = [&](double t) {
        return poisson_tail(scale * normal_tail(t), static_cast<unsigned>(k));
    };

    const double at0 = crit(0.0);
    cv.path.emplace_back(0.0, at0);
    if (at0 <= gamma) {  // already satisfied with no thresholding
        cv.t_hat = 0.0;
        cv.degenerate = true;
        return cv;
    }
    double lo = 0.0, hi = 40.0;  // crit is nonincreasing and -> 0
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        const double v = crit(mid);
        cv.path.emplace_back(mid, v);
        if (v <= gamma)
            hi = mid;
        else
            lo = mid;
    }
    cv.t_hat = hi;
    return cv;
}

OracleModel OracleModel::from_labels(const std::vector<std::uint8_t>& labels,
                                     std::vector<double> deltas) {
    OracleModel m;
    m.labels = labels;
    m.deltas = std::move(deltas);
    for (auto h : labels) (h ? m.m1 : m.m0)++;
    if (m.deltas.size() != m.m1)
        throw std::invalid_argument("OracleModel: one delta per alternative required");
    return m;
}

double OracleModel::f0(double t) const { return 2.0 * normal_tail(t); }

double OracleModel::f1(double t) const {
    if (m1 == 0) return 0.0;
    double s = 0.0;
    for (double d : deltas) s += normal_tail(t - d) + normal_tail(t + d);
    return s / static_cast<double>(m1);
}

CriticalValue oracle_critical(const OracleModel& model, const ControlSpec& spec) {
    spec.validate();
    if (model.m0 + model.m1 == 0) throw std::domain_error("oracle_critical: empty model");
    if (model.m1 == 0 && spec.method != ControlSpec::Method::kfwer)
        throw std::domain_error("oracle_critical: FDTP/FDR need m1 > 0");

    const double m0 = static_cast<double>(model.m0);
    const double m1 = static_cast<double>(model.m1);

    // satisfied(t) is monotone past the criterion's unique sign change for
    // each of the three rules; locate a bracket with a coarse scan, then
    // bisect.
    std::function<bool(double)> satisfied;
    const double z_gamma = spec.method == ControlSpec::Method::fdtp
                               ? normal_upper_quantile(spec.gamma)
                               : 0.0;
    switch (spec.method) {
        case ControlSpec::Method::fdtp:
            satisfied = [&, z_gamma](double t) {
                const double f0 = model.f0(t), f1 = model.f1(t);
                const double mu = spec.alpha * m1 * f1 - (1.0 - spec.alpha) * m0 * f0;
                const double s2 =
                    spec.alpha * spec.alpha * m1 * f1 * (1.0 - f1) +
                    (1.0 - spec.alpha) * (1.0 - spec.alpha) * m0 * f0 * (1.0 - f0);
                // a vanished variance with positive drift is +infinity;
                // with no drift there is nothing to certify
                if (s2 <= 0.0) return mu > 0.0;
                return mu / std::sqrt(s2) >= z_gamma;
            };
            break;
        case ControlSpec::Method::fdr:
            satisfied = [&](double t) {
                const double num = m0 * model.f0(t);
                const double den = num + m1 * model.f1(t);
                if (den <= 0.0) return false;  // no discoveries: nothing to certify
                return num / den <= spec.gamma;
            };
            break;
        case ControlSpec::Method::kfwer:
            satisfied = [&](double t) {
                return poisson_tail(m0 * model.f0(t), static_cast<unsigned>(spec.k)) <=
                       spec.gamma;
            };
            break;
    }

    CriticalValue cv;
    cv.spec = spec;
    cv.pi1_used = m1 / (m0 + m1);
    cv.m = model.m0 + model.m1;

    constexpr double t_max = 40.0;
    if (satisfied(0.0)) {
        cv.t_hat = 0.0;
        cv.degenerate = true;
        return cv;
    }
    // coarse ascending scan for the first satisfied point
    constexpr int kScanSteps = 400;
    double lo = 0.0, hi = -1.0;
    for (int j = 1; j <= kScanSteps; ++j) {
        const double t = t_max * static_cast<double>(j) / kScanSteps;
        if (satisfied(t)) {
            hi = t;
            lo = t_max * static_cast<double>(j - 1) / kScanSteps;
            break;
        }
    }
    if (hi < 0.0) return cv;  // never satisfied up to t_max: no rejection
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (satisfied(mid))
            hi = mid;
        else
            lo = mid;
    }
    cv.t_hat = hi;
    return cv;
}

DecisionSet reject(const TStatVector& tv, const CriticalValue& cv) {
    DecisionSet ds;
    ds.rejected.assign(tv.size(), 0);
    if (!cv.t_hat.has_value()) return ds;
    const double t = *cv.t_hat;
    for (std::size_t i = 0; i < tv.size(); ++i) {
        if (tv.valid[i] && std::fabs(tv.stats[i]) >= t) {
            ds.rejected[i] = 1;
            ++ds.num_rejected;
        }
    }
    return ds;
}

}  // namespace simcrit
