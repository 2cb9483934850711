#include "simcrit/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace simcrit::numerics {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2*pi)
}  // namespace

double normal_tail(double t) {
    if (!std::isfinite(t)) throw std::domain_error("normal_tail: non-finite t");
    return 0.5 * std::erfc(t / kSqrt2);
}

double normal_upper_quantile(double gamma, const Tolerance& tol) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("normal_upper_quantile: gamma must be in (0,1)");
    if (!(tol.abs_tol > 0.0) || tol.max_iter < 1)
        throw std::domain_error("normal_upper_quantile: bad tolerance");
    if (gamma == 0.5) return 0.0;
    const bool flip = gamma > 0.5;
    const double q = flip ? 1.0 - gamma : gamma;
    // normal_tail is strictly decreasing and the root lies in [0, 45] for
    // any representable q
    double lo = 0.0, hi = 45.0;
    for (int i = 0; i < tol.max_iter && hi - lo > tol.abs_tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_tail(mid) > q)
            lo = mid;
        else
            hi = mid;
    }
    const double z = 0.5 * (lo + hi);
    return flip ? -z : z;
}

namespace detail {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
// Series for x < a+1, Lentz continued fraction for the complement otherwise.
double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16)
                return sum * std::exp(-x + a * std::log(x) - lg);
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Q(a,x) via continued fraction, then P = 1 - Q.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

namespace {
double ibeta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h;
}
}  // namespace

// Regularized incomplete beta I_x(a, b).
double ibeta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0 || x < 0.0 || x > 1.0)
        throw std::domain_error("ibeta: bad arguments");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double lfront = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(lfront);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * ibeta_cf(a, b, x) / a;
    return 1.0 - front * ibeta_cf(b, a, 1.0 - x) / b;
}

}  // namespace detail

double poisson_tail(double lambda, unsigned k) {
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw std::domain_error("poisson_tail: lambda must be >= 0 and finite");
    if (k == 0) return 1.0;
    if (lambda == 0.0) return 0.0;
    if (lambda > 30.0) return detail::gamma_p(static_cast<double>(k), lambda);
    const double kd = static_cast<double>(k);
    if (kd > lambda) {
        // result may be tiny; sum the upper tail directly so it keeps
        // relative accuracy
        double term = std::exp(kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0));
        double sum = term;
        for (double j = kd; term > sum * 1e-18 && j < kd + 2000.0; j += 1.0) {
            term *= lambda / (j + 1.0);
            sum += term;
        }
        return sum;
    }
    // k <= lambda <= 30: 1 - P(X < k); the subtrahend is bounded away from 1
    double term = std::exp(-lambda);
    double sum = term;
    for (unsigned j = 1; j < k; ++j) {
        term *= lambda / static_cast<double>(j);
        sum += term;
    }
    return 1.0 - sum;
}

double student_t_tail(double t, double df) {
    if (!(df >= 1.0) || !std::isfinite(df))
        throw std::domain_error("student_t_tail: df must be >= 1");
    if (!std::isfinite(t)) throw std::domain_error("student_t_tail: non-finite t");
    if (t == 0.0) return 0.5;
    const double x = df / (df + t * t);
    const double half = 0.5 * detail::ibeta(0.5 * df, 0.5, x);
    return t > 0.0 ? half : 1.0 - half;
}

double expected_gc(double c) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::domain_error("expected_gc: c must be > 0");
    return (2.0 * kInvSqrt2Pi / c) * (-std::expm1(-0.5 * c * c)) + 2.0 * normal_tail(c);
}

}  // namespace simcrit::numerics
