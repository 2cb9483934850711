#pragma once

#include <cstdint>

// Special functions behind every rule in the library. All functions are pure
// and thread-safe; domain violations throw std::domain_error.
namespace simcrit::numerics {

struct Tolerance {
    double abs_tol = 1e-13;
    double rel_tol = 1e-12;
    int max_iter = 200;
};

// P(Z >= t) for standard normal Z. Computed as erfc(t/sqrt(2))/2, so the far
// tail keeps relative accuracy instead of cancelling against 1.
double normal_tail(double t);

// z with normal_tail(z) = gamma, gamma in (0,1). Monotone bisection on
// normal_tail down to tol.abs_tol (default well below 1e-9).
double normal_upper_quantile(double gamma, const Tolerance& tol = {});

// P(X >= k) for X ~ Poisson(lambda). Direct guarded summation for
// lambda <= 30, regularized incomplete gamma above. k = 0 returns 1.
double poisson_tail(double lambda, unsigned k);

// P(T >= t) for central Student t with df degrees of freedom (df >= 1, real
// so Welch-Satterthwaite values are usable). Regularized incomplete beta.
double student_t_tail(double t, double df);

// E[min(|Z|, c)]/c for standard normal Z, in closed form:
//   (2/(c*sqrt(2*pi))) * (1 - exp(-c^2/2)) + 2*normal_tail(c)
double expected_gc(double c);

namespace detail {
// Regularized incomplete gamma P(a, x) and incomplete beta I_x(a, b);
// exposed for the unit tests.
double gamma_p(double a, double x);
double ibeta(double a, double b, double x);
}  // namespace detail

}  // namespace simcrit::numerics
