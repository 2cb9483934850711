#include "simcrit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "simcrit/numerics.hpp"

namespace simcrit {

PValueVector p_values(const TStatVector& tv, PValueVector::Source source) {
    PValueVector pv;
    pv.source = source;
    pv.p.assign(tv.size(), 1.0);
    for (std::size_t i = 0; i < tv.size(); ++i) {
        if (!tv.valid[i]) {
            ++pv.num_flagged;
            continue;
        }
        const double abs_t = std::fabs(tv.stats[i]);
        const double tail = source == PValueVector::Source::student_t
                                ? numerics::student_t_tail(abs_t, tv.df[i])
                                : numerics::normal_tail(abs_t);
        pv.p[i] = std::min(2.0 * tail, 1.0);
    }
    return pv;
}

DecisionSet bh_procedure(const PValueVector& pv, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("bh_procedure: gamma must be in (0,1)");
    const std::size_t m = pv.p.size();
    DecisionSet ds;
    ds.rejected.assign(m, 0);
    if (m == 0) return ds;

    std::vector<double> sorted = pv.p;
    std::sort(sorted.begin(), sorted.end());

    const double md = static_cast<double>(m);
    // r = max{i : p_(i) <= gamma i/m}; i = m+1 uses p_(m+1) = 1, i = 0 always
    // holds via the p_(0) = 0 sentinel (r = 0 means reject nothing).
    std::size_t r = 0;
    if (1.0 <= gamma * (md + 1.0) / md) {
        r = m + 1;
    } else {
        for (std::size_t i = m; i >= 1; --i) {
            if (sorted[i - 1] <= gamma * static_cast<double>(i) / md) {
                r = i;
                break;
            }
        }
    }
    if (r == 0) return ds;
    const double thresh = r == m + 1 ? 1.0 : sorted[r - 1];
    for (std::size_t i = 0; i < m; ++i) {
        if (pv.p[i] <= thresh) {
            ds.rejected[i] = 1;
            ++ds.num_rejected;
        }
    }
    return ds;
}

namespace detail {

// Reinsch form: penalized fit f = (I + lam * K)^-1 y with K = D' W^-1 D,
// D the second-difference matrix and W the overlap matrix of the natural
// spline basis. Small dense systems (the lambda grid has ~20 knots), solved
// with Gaussian elimination with partial pivoting.
namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix identity(std::size_t n) {
    Matrix I(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) I[i][i] = 1.0;
    return I;
}

// Solves A X = B in place; returns X. A is destroyed.
Matrix solve(Matrix a, Matrix b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        const double diag = a[col][col];
        if (diag == 0.0) throw std::runtime_error("smooth_spline: singular system");
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / diag;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            for (std::size_t c = 0; c < b[r].size(); ++c) b[r][c] -= f * b[col][c];
        }
    }
    for (std::size_t r = 0; r < n; ++r) {
        const double diag = a[r][r];
        for (auto& v : b[r]) v /= diag;
    }
    return b;
}

struct ReinschSystem {
    Matrix K;              // n x n penalty
    Matrix W;              // (n-2) x (n-2)
    Matrix D;              // (n-2) x n
    std::vector<double> h; // knot spacings
};

ReinschSystem build_system(std::span<const double> x) {
    const std::size_t n = x.size();
    ReinschSystem s;
    s.h.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        s.h[i] = x[i + 1] - x[i];
        if (!(s.h[i] > 0.0))
            throw std::invalid_argument("smooth_spline: knots must be increasing");
    }
    s.D.assign(n - 2, std::vector<double>(n, 0.0));
    s.W.assign(n - 2, std::vector<double>(n - 2, 0.0));
    for (std::size_t i = 0; i < n - 2; ++i) {
        s.D[i][i] = 1.0 / s.h[i];
        s.D[i][i + 1] = -1.0 / s.h[i] - 1.0 / s.h[i + 1];
        s.D[i][i + 2] = 1.0 / s.h[i + 1];
        s.W[i][i] = (s.h[i] + s.h[i + 1]) / 3.0;
        if (i + 1 < n - 2) s.W[i][i + 1] = s.W[i + 1][i] = s.h[i + 1] / 6.0;
    }
    // K = D' W^-1 D
    Matrix winv_d = solve(s.W, s.D);
    s.K.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < n - 2; ++r) acc += s.D[r][i] * winv_d[r][j];
            s.K[i][j] = acc;
        }
    return s;
}

Matrix smoother_inverse_arg(const Matrix& K, double lam) {
    const std::size_t n = K.size();
    Matrix a(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i][j] = (i == j ? 1.0 : 0.0) + lam * K[i][j];
    return a;
}

double smoother_trace(const Matrix& K, double lam) {
    Matrix s = solve(smoother_inverse_arg(K, lam), identity(K.size()));
    double tr = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) tr += s[i][i];
    return tr;
}

}  // namespace

double smooth_spline_eval(std::span<const double> x, std::span<const double> y,
                          double target_df, double x_eval) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 4)
        throw std::invalid_argument("smooth_spline: need >= 4 points");

    // Degenerate data: the penalized fit of a constant is that constant.
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    if (*ymax - *ymin < 1e-12) return *ymin;

    const ReinschSystem sys = build_system(x);

    // trace(S) decreases monotonically from n to 2 in lambda; bisect log10.
    double llo = -12.0, lhi = 12.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (llo + lhi);
        if (smoother_trace(sys.K, std::pow(10.0, mid)) > target_df)
            llo = mid;
        else
            lhi = mid;
    }
    const double lam = std::pow(10.0, 0.5 * (llo + lhi));

    // fitted values f, then the interior second derivatives W g = D f
    Matrix ycol(n, std::vector<double>(1));
    for (std::size_t i = 0; i < n; ++i) ycol[i][0] = y[i];
    Matrix f = solve(smoother_inverse_arg(sys.K, lam), std::move(ycol));

    Matrix rhs(n - 2, std::vector<double>(1, 0.0));
    for (std::size_t i = 0; i < n - 2; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += sys.D[i][j] * f[j][0];
        rhs[i][0] = acc;
    }
    Matrix wcopy(n - 2, std::vector<double>(n - 2));
    for (std::size_t i = 0; i < n - 2; ++i)
        for (std::size_t j = 0; j < n - 2; ++j) wcopy[i][j] = sys.W[i][j];
    Matrix g = solve(std::move(wcopy), std::move(rhs));  // M_2 .. M_{n-1}

    // Natural spline: M_1 = M_n = 0. Evaluate (or extrapolate linearly)
    // at x_eval from the last segment; that covers the x_eval >= x_n use.
    const double h_last = sys.h[n - 2];
    const double m_prev = g[n - 3][0];  // M_{n-1}
    const double fn = f[n - 1][0], fn1 = f[n - 2][0];
    if (x_eval >= x[n - 1]) {
        const double slope = (fn - fn1) / h_last + h_last * m_prev / 6.0;
        return fn + slope * (x_eval - x[n - 1]);
    }
    // interior evaluation (used by tests): find the segment
    std::size_t seg = 0;
    while (seg + 2 < n && x[seg + 1] < x_eval) ++seg;
    const double h = sys.h[seg];
    const double ma = seg == 0 ? 0.0 : g[seg - 1][0];
    const double mb = seg + 1 == n - 1 ? 0.0 : g[seg][0];
    const double a = (x[seg + 1] - x_eval) / h;
    const double b = (x_eval - x[seg]) / h;
    return a * f[seg][0] + b * f[seg + 1][0] +
           ((a * a * a - a) * ma + (b * b * b - b) * mb) * h * h / 6.0;
}

}  // namespace detail

QValueResult storey_pi0(const PValueVector& pv, std::span<const double> lambdas) {
    if (lambdas.size() < 4)
        throw std::domain_error("storey_pi0: need >= 4 lambda grid points");
    for (double l : lambdas)
        if (l < 0.0 || l > 0.95)
            throw std::domain_error("storey_pi0: lambda grid must lie in [0, 0.95]");
    const std::size_t m = pv.p.size();
    if (m == 0) throw std::domain_error("storey_pi0: empty p-value vector");

    QValueResult out;
    std::vector<double> xs(lambdas.begin(), lambdas.end());
    std::vector<double> ys;
    ys.reserve(xs.size());
    for (double l : xs) {
        std::size_t count = 0;
        for (double p : pv.p) count += p > l;
        const double v = static_cast<double>(count) / (static_cast<double>(m) * (1.0 - l));
        ys.push_back(v);
        out.lambda_grid.emplace_back(l, v);
    }
    const double fit = detail::smooth_spline_eval(xs, ys, 3.0, 1.0);
    out.pi0_hat = std::min(std::max(fit, 1.0 / static_cast<double>(m)), 1.0);
    return out;
}

QValueResult q_values(const PValueVector& pv, double pi0) {
    if (!(pi0 > 0.0 && pi0 <= 1.0))
        throw std::domain_error("q_values: pi0 must be in (0, 1]");
    const std::size_t m = pv.p.size();
    QValueResult out;
    out.pi0_hat = pi0;
    out.q.assign(m, 1.0);
    if (m == 0) return out;

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pv.p[a] < pv.p[b]; });
    const double md = static_cast<double>(m);
    double running = 1.0;
    for (std::size_t i = m; i >= 1; --i) {
        const std::size_t idx = order[i - 1];
        running = std::min(running, pi0 * md * pv.p[idx] / static_cast<double>(i));
        out.q[idx] = running;
    }
    return out;
}

QValueResult storey_q_values(const PValueVector& pv) {
    QValueResult pi0 = storey_pi0(pv);
    QValueResult out = q_values(pv, pi0.pi0_hat);
    out.lambda_grid = std::move(pi0.lambda_grid);
    return out;
}

}  // namespace simcrit
