#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "reference_tables.hpp"
#include "simcrit/critical.hpp"
#include "simcrit/numerics.hpp"
#include "simcrit/rng.hpp"

using namespace simcrit;

namespace {

TStatVector make_tv(std::vector<double> stats) {
    TStatVector tv;
    tv.stats = std::move(stats);
    tv.valid.assign(tv.stats.size(), 1);
    tv.df.assign(tv.stats.size(), 10.0);
    tv.design = {DesignKind::one_sample, 11, 0, 0};
    for (double s : tv.stats) tv.abs_sorted.push_back(std::fabs(s));
    std::sort(tv.abs_sorted.begin(), tv.abs_sorted.end());
    tv.num_valid = tv.abs_sorted.size();
    return tv;
}

}  // namespace

TEST_CASE("nu_m worked examples") {
    // t = 0: alpha - (1 - pi1)
    const auto tv = make_tv({1, -2, 3, -4});
    CHECK(nu_m(tv, 0.3, 0.1, 0.0) == doctest::Approx(0.1 - 0.7));
    // both terms vanish far out in the tail
    CHECK(nu_m(tv, 0.3, 0.1, 39.0) == doctest::Approx(0.0).epsilon(1e-12));
    // plug-in arithmetic: phat = 0.5, pb = 0.1 at matching t
    // alpha*phat - 2(1-pi1)*pb = 0.05 - 0.16 = -0.11
    const double t_half = 2.5;  // |T| = 3,4 of 4 are >= 2.5, so phat = 0.5
    const double pb = numerics::normal_tail(t_half);
    const double expect = 0.1 * 0.5 - 2.0 * (1.0 - 0.2) * pb;
    CHECK(nu_m(tv, 0.2, 0.1, t_half) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("tau_sq_dependent: clamp and floor behavior") {
    // Constructed so phat(t) = 0.9 at t = 1 and the raw alternative mass
    // 0.9 - 2*0.8*pb exceeds pi1 = 0.2 whenever pb is small; pick t where
    // the clamp must activate and verify the plugged-in arithmetic.
    std::vector<double> stats;
    for (int i = 0; i < 9; ++i) stats.push_back(2.0);
    stats.push_back(0.5);
    const auto tv = make_tv(std::move(stats));  // phat(1.0) = 0.9
    const double t = 1.0;
    const double pb = numerics::normal_tail(t);
    const double expected =
        0.0 + 2.0 * (1.0 - 0.1) * (1.0 - 0.1) * 0.8 * pb * (1.0 - 2.0 * pb);
    CHECK(tau_sq_dependent(tv, 0.2, 0.1, t) == doctest::Approx(expected).epsilon(1e-12));

    // far tail: everything vanishes, floor applies
    CHECK(tau_sq_dependent(tv, 0.2, 0.1, 39.0) == doctest::Approx(1e-12));
    // alpha = 1 kills the second term; with a = 0 the whole value floors
    CHECK(tau_sq_dependent(make_tv({0.1, 0.2}), 0.5, 1.0, 35.0) ==
          doctest::Approx(1e-12));
    CHECK_THROWS_AS(tau_sq_dependent(tv, 0.0, 0.1, 1.0), std::domain_error);
}

TEST_CASE("tau_sq_independent worked example") {
    // phat = 0.5, pi1 = 0.2, alpha = 0.1 at a t where pb = normal_tail(t):
    // alpha^2 phat (1-phat) + 4 alpha (1-pi1) phat pb
    //   + 2 (1-pi1) pb (1 - 2 alpha - 2 (1-pi1) pb)
    const auto tv = make_tv({1, -2, 3, -4});
    const double t = 2.5;  // phat = 0.5 here
    const double pb = numerics::normal_tail(t);
    const double expected = 0.01 * 0.25 + 0.4 * 0.8 * 0.5 * pb +
                            2.0 * 0.8 * pb * (1.0 - 0.2 - 1.6 * pb);
    CHECK(tau_sq_independent(tv, 0.2, 0.1, t) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(tau_sq_independent(tv, 0.2, 0.1, 39.0) == doctest::Approx(1e-12));
}

TEST_CASE("critical_fdr: worked example") {
    const auto tv = make_tv({5, 4, 0.5, 0.2});
    const auto cv = critical_fdr(tv, 0.5, 0.05);
    REQUIRE(cv.t_hat.has_value());
    CHECK(*cv.t_hat == doctest::Approx(4.0));
    // path records the non-qualifying candidates scanned on the way
    REQUIRE(cv.path.size() == 3);
    CHECK(cv.path[0].second == doctest::Approx(0.4207).epsilon(1e-3));
    CHECK(cv.path[1].second == doctest::Approx(0.4113).epsilon(1e-3));

    const auto ds = reject(tv, cv);
    CHECK(ds.num_rejected == 2);

    // a loose level rejects at the smallest candidate
    const auto loose = critical_fdr(tv, 0.5, 0.999);
    CHECK(*loose.t_hat == doctest::Approx(0.2));
}

TEST_CASE("critical_fdr: monotone in gamma") {
    rng::Stream s(7, 0);
    std::vector<double> stats(400);
    for (auto& v : stats) v = s.normal() + (s.bernoulli(0.3) ? 3.0 : 0.0);
    const auto tv = make_tv(std::move(stats));
    double prev = 1e300;
    for (double g : {0.01, 0.05, 0.1, 0.2, 0.4}) {
        const auto cv = critical_fdr(tv, 0.3, g);
        const double t = cv.t_hat.value_or(1e301);  // no-rejection sorts above all
        CHECK(t <= prev);
        prev = t;
    }
}

TEST_CASE("critical_fdr: pure-null data mostly yields no rejection") {
    int no_rejection = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        rng::Stream s(1234, trial);
        std::vector<double> stats(100);
        for (auto& v : stats) v = s.normal();
        const auto est_pi1 = 0.0;  // honest null: nothing to find
        const auto cv = critical_fdr(make_tv(std::move(stats)), est_pi1, 0.01);
        no_rejection += !cv.t_hat.has_value();
    }
    CHECK(no_rejection >= trials * 95 / 100);
}

TEST_CASE("critical_fdtp: all-negative criterion yields no rejection") {
    rng::Stream s(99, 0);
    std::vector<double> stats(200);
    for (auto& v : stats) v = s.normal();
    const auto cv = critical_fdtp(make_tv(std::move(stats)), 0.05, 0.05, 0.01);
    CHECK_FALSE(cv.t_hat.has_value());
    CHECK(cv.path.size() == 200);  // full scan recorded
}

TEST_CASE("critical_fdtp: pi1 outside (0, 1-alpha) is clipped and surfaced") {
    rng::Stream s(5, 1);
    std::vector<double> stats(300);
    for (auto& v : stats) v = s.normal() + 4.0;
    const auto tv = make_tv(std::move(stats));
    const auto cv = critical_fdtp(tv, 0.99, 0.1, 0.1);
    CHECK(cv.pi1_clipped);
    CHECK(cv.pi1_used == doctest::Approx(1.0 - 0.1 - 1e-4));
    const auto ok = critical_fdtp(tv, 0.5, 0.1, 0.1);
    CHECK_FALSE(ok.pi1_clipped);
    CHECK_THROWS_AS(critical_fdtp(make_tv({1.0}), 0.2, 0.1, 0.1), std::domain_error);
}

TEST_CASE("critical_kfwer: frozen example and degenerate cases") {
    const auto cv = critical_kfwer(10000, 0.0, 10, 0.05);
    REQUIRE(cv.t_hat.has_value());
    CHECK(*cv.t_hat == doctest::Approx(refs::kKfwerExampleT).epsilon(1e-6));
    CHECK_FALSE(cv.degenerate);

    const auto all_alt = critical_kfwer(10000, 1.0, 10, 0.05);
    CHECK(*all_alt.t_hat == 0.0);
    CHECK(all_alt.degenerate);

    CHECK_THROWS_AS(critical_kfwer(100, 0.2, 0, 0.05), std::domain_error);
}

TEST_CASE("critical_kfwer: monotonicities") {
    const double base = *critical_kfwer(10000, 0.2, 10, 0.05).t_hat;
    CHECK(*critical_kfwer(10000, 0.2, 1, 0.05).t_hat >= base);    // smaller k: stricter
    CHECK(*critical_kfwer(10000, 0.2, 10, 0.2).t_hat < base);     // looser gamma
    CHECK(*critical_kfwer(100000, 0.2, 10, 0.05).t_hat > base);   // more tests
    // re-evaluating the criterion at t_hat satisfies the rule
    const double theta = 2.0 * 10000 * 0.8 * numerics::normal_tail(base);
    CHECK(numerics::poisson_tail(theta, 10) <= 0.05 + 1e-9);
}

TEST_CASE("oracle_critical: closed-form FDR inversion at extreme separation") {
    std::vector<std::uint8_t> labels(200);
    std::vector<double> deltas;
    for (int i = 0; i < 100; ++i) labels[i] = 1;
    deltas.assign(100, 1e9);
    const auto model = OracleModel::from_labels(labels, deltas);
    ControlSpec spec;
    spec.method = ControlSpec::Method::fdr;
    spec.gamma = 0.05;
    const auto cv = oracle_critical(model, spec);
    REQUIRE(cv.t_hat.has_value());
    CHECK(*cv.t_hat == doctest::Approx(refs::kOracleFdrExampleT).epsilon(1e-6));
}

TEST_CASE("oracle_critical: indistinguishable alternatives") {
    // delta = 0 makes F1 == F0, the ratio is constantly m0/m
    std::vector<std::uint8_t> labels(100);
    for (int i = 0; i < 40; ++i) labels[i] = 1;
    const auto model = OracleModel::from_labels(labels, std::vector<double>(40, 0.0));
    ControlSpec spec;
    spec.method = ControlSpec::Method::fdr;

    spec.gamma = 0.5;  // m0/m = 0.6 > 0.5: never satisfied
    CHECK_FALSE(oracle_critical(model, spec).t_hat.has_value());

    spec.gamma = 0.7;  // m0/m = 0.6 <= 0.7: satisfied everywhere
    const auto cv = oracle_critical(model, spec);
    CHECK(cv.t_hat.has_value());
    CHECK(*cv.t_hat == doctest::Approx(0.0));
}

TEST_CASE("oracle_critical: k-FWER matches the data-free rule when pi1 is exact") {
    std::vector<std::uint8_t> labels(5000);
    for (int i = 0; i < 1000; ++i) labels[i] = 1;  // pi1 = 0.2
    const auto model = OracleModel::from_labels(labels, std::vector<double>(1000, 3.0));
    ControlSpec spec;
    spec.method = ControlSpec::Method::kfwer;
    spec.gamma = 0.05;
    spec.k = 10;
    const auto via_oracle = oracle_critical(model, spec);
    const auto via_rule = critical_kfwer(5000, 0.2, 10, 0.05);
    REQUIRE(via_oracle.t_hat.has_value());
    REQUIRE(via_rule.t_hat.has_value());
    CHECK(*via_oracle.t_hat == doctest::Approx(*via_rule.t_hat).epsilon(1e-6));
}

TEST_CASE("oracle_critical: FDTP/FDR need alternatives") {
    std::vector<std::uint8_t> labels(50, 0);
    const auto model = OracleModel::from_labels(labels, {});
    ControlSpec spec;
    spec.method = ControlSpec::Method::fdr;
    spec.gamma = 0.1;
    CHECK_THROWS_AS(oracle_critical(model, spec), std::domain_error);
}

TEST_CASE("tau^2 repair counters fire on pathological inputs") {
    // Strong signal with a grossly underestimated pi1: at thresholds beyond
    // the null bulk, a(t) ~ 0.5 >> pi1 and the unclamped first term
    // alpha^2 a (1 - a/pi1) turns the variance negative, so the clamp is
    // load-bearing and must be counted.
    std::vector<double> stats;
    for (int i = 0; i < 100; ++i) stats.push_back(8.0 + 0.01 * i);
    for (int i = 0; i < 100; ++i) stats.push_back(0.1 + 0.001 * i);
    const auto cv = critical_fdtp(make_tv(std::move(stats)), 0.01, 0.5, 0.4);
    CHECK(cv.clamp_activations > 0);

    // well-behaved input: no repairs needed
    rng::Stream s(21, 0);
    std::vector<double> clean(2000);
    for (auto& v : clean) v = s.normal() + (s.bernoulli(0.2) ? 9.0 : 0.0);
    const auto ok = critical_fdtp(make_tv(std::move(clean)), 0.2, 0.1, 0.1);
    CHECK(ok.clamp_activations == 0);
    CHECK(ok.floor_activations == 0);
}

TEST_CASE("reject: sentinel and boundary conventions") {
    const auto tv = make_tv({5, 4, 0.5, 0.2});
    CriticalValue cv;
    cv.t_hat = 0.0;
    CHECK(reject(tv, cv).num_rejected == 4);
    cv.t_hat.reset();
    CHECK(reject(tv, cv).num_rejected == 0);
    cv.t_hat = 4.0;  // closed threshold: |T| == t_hat is rejected
    CHECK(reject(tv, cv).num_rejected == 2);
}

TEST_CASE("fdr/fdtp scans return members of the candidate set and satisfy the rule") {
    rng::Stream s(2024, 3);
    std::vector<double> stats(500);
    for (auto& v : stats) v = s.normal() + (s.bernoulli(0.25) ? 2.5 : 0.0);
    const auto tv = make_tv(std::move(stats));
    const auto cand = candidate_thresholds(tv);

    const auto fdr = critical_fdr(tv, 0.25, 0.2);
    REQUIRE(fdr.t_hat.has_value());
    CHECK(std::binary_search(cand.begin(), cand.end(), *fdr.t_hat));
    CHECK(2.0 * (1.0 - 0.25) * numerics::normal_tail(*fdr.t_hat) /
              empirical_tail(tv, *fdr.t_hat) <=
          0.2);

    const auto fdtp = critical_fdtp(tv, 0.25, 0.1, 0.1);
    REQUIRE(fdtp.t_hat.has_value());
    CHECK(std::binary_search(cand.begin(), cand.end(), *fdtp.t_hat));
    const double t = *fdtp.t_hat;
    const double crit = std::sqrt(500.0) * nu_m(tv, 0.25, 0.1, t) /
                        std::sqrt(tau_sq_dependent(tv, 0.25, 0.1, t));
    CHECK(crit >= numerics::normal_upper_quantile(0.1));
}
