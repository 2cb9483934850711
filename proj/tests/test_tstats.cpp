#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "simcrit/tstats.hpp"

using namespace simcrit;

namespace {

Dataset one_sample_data(std::vector<std::vector<double>> rows) {
    const std::size_t m = rows.size();
    const std::size_t n = rows[0].size();
    std::vector<double> values;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < m; ++i) {
        values.insert(values.end(), rows[i].begin(), rows[i].end());
        ids.push_back("f" + std::to_string(i));
    }
    return Dataset(m, n, std::move(values), std::move(ids));
}

Dataset two_sample_data(std::vector<double> g1_row, std::vector<double> g2_row) {
    std::vector<double> values = g1_row;
    values.insert(values.end(), g2_row.begin(), g2_row.end());
    std::vector<std::uint8_t> group(g1_row.size(), 0);
    group.insert(group.end(), g2_row.size(), 1);
    const std::size_t ncols = values.size();
    return Dataset(1, ncols, std::move(values), {"f0"}, std::move(group), {"a", "b"});
}

}  // namespace

TEST_CASE("one-sample worked examples") {
    const auto tv = one_sample_t(one_sample_data({{1, 2, 3}}));
    CHECK(tv.stats[0] == doctest::Approx(3.4641016).epsilon(1e-7));
    CHECK(tv.valid[0] == 1);
    CHECK(tv.df[0] == 2.0);

    const auto zero_mean = one_sample_t(one_sample_data({{-1, 1}}));
    CHECK(zero_mean.stats[0] == 0.0);

    const auto flat = one_sample_t(one_sample_data({{5, 5, 5, 5}}));
    CHECK(flat.valid[0] == 0);
    CHECK(std::isnan(flat.stats[0]));
    CHECK(flat.num_valid == 0);
}

TEST_CASE("two-sample worked examples") {
    const auto tv = two_sample_t(two_sample_data({0, 2}, {1, 3}));
    CHECK(tv.stats[0] == doctest::Approx(-0.7071068).epsilon(1e-7));

    const auto same = two_sample_t(two_sample_data({4, 7, 1}, {4, 7, 1}));
    CHECK(same.stats[0] == doctest::Approx(0.0));

    // one zero variance is legal
    const auto one_flat = two_sample_t(two_sample_data({1, 1}, {2, 4}));
    CHECK(one_flat.stats[0] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(one_flat.valid[0] == 1);
    CHECK(one_flat.df[0] == doctest::Approx(1.0).epsilon(1e-12));  // Welch collapses to n2-1

    const auto both_flat = two_sample_t(two_sample_data({1, 1}, {2, 2}));
    CHECK(both_flat.valid[0] == 0);
}

TEST_CASE("dataset validation") {
    CHECK_THROWS(Dataset(1, 1, {1.0}, {"f"}));                   // n < 2
    CHECK_THROWS(Dataset(1, 2, {1.0, std::nan("")}, {"f"}));     // non-finite
    CHECK_THROWS(Dataset(1, 2, {1.0, 2.0}, {"f", "extra"}));     // id count
    CHECK_THROWS(two_sample_data({1.0}, {2.0, 3.0}));            // group size < 2
}

TEST_CASE("invariance properties") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> row(8);
        for (auto& v : row) v = unif(gen);
        const double base = one_sample_t(one_sample_data({row})).stats[0];

        auto shuffled = row;
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        CHECK(one_sample_t(one_sample_data({shuffled})).stats[0] ==
              doctest::Approx(base).epsilon(1e-12));

        auto scaled = row;
        for (auto& v : scaled) v *= 7.25;
        CHECK(one_sample_t(one_sample_data({scaled})).stats[0] ==
              doctest::Approx(base).epsilon(1e-12));

        auto negated = row;
        for (auto& v : negated) v = -v;
        CHECK(one_sample_t(one_sample_data({negated})).stats[0] ==
              doctest::Approx(-base).epsilon(1e-12));
    }
}

TEST_CASE("empirical tail: worked examples and step structure") {
    const auto tv = one_sample_t(one_sample_data({
        {0, 2, 4},    // strongly positive
        {1, 1.5, 2},  // moderate
        {-4, -2, 0},  // strongly negative
    }));
    CHECK(empirical_tail(tv, 0.0) == 1.0);
    CHECK(empirical_tail(tv, 1e9) == 0.0);

    // direct-count oracle across a sweep, with the closed (>=) convention
    for (double t = 0.0; t < 8.0; t += 0.091) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < tv.size(); ++i)
            count += tv.valid[i] && std::fabs(tv.stats[i]) >= t;
        CHECK(empirical_tail(tv, t) ==
              doctest::Approx(static_cast<double>(count) / tv.num_valid));
    }

    // steps happen exactly at the candidate values: closed at the candidate,
    // lower immediately above, unchanged immediately below
    for (double c : candidate_thresholds(tv)) {
        const double at = empirical_tail(tv, c);
        CHECK(empirical_tail(tv, c - 1e-9) == doctest::Approx(at));
        CHECK(empirical_tail(tv, c + 1e-9) < at);
    }
}

TEST_CASE("candidate thresholds are unique, sorted, and tie-collapsed") {
    const auto tv = one_sample_t(one_sample_data({
        {1, 2, 3},
        {1, 2, 3},     // duplicate |T|
        {-1, -2, -3},  // same |T| again via negation
        {0, 1, -1},
    }));
    const auto cand = candidate_thresholds(tv);
    CHECK(std::is_sorted(cand.begin(), cand.end()));
    CHECK(std::adjacent_find(cand.begin(), cand.end()) == cand.end());
    CHECK(cand.size() == 2);  // the three duplicates collapse into one
}

TEST_CASE("t statistics match the 50-digit reference rows") {
    std::ifstream in(SIMCRIT_TEST_DATA "/tstat_reference.tsv");
    REQUIRE(in.good());
    std::string line;
    std::size_t checked = 0;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::vector<double> fields;
        std::string tok;
        while (std::getline(ss, tok, '\t')) fields.push_back(std::stod(tok));
        REQUIRE(fields.size() >= 3);
        const double expected = fields.back();
        fields.pop_back();
        const auto tv = one_sample_t(one_sample_data({fields}));
        CHECK(std::fabs(tv.stats[0] - expected) <= 1e-10 * std::fabs(expected));
        ++checked;
    }
    CHECK(checked == 1000);
}
