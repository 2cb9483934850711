#include "simcrit/tstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include "simcrit/kernels.hpp"

namespace simcrit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_common(std::size_t m, std::size_t ncols, const std::vector<double>& values,
                  const std::vector<std::string>& ids) {
    if (m < 1) throw std::invalid_argument("Dataset: need at least one feature");
    if (values.size() != m * ncols)
        throw std::invalid_argument("Dataset: values size does not match m x ncols");
    if (ids.size() != m)
        throw std::invalid_argument("Dataset: feature_ids size does not match m");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("Dataset: non-finite entry");
}

}  // namespace

Dataset::Dataset(std::size_t m, std::size_t n, std::vector<double> values,
                 std::vector<std::string> feature_ids)
    : m_(m), ncols_(n), values_(std::move(values)), feature_ids_(std::move(feature_ids)) {
    check_common(m_, ncols_, values_, feature_ids_);
    if (n < 2) throw std::invalid_argument("Dataset: one-sample design needs n >= 2");
    design_ = {DesignKind::one_sample, static_cast<int>(n), 0, 0};
}

Dataset::Dataset(std::size_t m, std::size_t ncols, std::vector<double> values,
                 std::vector<std::string> feature_ids, std::vector<std::uint8_t> group,
                 std::array<std::string, 2> group_labels)
    : m_(m),
      ncols_(ncols),
      values_(std::move(values)),
      feature_ids_(std::move(feature_ids)),
      group_(std::move(group)),
      group_labels_(std::move(group_labels)) {
    check_common(m_, ncols_, values_, feature_ids_);
    if (group_.size() != ncols_)
        throw std::invalid_argument("Dataset: group label per column required");
    int n1 = 0, n2 = 0;
    for (auto g : group_) {
        if (g > 1) throw std::invalid_argument("Dataset: group labels must be 0/1");
        (g == 0 ? n1 : n2)++;
    }
    if (n1 < 2 || n2 < 2)
        throw std::invalid_argument("Dataset: each group needs >= 2 samples");
    design_ = {DesignKind::two_sample, 0, n1, n2};
}

namespace {

// Finalize: sort |T| of valid features into abs_sorted.
void finish(TStatVector& tv) {
    tv.abs_sorted.clear();
    tv.abs_sorted.reserve(tv.stats.size());
    for (std::size_t i = 0; i < tv.stats.size(); ++i)
        if (tv.valid[i]) tv.abs_sorted.push_back(std::fabs(tv.stats[i]));
    std::sort(tv.abs_sorted.begin(), tv.abs_sorted.end());
    tv.num_valid = tv.abs_sorted.size();
}

}  // namespace

TStatVector one_sample_t(const Dataset& data) {
    if (data.design().kind != DesignKind::one_sample)
        throw std::invalid_argument("one_sample_t: dataset is not one-sample");
    const std::size_t m = data.num_features();
    const std::size_t n = data.num_columns();
    const double nd = static_cast<double>(n);
    const double sqrt_n = std::sqrt(nd);

    TStatVector tv;
    tv.design = data.design();
    tv.stats.assign(m, kNaN);
    tv.valid.assign(m, 0);
    tv.df.assign(m, nd - 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::span<const double> row{data.row(i), n};
        const double mean = kernels::sum(row) / nd;
        const double sse = kernels::sum_sq_dev(row, mean);
        if (sse <= 0.0) continue;  // zero sample variance: statistic undefined
        const double sd = std::sqrt(sse / (nd - 1.0));
        tv.stats[i] = sqrt_n * mean / sd;
        tv.valid[i] = 1;
    }
    finish(tv);
    return tv;
}

TStatVector two_sample_t(const Dataset& data) {
    if (data.design().kind != DesignKind::two_sample)
        throw std::invalid_argument("two_sample_t: dataset is not two-sample");
    const std::size_t m = data.num_features();
    const std::size_t ncols = data.num_columns();
    const auto& group = data.group();
    const double n1 = data.design().n1;
    const double n2 = data.design().n2;

    TStatVector tv;
    tv.design = data.design();
    tv.stats.assign(m, kNaN);
    tv.valid.assign(m, 0);
    tv.df.assign(m, kNaN);

    std::vector<double> g1, g2;
    g1.reserve(static_cast<std::size_t>(n1));
    g2.reserve(static_cast<std::size_t>(n2));
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = data.row(i);
        g1.clear();
        g2.clear();
        for (std::size_t j = 0; j < ncols; ++j)
            (group[j] == 0 ? g1 : g2).push_back(row[j]);
        const double mean1 = kernels::sum(g1) / n1;
        const double mean2 = kernels::sum(g2) / n2;
        const double v1 = kernels::sum_sq_dev(g1, mean1) / (n1 - 1.0);
        const double v2 = kernels::sum_sq_dev(g2, mean2) / (n2 - 1.0);
        const double se2 = v1 / n1 + v2 / n2;
        if (se2 <= 0.0) continue;  // both group variances zero
        tv.stats[i] = (mean1 - mean2) / std::sqrt(se2);
        tv.valid[i] = 1;
        // Welch-Satterthwaite degrees of freedom
        const double a = v1 / n1, b = v2 / n2;
        tv.df[i] = (a + b) * (a + b) / (a * a / (n1 - 1.0) + b * b / (n2 - 1.0));
    }
    finish(tv);
    return tv;
}

double empirical_tail(const TStatVector& tv, double t) {
    if (tv.num_valid == 0) return 0.0;
    const auto it = std::lower_bound(tv.abs_sorted.begin(), tv.abs_sorted.end(), t);
    const auto count = static_cast<double>(tv.abs_sorted.end() - it);
    return count / static_cast<double>(tv.num_valid);
}

std::vector<double> candidate_thresholds(const TStatVector& tv) {
    std::vector<double> cand = tv.abs_sorted;
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    return cand;
}

}  // namespace simcrit
