#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace simcrit {

enum class DesignKind { one_sample, two_sample };

struct Design {
    DesignKind kind = DesignKind::one_sample;
    int n = 0;        // one-sample size
    int n1 = 0;       // two-sample group sizes
    int n2 = 0;
};

// Feature-by-sample observation matrix, rows = features. Construction
// validates shape, finiteness and group sizes; it is immutable afterwards.
class Dataset {
public:
    // One-sample: values is row-major m x n, n >= 2.
    Dataset(std::size_t m, std::size_t n, std::vector<double> values,
            std::vector<std::string> feature_ids);
    // Two-sample: group[j] in {0,1} assigns column j; each group needs >= 2.
    Dataset(std::size_t m, std::size_t ncols, std::vector<double> values,
            std::vector<std::string> feature_ids, std::vector<std::uint8_t> group,
            std::array<std::string, 2> group_labels);

    std::size_t num_features() const { return m_; }
    std::size_t num_columns() const { return ncols_; }
    const Design& design() const { return design_; }
    const std::vector<std::string>& feature_ids() const { return feature_ids_; }
    const std::vector<std::uint8_t>& group() const { return group_; }
    const std::array<std::string, 2>& group_labels() const { return group_labels_; }
    const double* row(std::size_t i) const { return values_.data() + i * ncols_; }

private:
    std::size_t m_ = 0;
    std::size_t ncols_ = 0;
    std::vector<double> values_;
    std::vector<std::string> feature_ids_;
    Design design_;
    std::vector<std::uint8_t> group_;
    std::array<std::string, 2> group_labels_;
};

// Per-feature t-statistics plus the sorted |T| candidate machinery.
// stats[i] is NaN and valid[i] == 0 where the statistic is undefined
// (zero sample variance); such features are excluded from abs_sorted,
// empirical_tail and every downstream candidate scan.
struct TStatVector {
    std::vector<double> stats;
    std::vector<std::uint8_t> valid;
    std::vector<double> df;          // per-feature p-value df (n-1 or Welch)
    Design design;
    std::vector<double> abs_sorted;  // |stats| of valid features, ascending
    std::size_t num_valid = 0;

    std::size_t size() const { return stats.size(); }
};

TStatVector one_sample_t(const Dataset& data);
TStatVector two_sample_t(const Dataset& data);

// (1/m) * #{valid i : |T_i| >= t}; binary search on abs_sorted.
double empirical_tail(const TStatVector& tv, double t);

// Sorted unique |T_i| over valid features: the thresholds where the
// empirical exceedance (and every rule built on it) changes.
std::vector<double> candidate_thresholds(const TStatVector& tv);

}  // namespace simcrit
