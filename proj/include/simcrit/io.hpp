#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "simcrit/simulate.hpp"
#include "simcrit/tstats.hpp"

namespace simcrit::io {

// Malformed input data; the message carries file and 1-based line context.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Delimited matrix: first row = sample headers, first column = feature id.
// Delimiter inferred from the extension (.csv -> comma, anything else tab).
struct MatrixFile {
    std::vector<std::string> feature_ids;
    std::vector<std::string> sample_names;
    std::vector<double> values;  // row-major, num_features x num_samples
    std::size_t num_features = 0;
    std::size_t num_samples = 0;
};

MatrixFile read_matrix(const std::string& path);

// One label per line, order matching the matrix columns; exactly two
// distinct labels.
std::vector<std::string> read_groups(const std::string& path, std::size_t expected);

Dataset make_dataset(MatrixFile matrix, const std::vector<std::string>& groups);
Dataset make_dataset(MatrixFile matrix);

// 17-significant-digit float formatting shared by every writer so outputs
// are byte-stable.
std::string format_double(double v);

// Simulation config (JSON). Throws DataError naming the offending field.
struct SimulateJob {
    SimConfig config;
    std::vector<ProcedureSpec> procedures;
    std::vector<double> levels;
    // optional Monte-Carlo inversions of the true critical value
    struct GoldRequest {
        ControlSpec spec;
        std::size_t reps = 500;
    };
    std::vector<GoldRequest> gold_standard;
};
SimulateJob parse_simulate_config(const std::string& path);

}  // namespace simcrit::io
