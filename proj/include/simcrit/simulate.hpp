#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simcrit/baselines.hpp"
#include "simcrit/critical.hpp"
#include "simcrit/pi1.hpp"
#include "simcrit/rng.hpp"
#include "simcrit/tstats.hpp"

namespace simcrit {

struct HmmParams {
    double p1 = 0.2;  // transition 0 -> 1
    double p0 = 0.8;  // transition 1 -> 0
    double stationary_pi1() const { return p1 / (p0 + p1); }
};

struct TruthSpec {
    enum class Kind { iid, hmm };
    Kind kind = Kind::iid;
    double pi1 = 0.2;  // iid only
    HmmParams hmm;
};

struct EffectSpec {
    enum class Kind { mirrored_uniform, uniform };
    Kind kind = Kind::mirrored_uniform;
    double lo = 0.1;
    double hi = 0.5;
    // optional N(0, noise_sd^2) perturbation added to each drawn effect
    double noise_sd = 0.0;
};

struct ErrorSpec {
    enum class Kind { normal, student_t, cauchy, laplace, exponential };
    Kind kind = Kind::normal;
    int df = 4;  // student_t only

    // standard deviation used for oracle noncentralities; the Cauchy has
    // none, so its scale parameter (1) stands in by convention
    double nominal_sd() const;
};

struct SimConfig {
    std::size_t m = 2000;
    Design design{DesignKind::one_sample, 300, 0, 0};
    TruthSpec truth;
    EffectSpec effect;
    ErrorSpec error;
    std::size_t reps = 500;
    std::uint64_t seed = 1;
    GridSpec pi1_grid;
    PValueVector::Source pvalue_source = PValueVector::Source::student_t;
};

struct ProcedureSpec {
    enum class Kind { ck_fdtp, ck_fdr, ck_kfwer, oracle_fdr, bh, st };
    Kind kind = Kind::ck_fdr;
    double alpha = 0.1;  // ck_fdtp
    int k = 10;          // ck_kfwer
    ControlSpec::Dependence dependence = ControlSpec::Dependence::dependent;

    std::string name() const;
};

// One procedure x level x replication outcome.
struct RepRecord {
    std::size_t procedure = 0;
    std::size_t level = 0;
    std::size_t rep = 0;
    std::size_t R = 0;  // rejections
    std::size_t V = 0;  // false rejections
    std::size_t S = 0;  // true rejections
    double fdp = 0.0;   // V/R, 0 when R = 0
    std::optional<double> t_hat;
    bool error_flagged = false;  // the procedure failed on this rep
};

struct RepInfo {
    std::size_t m1 = 0;
    double pi1_hat = 0.0;
};

struct Aggregate {
    double fdr = 0.0;                  // mean FDP
    std::optional<double> fdtp;        // P(FDP >= alpha), fdtp procedures
    std::optional<double> kfwer;       // P(V >= k), kfwer procedures
    std::optional<double> ndr;         // mean S / mean m1; absent if m1 == 0
    std::size_t num_no_rejection = 0;  // reps with an absent threshold
    std::size_t num_errors = 0;        // reps where the procedure threw
};

struct StudyResult {
    std::vector<RepRecord> records;      // rep-major, procedure x level inside
    std::vector<RepInfo> rep_info;       // one per rep
    std::vector<Aggregate> aggregates;   // indexed procedure * levels + level
    std::vector<ProcedureSpec> procedures;
    std::vector<double> levels;
    double rmse_pi1 = 0.0;

    const Aggregate& aggregate(std::size_t procedure, std::size_t level) const {
        return aggregates[procedure * levels.size() + level];
    }
};

// Truth labels: iid Bernoulli(pi1) or the two-state chain started from its
// stationary law.
std::vector<std::uint8_t> gen_labels(const TruthSpec& truth, std::size_t m,
                                     rng::Stream& stream);

// Per-feature effects for alternatives (0 for nulls). Draw order: magnitude,
// then sign (mirrored case), then the optional Gaussian perturbation.
std::vector<double> gen_effects(const EffectSpec& effect,
                                const std::vector<std::uint8_t>& labels,
                                rng::Stream& stream);

// Observation matrix for one replication. One-sample rows are mu_i + eps;
// two-sample rows have group-1 mean 0 and group-2 mean mu_i (columns are
// group-1 first, then group-2). The effects vector carries the labels
// implicitly (nulls have effect 0).
Dataset gen_dataset(const SimConfig& cfg, const std::vector<double>& effects,
                    rng::Stream& stream);

// Standardized oracle shifts for the alternatives (sqrt(n) mu/sd one-sample,
// mu / sqrt(sd^2/n1 + sd^2/n2) two-sample).
std::vector<double> oracle_deltas(const SimConfig& cfg,
                                  const std::vector<std::uint8_t>& labels,
                                  const std::vector<double>& effects);

// Runs reps replications of every procedure at every level. Deterministic
// for a fixed (cfg, seed) regardless of the worker count; worker count is
// capped by the SIMCRIT_THREADS environment variable.
StudyResult run_study(const SimConfig& cfg, const std::vector<ProcedureSpec>& procedures,
                      const std::vector<double>& levels);

// Monte-Carlo inversion of the controlled quantity on a shared threshold
// grid: the smallest t where the estimate of FDR / P(FDP >= alpha) /
// P(V >= k) drops to gamma. Empty when the target is never reached.
std::optional<double> gold_standard_critical(const SimConfig& cfg, const ControlSpec& spec,
                                             std::size_t reps);

// RMSE of the estimated alternative proportion against the realized m1/m.
double rmse_pi1(const SimConfig& cfg, std::size_t reps);

}  // namespace simcrit
