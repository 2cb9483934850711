#include "simcrit/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

namespace simcrit {

double ErrorSpec::nominal_sd() const {
    switch (kind) {
        case Kind::normal: return 1.0;
        case Kind::student_t:
            if (df <= 2) return 1.0;  // undefined; scale convention
            return std::sqrt(static_cast<double>(df) / (df - 2));
        case Kind::cauchy: return 1.0;  // no moments; scale convention
        case Kind::laplace: return std::sqrt(2.0);
        case Kind::exponential: return 1.0;
    }
    return 1.0;
}

std::string ProcedureSpec::name() const {
    switch (kind) {
        case Kind::ck_fdtp:
            return dependence == ControlSpec::Dependence::dependent ? "ck_fdtp"
                                                                    : "ck_fdtp_indep";
        case Kind::ck_fdr: return "ck_fdr";
        case Kind::ck_kfwer: return "ck_kfwer";
        case Kind::oracle_fdr: return "oracle_fdr";
        case Kind::bh: return "bh";
        case Kind::st: return "st";
    }
    return "?";
}

std::vector<std::uint8_t> gen_labels(const TruthSpec& truth, std::size_t m,
                                     rng::Stream& stream) {
    std::vector<std::uint8_t> labels(m);
    if (truth.kind == TruthSpec::Kind::iid) {
        for (auto& h : labels) h = stream.bernoulli(truth.pi1) ? 1 : 0;
        return labels;
    }
    const double pi1 = truth.hmm.stationary_pi1();
    bool state = stream.bernoulli(pi1);
    labels[0] = state ? 1 : 0;
    for (std::size_t i = 1; i < m; ++i) {
        state = state ? !stream.bernoulli(truth.hmm.p0) : stream.bernoulli(truth.hmm.p1);
        labels[i] = state ? 1 : 0;
    }
    return labels;
}

std::vector<double> gen_effects(const EffectSpec& effect,
                                const std::vector<std::uint8_t>& labels,
                                rng::Stream& stream) {
    std::vector<double> mu(labels.size(), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!labels[i]) continue;
        double v = stream.uniform(effect.lo, effect.hi);
        if (effect.kind == EffectSpec::Kind::mirrored_uniform && stream.bernoulli(0.5))
            v = -v;
        if (effect.noise_sd > 0.0) v += effect.noise_sd * stream.normal();
        mu[i] = v;
    }
    return mu;
}

namespace {

double draw_error(const ErrorSpec& err, rng::Stream& stream) {
    switch (err.kind) {
        case ErrorSpec::Kind::normal: return stream.normal();
        case ErrorSpec::Kind::student_t: return stream.student_t(err.df);
        case ErrorSpec::Kind::cauchy: return stream.cauchy();
        case ErrorSpec::Kind::laplace: return stream.laplace();
        case ErrorSpec::Kind::exponential: return stream.exponential_centered();
    }
    return 0.0;
}

std::size_t thread_cap() {
    if (const char* env = std::getenv("SIMCRIT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace

Dataset gen_dataset(const SimConfig& cfg, const std::vector<double>& effects,
                    rng::Stream& stream) {
    const std::size_t m = cfg.m;
    std::vector<std::string> ids(m);
    for (std::size_t i = 0; i < m; ++i) ids[i] = "f" + std::to_string(i + 1);

    if (cfg.design.kind == DesignKind::one_sample) {
        const std::size_t n = static_cast<std::size_t>(cfg.design.n);
        std::vector<double> values(m * n);
        for (std::size_t i = 0; i < m; ++i) {
            double* row = values.data() + i * n;
            const double mu = effects[i];
            for (std::size_t j = 0; j < n; ++j) row[j] = mu + draw_error(cfg.error, stream);
        }
        return Dataset(m, n, std::move(values), std::move(ids));
    }

    const std::size_t n1 = static_cast<std::size_t>(cfg.design.n1);
    const std::size_t n2 = static_cast<std::size_t>(cfg.design.n2);
    const std::size_t ncols = n1 + n2;
    std::vector<double> values(m * ncols);
    for (std::size_t i = 0; i < m; ++i) {
        double* row = values.data() + i * ncols;
        const double mu = effects[i];
        for (std::size_t j = 0; j < n1; ++j) row[j] = draw_error(cfg.error, stream);
        for (std::size_t j = 0; j < n2; ++j)
            row[n1 + j] = mu + draw_error(cfg.error, stream);
    }
    std::vector<std::uint8_t> group(ncols, 0);
    std::fill(group.begin() + static_cast<std::ptrdiff_t>(n1), group.end(), 1);
    return Dataset(m, ncols, std::move(values), std::move(ids), std::move(group),
                   {"g1", "g2"});
}

std::vector<double> oracle_deltas(const SimConfig& cfg,
                                  const std::vector<std::uint8_t>& labels,
                                  const std::vector<double>& effects) {
    const double sd = cfg.error.nominal_sd();
    double scale;
    if (cfg.design.kind == DesignKind::one_sample) {
        scale = std::sqrt(static_cast<double>(cfg.design.n)) / sd;
    } else {
        const double b2 = sd * sd / cfg.design.n1 + sd * sd / cfg.design.n2;
        scale = 1.0 / std::sqrt(b2);
    }
    std::vector<double> deltas;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i]) deltas.push_back(effects[i] * scale);
    return deltas;
}

namespace {

struct RepOutcome {
    std::vector<RepRecord> records;
    RepInfo info;
    double pi1_true = 0.0;
};

RepOutcome run_one_rep(const SimConfig& cfg, const std::vector<ProcedureSpec>& procedures,
                       const std::vector<double>& levels, std::size_t rep) {
    rng::Stream stream(cfg.seed, rep);
    const auto labels = gen_labels(cfg.truth, cfg.m, stream);
    const auto effects = gen_effects(cfg.effect, labels, stream);
    const Dataset data = gen_dataset(cfg, effects, stream);
    const TStatVector tv = cfg.design.kind == DesignKind::one_sample
                               ? one_sample_t(data)
                               : two_sample_t(data);
    const Pi1Estimate pi1 = estimate_pi1(tv, cfg.pi1_grid);

    RepOutcome out;
    out.info.pi1_hat = pi1.pi1_hat;
    for (auto h : labels) out.info.m1 += h;
    out.pi1_true = static_cast<double>(out.info.m1) / static_cast<double>(cfg.m);

    // p-values are shared by the baseline procedures
    bool need_p = false;
    for (const auto& proc : procedures)
        need_p |= proc.kind == ProcedureSpec::Kind::bh || proc.kind == ProcedureSpec::Kind::st;
    PValueVector pv;
    QValueResult st;
    if (need_p) {
        pv = p_values(tv, cfg.pvalue_source);
        for (const auto& proc : procedures)
            if (proc.kind == ProcedureSpec::Kind::st) {
                st = storey_q_values(pv);
                break;
            }
    }

    for (std::size_t pi = 0; pi < procedures.size(); ++pi) {
        const ProcedureSpec& proc = procedures[pi];
        for (std::size_t li = 0; li < levels.size(); ++li) {
            const double gamma = levels[li];
            RepRecord rec;
            rec.procedure = pi;
            rec.level = li;
            rec.rep = rep;
            DecisionSet ds;
            try {
                switch (proc.kind) {
                    case ProcedureSpec::Kind::ck_fdtp: {
                        const auto cv = critical_fdtp(tv, pi1.pi1_hat, proc.alpha, gamma,
                                                      proc.dependence);
                        rec.t_hat = cv.t_hat;
                        ds = reject(tv, cv);
                        break;
                    }
                    case ProcedureSpec::Kind::ck_fdr: {
                        const auto cv = critical_fdr(tv, pi1.pi1_hat, gamma);
                        rec.t_hat = cv.t_hat;
                        ds = reject(tv, cv);
                        break;
                    }
                    case ProcedureSpec::Kind::ck_kfwer: {
                        const auto cv = critical_kfwer(tv.num_valid, pi1.pi1_hat, proc.k,
                                                       gamma);
                        rec.t_hat = cv.t_hat;
                        ds = reject(tv, cv);
                        break;
                    }
                    case ProcedureSpec::Kind::oracle_fdr: {
                        ControlSpec spec;
                        spec.method = ControlSpec::Method::fdr;
                        spec.gamma = gamma;
                        const auto model = OracleModel::from_labels(
                            labels, oracle_deltas(cfg, labels, effects));
                        const auto cv = oracle_critical(model, spec);
                        rec.t_hat = cv.t_hat;
                        ds = reject(tv, cv);
                        break;
                    }
                    case ProcedureSpec::Kind::bh: {
                        ds = bh_procedure(pv, gamma);
                        for (std::size_t i = 0; i < ds.rejected.size(); ++i)
                            if (ds.rejected[i] && !tv.valid[i]) {
                                ds.rejected[i] = 0;  // undefined statistic
                                --ds.num_rejected;
                            }
                        break;
                    }
                    case ProcedureSpec::Kind::st: {
                        ds.rejected.assign(st.q.size(), 0);
                        for (std::size_t i = 0; i < st.q.size(); ++i)
                            if (tv.valid[i] && st.q[i] <= gamma) {
                                ds.rejected[i] = 1;
                                ++ds.num_rejected;
                            }
                        break;
                    }
                }
                // baselines report the |T| threshold their rejection set implies
                if ((proc.kind == ProcedureSpec::Kind::bh ||
                     proc.kind == ProcedureSpec::Kind::st) &&
                    ds.num_rejected > 0) {
                    double min_abs = std::numeric_limits<double>::infinity();
                    for (std::size_t i = 0; i < ds.rejected.size(); ++i)
                        if (ds.rejected[i])
                            min_abs = std::min(min_abs, std::fabs(tv.stats[i]));
                    rec.t_hat = min_abs;
                }
            } catch (const std::exception&) {
                rec.error_flagged = true;  // counted as a no-rejection rep
            }
            rec.R = ds.num_rejected;
            for (std::size_t i = 0; i < ds.rejected.size(); ++i)
                if (ds.rejected[i] && !labels[i]) ++rec.V;
            rec.S = rec.R - rec.V;
            rec.fdp = rec.R == 0 ? 0.0
                                 : static_cast<double>(rec.V) / static_cast<double>(rec.R);
            out.records.push_back(rec);
        }
    }
    return out;
}

}  // namespace

StudyResult run_study(const SimConfig& cfg, const std::vector<ProcedureSpec>& procedures,
                      const std::vector<double>& levels) {
    if (cfg.reps < 1) throw std::invalid_argument("run_study: reps must be >= 1");
    if (procedures.empty() || levels.empty())
        throw std::invalid_argument("run_study: procedures and levels required");

    StudyResult result;
    result.procedures = procedures;
    result.levels = levels;
    result.rep_info.resize(cfg.reps);
    const std::size_t cells = procedures.size() * levels.size();
    result.records.resize(cfg.reps * cells);
    std::vector<double> pi1_true(cfg.reps);

    const std::size_t workers = std::min<std::size_t>(thread_cap(), cfg.reps);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= cfg.reps) return;
            RepOutcome out = run_one_rep(cfg, procedures, levels, rep);
            std::copy(out.records.begin(), out.records.end(),
                      result.records.begin() + static_cast<std::ptrdiff_t>(rep * cells));
            result.rep_info[rep] = out.info;
            pi1_true[rep] = out.pi1_true;
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // aggregates: plain sequential reductions over the rep-indexed records
    const double repsd = static_cast<double>(cfg.reps);
    double mean_m1 = 0.0;
    for (const auto& info : result.rep_info) mean_m1 += static_cast<double>(info.m1);
    mean_m1 /= repsd;
    double sq = 0.0;
    for (std::size_t r = 0; r < cfg.reps; ++r) {
        const double d = result.rep_info[r].pi1_hat - pi1_true[r];
        sq += d * d;
    }
    result.rmse_pi1 = std::sqrt(sq / repsd);

    result.aggregates.assign(cells, {});
    for (std::size_t pi = 0; pi < procedures.size(); ++pi) {
        for (std::size_t li = 0; li < levels.size(); ++li) {
            Aggregate agg;
            double fdp_sum = 0.0, s_sum = 0.0;
            std::size_t fdtp_count = 0, kfwer_count = 0;
            for (std::size_t r = 0; r < cfg.reps; ++r) {
                const RepRecord& rec = result.records[r * cells + pi * levels.size() + li];
                fdp_sum += rec.fdp;
                s_sum += static_cast<double>(rec.S);
                if (rec.fdp >= procedures[pi].alpha) ++fdtp_count;
                if (rec.V >= static_cast<std::size_t>(procedures[pi].k)) ++kfwer_count;
                if (!rec.t_hat.has_value()) ++agg.num_no_rejection;
                if (rec.error_flagged) ++agg.num_errors;
            }
            agg.fdr = fdp_sum / repsd;
            if (procedures[pi].kind == ProcedureSpec::Kind::ck_fdtp)
                agg.fdtp = static_cast<double>(fdtp_count) / repsd;
            if (procedures[pi].kind == ProcedureSpec::Kind::ck_kfwer)
                agg.kfwer = static_cast<double>(kfwer_count) / repsd;
            if (mean_m1 > 0.0) agg.ndr = s_sum / repsd / mean_m1;
            result.aggregates[pi * levels.size() + li] = agg;
        }
    }
    return result;
}

std::optional<double> gold_standard_critical(const SimConfig& cfg, const ControlSpec& spec,
                                             std::size_t reps) {
    if (reps < 100) throw std::invalid_argument("gold_standard_critical: reps >= 100");
    spec.validate();

    constexpr double kStep = 0.005;
    constexpr double kTMax = 12.0;
    const std::size_t grid_size = static_cast<std::size_t>(kTMax / kStep) + 1;

    // Per grid point accumulate the MC estimate of the controlled quantity.
    std::vector<double> fdp_sum(grid_size, 0.0);
    std::vector<std::size_t> hit_count(grid_size, 0);

    std::vector<double> all_abs, null_abs;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        rng::Stream stream(cfg.seed, rep);
        const auto labels = gen_labels(cfg.truth, cfg.m, stream);
        const auto effects = gen_effects(cfg.effect, labels, stream);
        const Dataset data = gen_dataset(cfg, effects, stream);
        const TStatVector tv = cfg.design.kind == DesignKind::one_sample
                                   ? one_sample_t(data)
                                   : two_sample_t(data);
        all_abs = tv.abs_sorted;
        null_abs.clear();
        for (std::size_t i = 0; i < tv.size(); ++i)
            if (tv.valid[i] && !labels[i]) null_abs.push_back(std::fabs(tv.stats[i]));
        std::sort(null_abs.begin(), null_abs.end());

        for (std::size_t j = 0; j < grid_size; ++j) {
            const double t = static_cast<double>(j) * kStep;
            const auto R = static_cast<std::size_t>(
                all_abs.end() - std::lower_bound(all_abs.begin(), all_abs.end(), t));
            const auto V = static_cast<std::size_t>(
                null_abs.end() - std::lower_bound(null_abs.begin(), null_abs.end(), t));
            switch (spec.method) {
                case ControlSpec::Method::fdr:
                    fdp_sum[j] += R == 0 ? 0.0 : static_cast<double>(V) / R;
                    break;
                case ControlSpec::Method::fdtp:
                    hit_count[j] += V >= spec.alpha * static_cast<double>(R) && V > 0;
                    break;
                case ControlSpec::Method::kfwer:
                    hit_count[j] += V >= static_cast<std::size_t>(spec.k);
                    break;
            }
        }
    }

    for (std::size_t j = 0; j < grid_size; ++j) {
        const double est = spec.method == ControlSpec::Method::fdr
                               ? fdp_sum[j] / static_cast<double>(reps)
                               : static_cast<double>(hit_count[j]) / static_cast<double>(reps);
        if (est <= spec.gamma) return static_cast<double>(j) * kStep;
    }
    return std::nullopt;
}

double rmse_pi1(const SimConfig& cfg, std::size_t reps) {
    if (reps < 2) throw std::invalid_argument("rmse_pi1: reps must be >= 2");
    double sq = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        rng::Stream stream(cfg.seed, rep);
        const auto labels = gen_labels(cfg.truth, cfg.m, stream);
        const auto effects = gen_effects(cfg.effect, labels, stream);
        const Dataset data = gen_dataset(cfg, effects, stream);
        const TStatVector tv = cfg.design.kind == DesignKind::one_sample
                                   ? one_sample_t(data)
                                   : two_sample_t(data);
        const double est = estimate_pi1(tv, cfg.pi1_grid).pi1_hat;
        std::size_t m1 = 0;
        for (auto h : labels) m1 += h;
        const double truth = static_cast<double>(m1) / static_cast<double>(cfg.m);
        const double d = est - truth;
        sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(reps));
}

}  // namespace simcrit
