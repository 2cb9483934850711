// simcrit CLI: threshold-based multiple testing on expression-style matrices,
// plus the replication harness.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "simcrit/baselines.hpp"
#include "simcrit/critical.hpp"
#include "simcrit/io.hpp"
#include "simcrit/pi1.hpp"
#include "simcrit/simulate.hpp"
#include "simcrit/tstats.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitUsage = 64;

using simcrit::io::format_double;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void usage_error(const std::string& msg) {
    throw CLI::ValidationError("simcrit", msg);
}

simcrit::GridSpec parse_grid(const std::string& text) {
    simcrit::GridSpec grid;
    if (text.empty()) return grid;
    double lo = 0, hi = 0;
    int points = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &points) != 3)
        usage_error("--grid expects lo:hi:points");
    if (!(lo > 0.0) || !(hi > lo) || points < 2)
        usage_error("--grid needs 0 < lo < hi and points >= 2");
    return {lo, hi, points};
}

simcrit::Dataset load_dataset(const std::string& input, const std::string& groups) {
    simcrit::io::MatrixFile mf = simcrit::io::read_matrix(input);
    if (groups.empty()) return simcrit::io::make_dataset(std::move(mf));
    const auto labels = simcrit::io::read_groups(groups, mf.num_samples);
    return simcrit::io::make_dataset(std::move(mf), labels);
}

std::string opt_num(const std::optional<double>& v) {
    return v.has_value() ? format_double(*v) : "NA";
}

// ---------------------------------------------------------------- test ----
struct TestArgs {
    std::string input, groups, method = "fdr", dependence = "dependent";
    std::string pi1 = "auto", pvalues = "t", out = "simcrit", grid;
    double gamma = 0.05;
    double alpha = 0.1;
    int k = 1;
    std::uint64_t seed = 0;  // accepted for interface uniformity; unused here
    bool compare = false;
};

int cmd_test(const TestArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(args.gamma > 0.0 && args.gamma < 1.0)) usage_error("--gamma must be in (0,1)");
    if (args.method == "fdtp" && !(args.alpha > 0.0 && args.alpha < 1.0))
        usage_error("--alpha must be in (0,1)");
    if (args.method == "kfwer" && args.k < 1) usage_error("--k must be >= 1");
    if (args.method != "fdr" && args.method != "fdtp" && args.method != "kfwer")
        usage_error("--method must be fdr, fdtp or kfwer");
    if (args.dependence != "dependent" && args.dependence != "independent")
        usage_error("--dependence must be dependent or independent");
    if (args.pvalues != "t" && args.pvalues != "normal")
        usage_error("--pvalues must be t or normal");
    const simcrit::GridSpec grid = parse_grid(args.grid);

    double pi1_override = -1.0;
    if (args.pi1 != "auto") {
        char* end = nullptr;
        pi1_override = std::strtod(args.pi1.c_str(), &end);
        if (end == args.pi1.c_str() || *end != '\0' || !(pi1_override >= 0.0) ||
            !(pi1_override <= 1.0))
            usage_error("--pi1 must be 'auto' or a value in [0,1]");
    }

    const simcrit::Dataset data = load_dataset(args.input, args.groups);
    const simcrit::TStatVector tv = data.design().kind == simcrit::DesignKind::one_sample
                                        ? simcrit::one_sample_t(data)
                                        : simcrit::two_sample_t(data);
    if (tv.num_valid == 0) throw simcrit::io::DataError("no valid features (all rows degenerate)");

    double pi1_hat;
    double c_star = 0.0;
    if (pi1_override >= 0.0) {
        pi1_hat = pi1_override;
    } else {
        const auto est = simcrit::estimate_pi1(tv, grid);
        pi1_hat = est.pi1_hat;
        c_star = est.c_star;
    }

    simcrit::CriticalValue cv;
    if (args.method == "fdr") {
        cv = simcrit::critical_fdr(tv, pi1_hat, args.gamma);
    } else if (args.method == "fdtp") {
        cv = simcrit::critical_fdtp(tv, pi1_hat, args.alpha, args.gamma,
                                    args.dependence == "dependent"
                                        ? simcrit::ControlSpec::Dependence::dependent
                                        : simcrit::ControlSpec::Dependence::independent);
    } else {
        cv = simcrit::critical_kfwer(tv.num_valid, pi1_hat, args.k, args.gamma);
    }
    const simcrit::DecisionSet ds = simcrit::reject(tv, cv);

    const auto source = args.pvalues == "t" ? simcrit::PValueVector::Source::student_t
                                            : simcrit::PValueVector::Source::normal;
    const simcrit::PValueVector pv = simcrit::p_values(tv, source);
    const simcrit::QValueResult qv = simcrit::storey_q_values(pv);

    std::size_t bh_count = 0, st_count = 0;
    if (args.compare) {
        const auto bh = simcrit::bh_procedure(pv, args.gamma);
        for (std::size_t i = 0; i < bh.rejected.size(); ++i)
            bh_count += bh.rejected[i] && tv.valid[i];
        for (std::size_t i = 0; i < qv.q.size(); ++i)
            st_count += tv.valid[i] && qv.q[i] <= args.gamma;
    }

    const std::string features_path = args.out + ".features.tsv";
    std::ofstream ft(features_path);
    if (!ft) throw simcrit::io::DataError(features_path + ": cannot write");
    ft << "feature_id\tt_stat\tabs_t\trejected\tp_value\tq_value\n";
    for (std::size_t i = 0; i < tv.size(); ++i) {
        ft << data.feature_ids()[i] << '\t' << format_double(tv.stats[i]) << '\t'
           << format_double(std::fabs(tv.stats[i])) << '\t'
           << (ds.rejected[i] ? 1 : 0) << '\t' << format_double(pv.p[i]) << '\t'
           << format_double(qv.q[i]) << '\n';
    }
    ft.close();

    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();

    ordered_json summary;
    summary["schema_version"] = 1;
    summary["method"] = args.method;
    summary["gamma"] = args.gamma;
    if (args.method == "fdtp") {
        summary["alpha"] = args.alpha;
        summary["dependence"] = args.dependence;
    }
    if (args.method == "kfwer") summary["k"] = args.k;
    summary["pi1_hat"] = pi1_hat;
    summary["pi1_source"] = pi1_override >= 0.0 ? "override" : "auto";
    if (pi1_override < 0.0) summary["pi1_c_star"] = c_star;
    if (cv.t_hat.has_value())
        summary["t_hat"] = *cv.t_hat;
    else
        summary["t_hat"] = nullptr;
    summary["num_rejected"] = ds.num_rejected;
    summary["m"] = tv.size();
    summary["num_valid"] = tv.num_valid;
    summary["num_flagged"] = tv.size() - tv.num_valid;
    summary["st_pi0"] = qv.pi0_hat;
    if (args.compare) {
        summary["bh_num_rejected"] = bh_count;
        summary["st_num_rejected"] = st_count;
    }
    summary["features_table"] = features_path;

    const std::string summary_path = args.out + ".summary.json";
    std::ofstream fs(summary_path);
    if (!fs) throw simcrit::io::DataError(summary_path + ": cannot write");
    fs << summary.dump(2) << '\n';
    fs.close();

    // wall time goes to the console, not the report, so reruns on identical
    // inputs produce identical files
    std::cout << "method=" << args.method << " pi1_hat=" << format_double(pi1_hat)
              << " t_hat=" << opt_num(cv.t_hat) << " num_rejected=" << ds.num_rejected
              << " elapsed_ms=" << ms << "\n";
    return kExitOk;
}

// ------------------------------------------------------------ simulate ----
int cmd_simulate(const std::string& config_path, const std::string& out) {
    const simcrit::io::SimulateJob job = simcrit::io::parse_simulate_config(config_path);
    const simcrit::StudyResult res =
        simcrit::run_study(job.config, job.procedures, job.levels);

    const std::string reps_path = out + ".reps.tsv";
    std::ofstream fr(reps_path);
    if (!fr) throw simcrit::io::DataError(reps_path + ": cannot write");
    fr << "procedure\tlevel\trep\tR\tV\tS\tfdp\tpi1_hat\tm1\tt_hat\terror\n";
    for (const auto& rec : res.records) {
        fr << res.procedures[rec.procedure].name() << '\t'
           << format_double(res.levels[rec.level]) << '\t' << rec.rep << '\t' << rec.R
           << '\t' << rec.V << '\t' << rec.S << '\t' << format_double(rec.fdp) << '\t'
           << format_double(res.rep_info[rec.rep].pi1_hat) << '\t'
           << res.rep_info[rec.rep].m1 << '\t' << opt_num(rec.t_hat) << '\t'
           << (rec.error_flagged ? 1 : 0) << '\n';
    }
    fr.close();

    ordered_json summary;
    summary["schema_version"] = 1;
    summary["config_file"] = config_path;
    summary["m"] = job.config.m;
    summary["reps"] = job.config.reps;
    summary["seed"] = job.config.seed;
    summary["rmse_pi1"] = res.rmse_pi1;
    summary["aggregates"] = ordered_json::array();
    for (std::size_t pi = 0; pi < res.procedures.size(); ++pi) {
        for (std::size_t li = 0; li < res.levels.size(); ++li) {
            const simcrit::Aggregate& a = res.aggregate(pi, li);
            ordered_json ja;
            ja["procedure"] = res.procedures[pi].name();
            ja["level"] = res.levels[li];
            ja["fdr"] = a.fdr;
            if (a.fdtp.has_value()) ja["fdtp"] = *a.fdtp;
            if (a.kfwer.has_value()) ja["kfwer"] = *a.kfwer;
            if (a.ndr.has_value())
                ja["ndr"] = *a.ndr;
            else
                ja["ndr"] = nullptr;
            ja["num_no_rejection"] = a.num_no_rejection;
            ja["num_errors"] = a.num_errors;
            summary["aggregates"].push_back(ja);
        }
    }
    // figure-ready nominal-vs-realized table
    const std::string agg_path = out + ".aggregates.tsv";
    std::ofstream fa(agg_path);
    if (!fa) throw simcrit::io::DataError(agg_path + ": cannot write");
    fa << "procedure\tlevel\tfdr\tfdtp\tkfwer\tndr\tnum_no_rejection\tnum_errors\n";
    for (std::size_t pi = 0; pi < res.procedures.size(); ++pi) {
        for (std::size_t li = 0; li < res.levels.size(); ++li) {
            const simcrit::Aggregate& a = res.aggregate(pi, li);
            fa << res.procedures[pi].name() << '\t' << format_double(res.levels[li])
               << '\t' << format_double(a.fdr) << '\t' << opt_num(a.fdtp) << '\t'
               << opt_num(a.kfwer) << '\t' << opt_num(a.ndr) << '\t'
               << a.num_no_rejection << '\t' << a.num_errors << '\n';
        }
    }
    fa.close();

    if (!job.gold_standard.empty()) {
        summary["gold_standard"] = ordered_json::array();
        for (const auto& req : job.gold_standard) {
            const auto t =
                simcrit::gold_standard_critical(job.config, req.spec, req.reps);
            ordered_json jg;
            switch (req.spec.method) {
                case simcrit::ControlSpec::Method::fdr: jg["method"] = "fdr"; break;
                case simcrit::ControlSpec::Method::fdtp:
                    jg["method"] = "fdtp";
                    jg["alpha"] = req.spec.alpha;
                    break;
                case simcrit::ControlSpec::Method::kfwer:
                    jg["method"] = "kfwer";
                    jg["k"] = req.spec.k;
                    break;
            }
            jg["gamma"] = req.spec.gamma;
            jg["reps"] = req.reps;
            if (t.has_value())
                jg["t"] = *t;
            else
                jg["t"] = nullptr;
            summary["gold_standard"].push_back(jg);
        }
    }

    const std::string summary_path = out + ".summary.json";
    std::ofstream fs(summary_path);
    if (!fs) throw simcrit::io::DataError(summary_path + ": cannot write");
    fs << summary.dump(2) << '\n';
    fs.close();

    std::cout << "wrote " << reps_path << ", " << agg_path << " and " << summary_path
              << "\n";
    return kExitOk;
}

// --------------------------------------------------------- estimate-pi1 ----
int cmd_estimate_pi1(const std::string& input, const std::string& groups,
                     const std::string& grid_text, const std::string& dump_grid) {
    const simcrit::GridSpec grid = parse_grid(grid_text);
    const simcrit::Dataset data = load_dataset(input, groups);
    const simcrit::TStatVector tv = data.design().kind == simcrit::DesignKind::one_sample
                                        ? simcrit::one_sample_t(data)
                                        : simcrit::two_sample_t(data);
    if (tv.num_valid == 0)
        throw simcrit::io::DataError("no valid features (all rows degenerate)");
    const simcrit::Pi1Estimate est = simcrit::estimate_pi1(tv, grid);
    if (!dump_grid.empty()) {
        std::ofstream fg(dump_grid);
        if (!fg) throw simcrit::io::DataError(dump_grid + ": cannot write");
        fg << "c\tg_hat\te_gc\tratio\n";
        for (const auto& gp : est.grid)
            fg << format_double(gp.c) << '\t' << format_double(gp.g_hat) << '\t'
               << format_double(gp.e_gc) << '\t' << format_double(gp.ratio) << '\n';
    }
    std::cout << "pi1_hat=" << format_double(est.pi1_hat)
              << " c_star=" << format_double(est.c_star)
              << " clamped=" << (est.clamped ? 1 : 0) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simultaneous critical values for large-scale t-tests"};
    app.require_subcommand(1);

    TestArgs targs;
    CLI::App* test = app.add_subcommand("test", "Run a multiple-testing procedure on a matrix");
    test->add_option("--input", targs.input, "matrix file (.tsv/.csv)")->required();
    test->add_option("--groups", targs.groups, "two-group labels, one per line");
    test->add_option("--method", targs.method, "fdr | fdtp | kfwer");
    test->add_option("--gamma", targs.gamma, "significance level");
    test->add_option("--alpha", targs.alpha, "FDP proportion (fdtp)");
    test->add_option("--k", targs.k, "tolerated false rejections (kfwer)");
    test->add_option("--dependence", targs.dependence, "dependent | independent");
    test->add_option("--pi1", targs.pi1, "'auto' or a fixed value");
    test->add_option("--pvalues", targs.pvalues, "t | normal");
    test->add_option("--out", targs.out, "output prefix");
    test->add_option("--seed", targs.seed, "accepted for uniformity; unused");
    test->add_option("--grid", targs.grid, "pi1 grid lo:hi:points");
    test->add_flag("--compare", targs.compare, "also report BH and ST counts");

    std::string sim_config, sim_out = "simcrit_sim";
    CLI::App* sim = app.add_subcommand("simulate", "Run a replication study from a JSON config");
    sim->add_option("--config", sim_config, "JSON config")->required();
    sim->add_option("--out", sim_out, "output prefix");

    std::string ep_input, ep_groups, ep_grid, ep_dump;
    CLI::App* ep = app.add_subcommand("estimate-pi1", "Estimate the alternative proportion");
    ep->add_option("--input", ep_input, "matrix file (.tsv/.csv)")->required();
    ep->add_option("--groups", ep_groups, "two-group labels, one per line");
    ep->add_option("--grid", ep_grid, "grid lo:hi:points");
    ep->add_option("--dump-grid", ep_dump, "write the evaluated grid as TSV");

    try {
        app.parse(argc, argv);
        if (test->parsed()) return cmd_test(targs);
        if (sim->parsed()) return cmd_simulate(sim_config, sim_out);
        if (ep->parsed()) return cmd_estimate_pi1(ep_input, ep_groups, ep_grid, ep_dump);
        return kExitUsage;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const simcrit::io::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
