#include "simcrit/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace simcrit::io {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(field);
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& path, std::size_t lineno) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw DataError(path + ":" + std::to_string(lineno) + ": not a finite number: '" +
                        s + "'");
    return v;
}

std::string chomp(std::string line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    return line;
}

}  // namespace

MatrixFile read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open");
    const char delim =
        path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0 ? ',' : '\t';

    MatrixFile mf;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw DataError(path + ":1: empty file");
    ++lineno;
    auto header = split(chomp(line), delim);
    if (header.size() < 2)
        throw DataError(path + ":1: header needs a feature-id column plus samples");
    mf.sample_names.assign(header.begin() + 1, header.end());
    mf.num_samples = mf.sample_names.size();

    while (std::getline(in, line)) {
        ++lineno;
        const std::string row = chomp(line);
        if (row.empty()) continue;
        auto fields = split(row, delim);
        if (fields.size() != mf.num_samples + 1)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(mf.num_samples + 1) + " fields, got " +
                            std::to_string(fields.size()));
        mf.feature_ids.push_back(fields[0]);
        for (std::size_t j = 1; j < fields.size(); ++j)
            mf.values.push_back(parse_number(fields[j], path, lineno));
    }
    mf.num_features = mf.feature_ids.size();
    if (mf.num_features == 0) throw DataError(path + ": no data rows");
    return mf;
}

std::vector<std::string> read_groups(const std::string& path, std::size_t expected) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open");
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        const std::string l = chomp(line);
        if (!l.empty()) labels.push_back(l);
    }
    if (labels.size() != expected)
        throw DataError(path + ": " + std::to_string(labels.size()) +
                        " labels for " + std::to_string(expected) + " matrix columns");
    return labels;
}

Dataset make_dataset(MatrixFile matrix) {
    if (matrix.num_samples < 2)
        throw DataError("one-sample design needs at least 2 samples");
    return Dataset(matrix.num_features, matrix.num_samples, std::move(matrix.values),
                   std::move(matrix.feature_ids));
}

Dataset make_dataset(MatrixFile matrix, const std::vector<std::string>& groups) {
    std::set<std::string> distinct(groups.begin(), groups.end());
    if (distinct.size() != 2)
        throw DataError("groups file must contain exactly 2 distinct labels, got " +
                        std::to_string(distinct.size()));
    const std::string& first = *distinct.begin();
    const std::string& second = *std::next(distinct.begin());
    std::vector<std::uint8_t> g(groups.size());
    for (std::size_t j = 0; j < groups.size(); ++j) g[j] = groups[j] == second ? 1 : 0;
    std::size_t n1 = std::count(g.begin(), g.end(), 0);
    std::size_t n2 = g.size() - n1;
    if (n1 < 2 || n2 < 2) throw DataError("each group needs at least 2 samples");
    return Dataset(matrix.num_features, matrix.num_samples, std::move(matrix.values),
                   std::move(matrix.feature_ids), std::move(g), {first, second});
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw DataError("config field '" + field + "': " + why);
}

// `field` is the key to read; `shown` (default: the key) is the name used in
// error messages so nested fields can be reported with their full path.
template <typename T>
T require(const json& j, const std::string& field, const std::string& shown = "") {
    const std::string& name = shown.empty() ? field : shown;
    if (!j.contains(field)) bad_field(name, "missing");
    try {
        return j.at(field).get<T>();
    } catch (const json::exception&) {
        bad_field(name, "wrong type");
    }
}

template <typename T>
T optional_field(const json& j, const std::string& field, T fallback) {
    if (!j.contains(field)) return fallback;
    try {
        return j.at(field).get<T>();
    } catch (const json::exception&) {
        bad_field(field, "wrong type");
    }
}

}  // namespace

SimulateJob parse_simulate_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path + ": invalid JSON: " + std::string(e.what()));
    }

    SimulateJob job;
    SimConfig& cfg = job.config;
    cfg.m = require<std::size_t>(j, "m");
    if (cfg.m < 1) bad_field("m", "must be >= 1");

    const json jd = require<json>(j, "design");
    const auto dkind = require<std::string>(jd, "type", "design.type");
    if (dkind == "one_sample") {
        const int n = require<int>(jd, "n", "design.n");
        if (n < 2) bad_field("design.n", "must be >= 2");
        cfg.design = {DesignKind::one_sample, n, 0, 0};
    } else if (dkind == "two_sample") {
        const int n1 = require<int>(jd, "n1", "design.n1");
        const int n2 = require<int>(jd, "n2", "design.n2");
        if (n1 < 2 || n2 < 2) bad_field("design.n1/n2", "must be >= 2");
        cfg.design = {DesignKind::two_sample, 0, n1, n2};
    } else {
        bad_field("design.type", "must be one_sample or two_sample");
    }

    const json jt = require<json>(j, "truth");
    const auto tkind = require<std::string>(jt, "type", "truth.type");
    if (tkind == "iid") {
        cfg.truth.kind = TruthSpec::Kind::iid;
        cfg.truth.pi1 = require<double>(jt, "pi1", "truth.pi1");
        if (!(cfg.truth.pi1 >= 0.0 && cfg.truth.pi1 <= 1.0))
            bad_field("truth.pi1", "must be in [0,1]");
    } else if (tkind == "hmm") {
        cfg.truth.kind = TruthSpec::Kind::hmm;
        cfg.truth.hmm.p0 = require<double>(jt, "p0", "truth.p0");
        cfg.truth.hmm.p1 = require<double>(jt, "p1", "truth.p1");
        if (!(cfg.truth.hmm.p0 > 0.0 && cfg.truth.hmm.p0 < 1.0) ||
            !(cfg.truth.hmm.p1 > 0.0 && cfg.truth.hmm.p1 < 1.0))
            bad_field("truth.p0/p1", "must be in (0,1)");
    } else {
        bad_field("truth.type", "must be iid or hmm");
    }

    const json je = require<json>(j, "effect");
    const auto ekind = require<std::string>(je, "type", "effect.type");
    if (ekind == "mirrored_uniform")
        cfg.effect.kind = EffectSpec::Kind::mirrored_uniform;
    else if (ekind == "uniform")
        cfg.effect.kind = EffectSpec::Kind::uniform;
    else
        bad_field("effect.type", "must be mirrored_uniform or uniform");
    cfg.effect.lo = require<double>(je, "lo", "effect.lo");
    cfg.effect.hi = require<double>(je, "hi", "effect.hi");
    if (!(cfg.effect.lo < cfg.effect.hi)) bad_field("effect.lo", "must be < effect.hi");
    cfg.effect.noise_sd = optional_field<double>(je, "noise_sd", 0.0);
    if (cfg.effect.noise_sd < 0.0) bad_field("effect.noise_sd", "must be >= 0");

    const json jerr = require<json>(j, "error");
    const auto errkind = require<std::string>(jerr, "type", "error.type");
    if (errkind == "normal")
        cfg.error.kind = ErrorSpec::Kind::normal;
    else if (errkind == "student_t") {
        cfg.error.kind = ErrorSpec::Kind::student_t;
        cfg.error.df = require<int>(jerr, "df", "error.df");
        if (cfg.error.df < 1) bad_field("error.df", "must be >= 1");
    } else if (errkind == "cauchy")
        cfg.error.kind = ErrorSpec::Kind::cauchy;
    else if (errkind == "laplace")
        cfg.error.kind = ErrorSpec::Kind::laplace;
    else if (errkind == "exponential")
        cfg.error.kind = ErrorSpec::Kind::exponential;
    else
        bad_field("error.type", "unknown error model");

    cfg.reps = require<std::size_t>(j, "reps");
    if (cfg.reps < 1) bad_field("reps", "must be >= 1");
    cfg.seed = require<std::uint64_t>(j, "seed");

    if (j.contains("pi1_grid")) {
        const json jg = j.at("pi1_grid");
        cfg.pi1_grid.c_min = optional_field<double>(jg, "c_min", cfg.pi1_grid.c_min);
        cfg.pi1_grid.c_max = optional_field<double>(jg, "c_max", cfg.pi1_grid.c_max);
        cfg.pi1_grid.points = optional_field<int>(jg, "points", cfg.pi1_grid.points);
        if (!(cfg.pi1_grid.c_min > 0.0) || !(cfg.pi1_grid.c_max > cfg.pi1_grid.c_min) ||
            cfg.pi1_grid.points < 2)
            bad_field("pi1_grid", "need 0 < c_min < c_max and points >= 2");
    }

    const auto pvsrc = optional_field<std::string>(j, "pvalues", "t");
    if (pvsrc == "t")
        cfg.pvalue_source = PValueVector::Source::student_t;
    else if (pvsrc == "normal")
        cfg.pvalue_source = PValueVector::Source::normal;
    else
        bad_field("pvalues", "must be t or normal");

    job.levels = require<std::vector<double>>(j, "levels");
    if (job.levels.empty()) bad_field("levels", "must be non-empty");
    for (double g : job.levels)
        if (!(g > 0.0 && g < 1.0)) bad_field("levels", "entries must be in (0,1)");

    const json jp = require<json>(j, "procedures");
    if (!jp.is_array() || jp.empty()) bad_field("procedures", "must be a non-empty array");
    for (const auto& item : jp) {
        ProcedureSpec proc;
        const auto method = require<std::string>(item, "method", "procedures[].method");
        if (method == "fdtp") {
            proc.kind = ProcedureSpec::Kind::ck_fdtp;
            proc.alpha = require<double>(item, "alpha", "procedures[].alpha");
            if (!(proc.alpha > 0.0 && proc.alpha < 1.0))
                bad_field("procedures[].alpha", "must be in (0,1)");
            const auto dep =
                optional_field<std::string>(item, "dependence", "dependent");
            if (dep == "dependent")
                proc.dependence = ControlSpec::Dependence::dependent;
            else if (dep == "independent")
                proc.dependence = ControlSpec::Dependence::independent;
            else
                bad_field("procedures[].dependence", "must be dependent or independent");
        } else if (method == "fdr") {
            proc.kind = ProcedureSpec::Kind::ck_fdr;
        } else if (method == "kfwer") {
            proc.kind = ProcedureSpec::Kind::ck_kfwer;
            proc.k = require<int>(item, "k", "procedures[].k");
            if (proc.k < 1) bad_field("procedures[].k", "must be >= 1");
        } else if (method == "oracle_fdr") {
            proc.kind = ProcedureSpec::Kind::oracle_fdr;
        } else if (method == "bh") {
            proc.kind = ProcedureSpec::Kind::bh;
        } else if (method == "st") {
            proc.kind = ProcedureSpec::Kind::st;
        } else {
            bad_field("procedures[].method", "unknown method '" + method + "'");
        }
        job.procedures.push_back(proc);
    }

    if (j.contains("gold_standard")) {
        const json jg = j.at("gold_standard");
        if (!jg.is_array()) bad_field("gold_standard", "must be an array");
        for (const auto& item : jg) {
            SimulateJob::GoldRequest req;
            const auto method = require<std::string>(item, "method", "gold_standard[].method");
            if (method == "fdr") {
                req.spec.method = ControlSpec::Method::fdr;
            } else if (method == "fdtp") {
                req.spec.method = ControlSpec::Method::fdtp;
                req.spec.alpha = require<double>(item, "alpha", "gold_standard[].alpha");
            } else if (method == "kfwer") {
                req.spec.method = ControlSpec::Method::kfwer;
                req.spec.k = require<int>(item, "k", "gold_standard[].k");
            } else {
                bad_field("gold_standard[].method", "must be fdr, fdtp or kfwer");
            }
            req.spec.gamma = require<double>(item, "gamma", "gold_standard[].gamma");
            req.reps = optional_field<std::size_t>(item, "reps", 500);
            if (req.reps < 100) bad_field("gold_standard[].reps", "must be >= 100");
            try {
                req.spec.validate();
            } catch (const std::exception& e) {
                bad_field("gold_standard[]", e.what());
            }
            job.gold_standard.push_back(req);
        }
    }
    return job;
}

}  // namespace simcrit::io
