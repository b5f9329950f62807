#pragma once

// Experiment harness: JSON experiment configs, grid sweeps over
// (a, eps, blocklength), and deterministic emission as CSV, JSON, or
// gnuplot-ready text. Every emitter writes one unified column schema so rows
// from different modes can share files; cells that do not apply to a row are
// empty (CSV) or absent (JSON).

#include <array>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ehfbl/bounds.hpp"
#include "ehfbl/codec.hpp"
#include "ehfbl/ehmodel.hpp"
#include "ehfbl/errors.hpp"

namespace ehfbl::harness {

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    ehmodel::HarvestModel harvest;
    bounds::ChannelParams channel;
    std::vector<long long> n_grid;    // transmit blocklengths (achievable / simulate)
    std::vector<double> n_hat_grid;   // total blocklengths (closed-form bound)
    std::vector<double> eps_grid;
    std::vector<double> a_grid{1.0};
    long long trials = 10000;
    long long num_messages = 16;
    std::uint64_t seed = 0;
    std::string mode;  // optional default subcommand recorded in the file
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const char* where,
                                std::initializer_list<const char*> known) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok)
            throw ParseError(std::string("config: unknown key \"") + key + "\" in " + where);
    }
}

template <typename T>
T get_as(const nlohmann::json& obj, const char* key) {
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: bad value for \"") + key + "\": " + e.what());
    }
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("config: top level must be a JSON object");
    detail::reject_unknown_keys(j, "top level",
                                {"channel", "harvest", "n_grid", "n_hat_grid", "eps_grid",
                                 "a_grid", "trials", "num_messages", "seed", "mode"});
    if (!j.contains("channel")) throw ParseError("config: missing \"channel\"");
    if (!j.contains("harvest")) throw ParseError("config: missing \"harvest\"");

    ExperimentConfig cfg;
    const auto& ch = j.at("channel");
    if (!ch.is_object()) throw ParseError("config: \"channel\" must be an object");
    detail::reject_unknown_keys(ch, "channel", {"noise_var"});
    cfg.channel.noise_var = detail::get_as<double>(ch, "noise_var");
    cfg.channel.validate();

    const auto& hv = j.at("harvest");
    if (!hv.is_object()) throw ParseError("config: \"harvest\" must be an object");
    detail::reject_unknown_keys(hv, "harvest", {"kind", "mean", "extra"});
    const auto kind_name = detail::get_as<std::string>(hv, "kind");
    ehmodel::HarvestKind kind;
    if (kind_name == "constant") kind = ehmodel::HarvestKind::constant;
    else if (kind_name == "exponential") kind = ehmodel::HarvestKind::exponential;
    else if (kind_name == "uniform") kind = ehmodel::HarvestKind::uniform;
    else if (kind_name == "bernoulli_scaled") kind = ehmodel::HarvestKind::bernoulli_scaled;
    else
        throw ValidationError("config: unknown harvest kind \"" + kind_name + "\"");
    const double mean = detail::get_as<double>(hv, "mean");
    const double extra = hv.contains("extra") ? detail::get_as<double>(hv, "extra") : 0.0;
    cfg.harvest = ehmodel::HarvestModel::make(kind, mean, extra);

    if (j.contains("n_grid") && j.contains("n_hat_grid"))
        throw ParseError("config: specify exactly one of \"n_grid\" / \"n_hat_grid\"");
    if (j.contains("n_grid")) {
        cfg.n_grid = detail::get_as<std::vector<long long>>(j, "n_grid");
        for (long long n : cfg.n_grid)
            if (n < 2)
                throw ValidationError("config: n_grid entries must be >= 2, got " +
                                      std::to_string(n));
    }
    if (j.contains("n_hat_grid")) {
        cfg.n_hat_grid = detail::get_as<std::vector<double>>(j, "n_hat_grid");
        for (double nh : cfg.n_hat_grid)
            if (!(nh >= 6.0))
                throw ValidationError("config: n_hat_grid entries must be >= 6");
    }
    if (j.contains("eps_grid")) {
        cfg.eps_grid = detail::get_as<std::vector<double>>(j, "eps_grid");
        for (double e : cfg.eps_grid)
            if (!(e > 0.0 && e < 1.0))
                throw ValidationError("config: eps_grid entries must lie in (0,1), got " +
                                      std::to_string(e));
    }
    if (j.contains("a_grid")) {
        cfg.a_grid = detail::get_as<std::vector<double>>(j, "a_grid");
        if (cfg.a_grid.empty()) throw ValidationError("config: a_grid must be non-empty");
        for (double a : cfg.a_grid)
            if (!(a >= 0.0) || !std::isfinite(a))
                throw ValidationError("config: a_grid entries must be finite and >= 0");
    }
    if (j.contains("trials")) {
        cfg.trials = detail::get_as<long long>(j, "trials");
        if (cfg.trials < 0) throw ValidationError("config: trials must be >= 0");
    }
    if (j.contains("num_messages")) {
        cfg.num_messages = detail::get_as<long long>(j, "num_messages");
        if (cfg.num_messages < 2) throw ValidationError("config: num_messages must be >= 2");
    }
    if (j.contains("seed")) cfg.seed = detail::get_as<std::uint64_t>(j, "seed");
    if (j.contains("mode")) {
        cfg.mode = detail::get_as<std::string>(j, "mode");
        if (cfg.mode != "bounds" && cfg.mode != "moments" && cfg.mode != "simulate" &&
            cfg.mode != "sweep" && cfg.mode != "plot-data")
            throw ValidationError("config: unknown mode \"" + cfg.mode + "\"");
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("config: cannot open \"" + path + "\"");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: JSON parse failure: ") + e.what());
    }
    return parse_config(j);
}

// ---------------------------------------------------------------------------
// Unified result rows
// ---------------------------------------------------------------------------

// Numeric columns of the unified schema, in emission order. NaN marks a cell
// that does not apply to the row.
enum Col : int {
    harvest_mean, harvest_extra, noise_var, seed, a, eps, n, N_save, E0, eta, n_total,
    n_hat, eh_capacity_bits, eh_dispersion_bits2, var_Y, var_Z, be_K, cheb_bound,
    kolm_bound, e2_bound, e3_bound, epsilon_n, feasible, ach_log_M_bits, ach_rate_bits,
    ach_capacity_term, ach_dispersion_term, ach_slack_term, ach_constant_term,
    thm1_log_M_bits, thm1_rate_bits, thm1_capacity_term, thm1_save_penalty,
    thm1_dispersion_term, thm1_taylor_term, thm1_log_term, thm1_log_M_bits_sharp,
    thm1_log_M_bits_case_correct, thm1_backoff_norm, thm1_n0, thm1_eps_n0, thm1_fhat,
    thm1_Chat, trials, num_messages, err_count, err_rate, err_lo, err_hi, e0_count,
    e0_rate, e0_lo, e0_hi, e1_count, e1_rate, e1_lo, e1_hi, e2_count, e2_rate, e2_lo,
    e2_hi, e3_count, e3_rate, e3_lo, e3_hi,
    kNumCols
};

inline const std::array<const char*, Col::kNumCols>& column_names() {
    static const std::array<const char*, Col::kNumCols> names = {
        "harvest_mean", "harvest_extra", "noise_var", "seed", "a", "eps", "n", "N_save",
        "E0", "eta", "n_total", "n_hat", "eh_capacity_bits", "eh_dispersion_bits2",
        "var_Y", "var_Z", "be_K", "cheb_bound", "kolm_bound", "e2_bound", "e3_bound",
        "epsilon_n", "feasible", "ach_log_M_bits", "ach_rate_bits", "ach_capacity_term",
        "ach_dispersion_term", "ach_slack_term", "ach_constant_term", "thm1_log_M_bits",
        "thm1_rate_bits", "thm1_capacity_term", "thm1_save_penalty",
        "thm1_dispersion_term", "thm1_taylor_term", "thm1_log_term",
        "thm1_log_M_bits_sharp", "thm1_log_M_bits_case_correct", "thm1_backoff_norm",
        "thm1_n0", "thm1_eps_n0", "thm1_fhat", "thm1_Chat", "trials", "num_messages",
        "err_count", "err_rate", "err_lo", "err_hi", "e0_count", "e0_rate", "e0_lo",
        "e0_hi", "e1_count", "e1_rate", "e1_lo", "e1_hi", "e2_count", "e2_rate", "e2_lo",
        "e2_hi", "e3_count", "e3_rate", "e3_lo", "e3_hi"};
    return names;
}

struct ResultRow {
    std::string mode;          // "bounds" | "simulate"
    std::string harvest_kind;  // constant | exponential | uniform | bernoulli_scaled
    std::array<double, Col::kNumCols> v;

    ResultRow() { v.fill(std::numeric_limits<double>::quiet_NaN()); }
    double& operator[](Col c) { return v[static_cast<std::size_t>(c)]; }
    double operator[](Col c) const { return v[static_cast<std::size_t>(c)]; }
};

namespace detail {

inline void fill_common(ResultRow& row, const ExperimentConfig& cfg) {
    row.harvest_kind = ehmodel::to_string(cfg.harvest.kind);
    row[Col::harvest_mean] = cfg.harvest.mean;
    row[Col::harvest_extra] = cfg.harvest.extra;
    row[Col::noise_var] = cfg.channel.noise_var;
    row[Col::var_Y] = cfg.harvest.variance();
    row[Col::var_Z] = ehmodel::increment_variance(cfg.harvest);
    row[Col::be_K] = bounds::berry_esseen_constant();
    row[Col::eh_capacity_bits] = bounds::eh_capacity(cfg.harvest, cfg.channel);
    row[Col::eh_dispersion_bits2] = bounds::eh_dispersion(cfg.harvest, cfg.channel);
}

inline double extra_or_nan(const bounds::BoundReport& r, const char* key) {
    const auto it = r.extras.find(key);
    return it == r.extras.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
}

inline double term_or_nan(const bounds::BoundReport& r, const char* key) {
    const auto it = r.terms.find(key);
    return it == r.terms.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
}

}  // namespace detail

inline ResultRow make_achievable_row(const ExperimentConfig& cfg, double a_val, double eps_val,
                                     long long n_val) {
    ResultRow row;
    row.mode = "bounds";
    detail::fill_common(row, cfg);
    row[Col::seed] = static_cast<double>(cfg.seed);
    row[Col::a] = a_val;
    row[Col::eps] = eps_val;
    row[Col::n] = static_cast<double>(n_val);

    const auto rep = bounds::achievable_log_M(n_val, eps_val, a_val, cfg.harvest, cfg.channel);
    row[Col::N_save] = detail::extra_or_nan(rep, "N_save");
    row[Col::E0] = detail::extra_or_nan(rep, "E0");
    row[Col::eta] = detail::extra_or_nan(rep, "eta");
    row[Col::n_total] = detail::extra_or_nan(rep, "n_total");
    row[Col::cheb_bound] = detail::extra_or_nan(rep, "cheb_bound");
    row[Col::kolm_bound] = detail::extra_or_nan(rep, "kolm_bound");
    row[Col::e2_bound] = detail::extra_or_nan(rep, "e2_bound");
    row[Col::epsilon_n] = rep.epsilon_n;
    row[Col::feasible] = rep.feasible ? 1.0 : 0.0;
    if (rep.feasible) {
        row[Col::ach_log_M_bits] = rep.log_M_bits;
        row[Col::ach_rate_bits] = detail::extra_or_nan(rep, "rate_bits_per_use");
        row[Col::ach_capacity_term] = detail::term_or_nan(rep, "capacity_term");
        row[Col::ach_dispersion_term] = detail::term_or_nan(rep, "dispersion_term");
        row[Col::ach_slack_term] = detail::term_or_nan(rep, "slack_term");
        row[Col::ach_constant_term] = detail::term_or_nan(rep, "constant_term");
    }
    return row;
}

inline ResultRow make_theorem1_row(const ExperimentConfig& cfg, double a_val, double eps_val,
                                   double n_hat_val) {
    ResultRow row;
    row.mode = "bounds";
    detail::fill_common(row, cfg);
    row[Col::seed] = static_cast<double>(cfg.seed);
    row[Col::a] = a_val;
    row[Col::eps] = eps_val;
    row[Col::n_hat] = n_hat_val;

    const auto rep =
        bounds::theorem1_closed_form(n_hat_val, eps_val, a_val, cfg.harvest, cfg.channel);
    row[Col::feasible] = rep.feasible ? 1.0 : 0.0;
    row[Col::thm1_n0] = detail::extra_or_nan(rep, "n0");
    if (rep.feasible) {
        row[Col::thm1_log_M_bits] = rep.log_M_bits;
        row[Col::thm1_rate_bits] = detail::extra_or_nan(rep, "rate_bits_per_use");
        row[Col::thm1_capacity_term] = detail::term_or_nan(rep, "capacity_term");
        row[Col::thm1_save_penalty] = detail::term_or_nan(rep, "save_penalty");
        row[Col::thm1_dispersion_term] = detail::term_or_nan(rep, "dispersion_term");
        row[Col::thm1_taylor_term] = detail::term_or_nan(rep, "taylor_term");
        row[Col::thm1_log_term] = detail::term_or_nan(rep, "log_term");
        row[Col::thm1_log_M_bits_sharp] = detail::extra_or_nan(rep, "log_M_bits_sharp");
        row[Col::thm1_log_M_bits_case_correct] =
            detail::extra_or_nan(rep, "log_M_bits_case_correct");
        row[Col::thm1_backoff_norm] = detail::extra_or_nan(rep, "backoff_normalized");
        row[Col::thm1_eps_n0] = detail::extra_or_nan(rep, "eps_n0");
        row[Col::thm1_fhat] = detail::extra_or_nan(rep, "fhat");
        row[Col::thm1_Chat] = detail::extra_or_nan(rep, "Chat");
    }
    return row;
}

inline ResultRow make_simulate_row(const ExperimentConfig& cfg, double a_val, long long n_val,
                                   std::uint64_t row_seed, int threads) {
    ResultRow row;
    row.mode = "simulate";
    detail::fill_common(row, cfg);
    row[Col::seed] = static_cast<double>(row_seed);
    row[Col::a] = a_val;
    row[Col::n] = static_cast<double>(n_val);

    const auto sched = bounds::make_schedule(n_val, a_val, cfg.harvest);
    const auto sim = codec::SimConfig::from_schedule(cfg.harvest, cfg.channel, n_val,
                                                     cfg.num_messages, sched);
    row[Col::N_save] = static_cast<double>(sched.N_save);
    row[Col::E0] = sched.E0;
    row[Col::eta] = sched.eta;
    row[Col::n_total] = static_cast<double>(n_val + sched.N_save);
    row[Col::cheb_bound] = ehmodel::chebyshev_bound_E0(sched.N_save, sched.E0, cfg.harvest);
    row[Col::kolm_bound] = ehmodel::kolmogorov_bound_E1(n_val, sched.E0, cfg.harvest);
    row[Col::e2_bound] = std::exp2(-static_cast<double>(n_val) * sched.eta);
    // Berry-Esseen bound on the miss event at this (M, n, eta):
    // Phi( (log2 M + n eta - n C) / sqrt(n V) ) + K / sqrt(n).
    {
        const double nn = static_cast<double>(n_val);
        const double u = (std::log2(static_cast<double>(cfg.num_messages)) + nn * sched.eta -
                          nn * row[Col::eh_capacity_bits]) /
                         std::sqrt(nn * row[Col::eh_dispersion_bits2]);
        row[Col::e3_bound] =
            numerics::std_normal_cdf(u) + bounds::berry_esseen_constant() / std::sqrt(nn);
    }
    row[Col::trials] = static_cast<double>(cfg.trials);
    row[Col::num_messages] = static_cast<double>(cfg.num_messages);

    const auto mc = codec::monte_carlo(sim, cfg.trials, row_seed, threads);
    const auto put = [&row](Col count, Col rate, Col lo, Col hi,
                            const ehmodel::RateEstimate& est) {
        row[count] = static_cast<double>(est.failures);
        row[rate] = est.rate;
        row[lo] = est.lo;
        row[hi] = est.hi;
    };
    put(Col::err_count, Col::err_rate, Col::err_lo, Col::err_hi, mc.err);
    put(Col::e0_count, Col::e0_rate, Col::e0_lo, Col::e0_hi, mc.e0);
    put(Col::e1_count, Col::e1_rate, Col::e1_lo, Col::e1_hi, mc.e1);
    put(Col::e2_count, Col::e2_rate, Col::e2_lo, Col::e2_hi, mc.e2);
    put(Col::e3_count, Col::e3_rate, Col::e3_lo, Col::e3_hi, mc.e3);
    return row;
}

// Grid sweep in a fixed order (a-major, then eps, then blocklength; bound rows
// before simulate rows). Simulate row k uses seed cfg.seed + k so rows stay
// independent yet reproducible; nothing here depends on `threads`.
inline std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const std::string& mode,
                                        int threads = 1) {
    if (mode != "bounds" && mode != "simulate" && mode != "sweep" && mode != "plot-data")
        throw ValidationError("run_sweep: unknown mode \"" + mode + "\"");
    const bool want_bounds = mode != "simulate";
    const bool want_sim = mode == "simulate" || (mode == "sweep" && cfg.trials > 0);

    if (want_bounds) {
        if (cfg.eps_grid.empty())
            throw ValidationError("run_sweep: mode \"" + mode + "\" needs eps_grid");
        if (cfg.n_grid.empty() && cfg.n_hat_grid.empty())
            throw ValidationError("run_sweep: mode \"" + mode +
                                  "\" needs n_grid or n_hat_grid");
    }
    if (want_sim) {
        if (cfg.n_grid.empty())
            throw ValidationError("run_sweep: simulation needs n_grid");
        if (cfg.trials < 1) throw ValidationError("run_sweep: simulation needs trials >= 1");
    }

    std::vector<ResultRow> rows;
    if (want_bounds) {
        for (double a_val : cfg.a_grid)
            for (double eps_val : cfg.eps_grid) {
                for (long long n_val : cfg.n_grid)
                    rows.push_back(make_achievable_row(cfg, a_val, eps_val, n_val));
                for (double nh : cfg.n_hat_grid)
                    rows.push_back(make_theorem1_row(cfg, a_val, eps_val, nh));
            }
    }
    if (want_sim) {
        std::uint64_t ordinal = 0;
        for (double a_val : cfg.a_grid)
            for (long long n_val : cfg.n_grid)
                rows.push_back(
                    make_simulate_row(cfg, a_val, n_val, cfg.seed + ordinal++, threads));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace detail {

// Fixed %.12g rendering: enough digits to be stable, short enough to be
// readable; identical bytes for identical doubles on every run.
inline std::string format_cell(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace detail

inline std::string emit_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << "mode,harvest_kind";
    for (const char* name : column_names()) out << ',' << name;
    out << '\n';
    for (const auto& row : rows) {
        out << row.mode << ',' << row.harvest_kind;
        for (double v : row.v) out << ',' << detail::format_cell(v);
        out << '\n';
    }
    return out.str();
}

// JSON array of objects; NaN cells are omitted. nlohmann prints doubles with
// shortest-roundtrip digits, so parse_json_rows(emit_json(r)) is lossless.
inline std::string emit_json(const std::vector<ResultRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json obj;
        obj["mode"] = row.mode;
        obj["harvest_kind"] = row.harvest_kind;
        for (int c = 0; c < Col::kNumCols; ++c)
            if (!std::isnan(row.v[static_cast<std::size_t>(c)]))
                obj[column_names()[static_cast<std::size_t>(c)]] =
                    row.v[static_cast<std::size_t>(c)];
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

inline std::vector<ResultRow> parse_json_rows(const std::string& text) {
    nlohmann::json arr;
    try {
        arr = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("rows: JSON parse failure: ") + e.what());
    }
    if (!arr.is_array()) throw ParseError("rows: top level must be a JSON array");
    std::vector<ResultRow> rows;
    for (const auto& obj : arr) {
        if (!obj.is_object()) throw ParseError("rows: entries must be objects");
        ResultRow row;
        for (const auto& [key, val] : obj.items()) {
            if (key == "mode") {
                row.mode = val.get<std::string>();
                continue;
            }
            if (key == "harvest_kind") {
                row.harvest_kind = val.get<std::string>();
                continue;
            }
            bool known = false;
            for (int c = 0; c < Col::kNumCols; ++c) {
                if (key == column_names()[static_cast<std::size_t>(c)]) {
                    if (!val.is_number())
                        throw ParseError("rows: column \"" + key + "\" must be numeric");
                    row.v[static_cast<std::size_t>(c)] = val.get<double>();
                    known = true;
                    break;
                }
            }
            if (!known) throw ParseError("rows: unknown column \"" + key + "\"");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// gnuplot text: one block per (a, eps) pair in row order, blank-line
// separated; x = total blocklength, y = rate, then log M and feasibility.
// Closed-form rows plot against n_hat. `plot 'f.dat' every :::k::k` selects
// block k.
inline std::string emit_plot_data(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << "# columns: blocklength rate_bits_per_use log_M_bits feasible\n";
    bool have_block = false;
    double cur_a = std::numeric_limits<double>::quiet_NaN();
    double cur_eps = std::numeric_limits<double>::quiet_NaN();
    auto same = [](double x, double y) {
        return (std::isnan(x) && std::isnan(y)) || x == y;
    };
    for (const auto& row : rows) {
        if (row.mode != "bounds") continue;
        if (!have_block || !same(row[Col::a], cur_a) || !same(row[Col::eps], cur_eps)) {
            if (have_block) out << '\n';
            cur_a = row[Col::a];
            cur_eps = row[Col::eps];
            have_block = true;
            out << "# a=" << detail::format_cell(cur_a) << " eps="
                << detail::format_cell(cur_eps) << '\n';
        }
        const bool closed = !std::isnan(row[Col::n_hat]);
        const double x = closed ? row[Col::n_hat] : row[Col::n_total];
        const double rate = closed ? row[Col::thm1_rate_bits] : row[Col::ach_rate_bits];
        const double logm = closed ? row[Col::thm1_log_M_bits] : row[Col::ach_log_M_bits];
        auto cell = [](double v) {
            return std::isnan(v) ? std::string("nan") : detail::format_cell(v);
        };
        out << cell(x) << ' ' << cell(rate) << ' ' << cell(logm) << ' '
            << cell(row[Col::feasible]) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Threads and the moments report
// ---------------------------------------------------------------------------

// EHFBL_THREADS caps worker threads; unset falls back to the hardware count.
inline int resolve_threads() {
    const char* env = std::getenv("EHFBL_THREADS");
    if (env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == nullptr || *end != '\0' || v < 1 || v > 1024)
            throw ValidationError(
                "EHFBL_THREADS must be an integer in [1,1024], got \"" + std::string(env) +
                "\"");
        return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Moments of the per-letter information density by all three routes plus the
// quadrature-vs-MC consistency ratio (in standard errors).
inline nlohmann::json moments_report(const ExperimentConfig& cfg, int order = 64) {
    const double power = cfg.harvest.mean;
    const auto closed = bounds::info_density_moments_closed(power, cfg.channel);
    const auto quad = bounds::info_density_moments_quadrature(power, cfg.channel, order);
    const long long trials = cfg.trials > 1 ? cfg.trials : 2;
    const auto mc = bounds::info_density_moments_mc(power, cfg.channel, trials, cfg.seed);
    const double worst = bounds::validate_moment_consistency(quad, mc);

    const auto pack = [](const bounds::MomentSet& ms, bool with_se) {
        nlohmann::json j{{"mean_bits", ms.mean_bits},
                         {"var_bits2", ms.var_bits2},
                         {"abs3_bits3", ms.abs3_bits3},
                         {"be_K", ms.be_K}};
        if (with_se) {
            j["se_mean"] = ms.se_mean;
            j["se_var"] = ms.se_var;
            j["se_abs3"] = ms.se_abs3;
        }
        return j;
    };
    return nlohmann::json{{"power", power},
                          {"noise_var", cfg.channel.noise_var},
                          {"quadrature_order", order},
                          {"mc_trials", trials},
                          {"seed", cfg.seed},
                          {"closed_form", pack(closed, false)},
                          {"quadrature", pack(quad, false)},
                          {"monte_carlo", pack(mc, true)},
                          {"max_se_ratio", worst}};
}

}  // namespace ehfbl::harness
