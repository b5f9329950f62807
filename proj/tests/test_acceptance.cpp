// Acceptance harness: seven end-to-end criteria, one [PASS]/[FAIL] line each.
// Runs without any test framework so the checks double as a usage reference.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ehfbl/ehfbl.hpp"

using namespace ehfbl;
using bounds::ChannelParams;
using ehmodel::HarvestModel;

namespace {

const ChannelParams kUnitNoise{1.0};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Checker {
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void close(double got, double want, double tol, const std::string& what) {
        if (!(std::abs(got - want) <= tol))
            failures.push_back(what + ": got " + fmt(got) + ", want " + fmt(want) +
                               " (+/- " + fmt(tol) + ")");
    }
    void rel(double got, double want, double rtol, const std::string& what) {
        close(got, want, rtol * std::abs(want), what);
    }
    void le(double a, double b, const std::string& what) {
        if (!(a <= b)) failures.push_back(what + ": " + fmt(a) + " > " + fmt(b));
    }
};

// binomial standard error of an empirical rate
double se(const ehmodel::RateEstimate& r) {
    return std::sqrt(r.rate * (1.0 - r.rate) / static_cast<double>(r.trials));
}

// --------------------------------------------------------------------------
// 1. closed-form pins
// --------------------------------------------------------------------------

Checker criterion1() {
    Checker c;
    const auto expo = HarvestModel::exponential(1.0);

    c.close(bounds::awgn_capacity(1.0, 1.0), 0.5, 1e-16, "awgn capacity at 0 dB");
    c.close(bounds::awgn_dispersion(1.0, 1.0), 0.78051336787710292, 1e-14,
            "awgn dispersion at 0 dB");
    c.close(bounds::eh_capacity(expo, kUnitNoise), 0.5, 1e-16, "eh capacity");
    c.close(bounds::eh_dispersion(expo, kUnitNoise), 1.0406844905028039, 1e-14,
            "eh dispersion");
    c.close(bounds::normal_approx_log_M(1000, 1.0, 1.0, 0.025), 445.24317429122488, 1e-8,
            "normal approximation log M");

    const auto ms = bounds::info_density_moments_closed(1.0, kUnitNoise);
    c.close(ms.abs3_bits3, 2.703452464495135, 1e-13, "third absolute moment");
    c.close(ms.be_K, 1.2732395447351627, 1e-14, "berry-esseen ratio");

    const auto s = bounds::make_schedule(10000, 1.0, expo);
    c.expect(s.N_save == 922, "schedule N(10000) = 922, got " + std::to_string(s.N_save));
    c.close(s.E0, 461.0, 1e-12, "schedule E0(10000)");
    c.close(s.eta, std::log2(10000.0) / 10000.0, 1e-18, "schedule eta(10000)");
    const auto s128 = bounds::make_schedule(128, 1.0, expo);
    c.expect(s128.N_save == 55, "schedule N(128) = 55, got " + std::to_string(s128.N_save));
    c.close(s128.E0, 27.5, 1e-12, "schedule E0(128)");
    c.close(s128.eta, 7.0 / 128.0, 1e-18, "schedule eta(128)");
    const auto s1024 = bounds::make_schedule(1024, 1.0, expo);
    c.close(s1024.eta, 0.009765625, 1e-18, "schedule eta(1024)");
    c.close(std::exp2(-1024.0 * s1024.eta), 1.0 / 1024.0, 1e-18,
            "wrong-message bound 2^{-n eta} at n=1024");

    const auto b = bounds::epsilon_n_budget(4096, 0.1, 1.0, expo);
    c.rel(b.cheb, 0.00750469043152, 1e-10, "save shortfall bound at n=4096");
    c.rel(b.kolm, 0.173016202669, 1e-10, "outage bound at n=4096");
    c.close(b.e2, 1.0 / 4096.0, 1e-18, "wrong-message bound at n=4096");
    c.rel(b.be, 1.2732395447351627 / 64.0, 1e-12, "berry-esseen term at n=4096");
    c.close(b.value, -0.10065940161188855, 1e-12, "residual budget (4096, eps=0.1)");
    c.close(bounds::epsilon_n(4096, 0.5, 1.0, expo), 0.29934059838811145, 1e-12,
            "residual budget (4096, eps=0.5)");

    const auto ach = bounds::achievable_log_M(4096, 0.5, 1.0, expo, kUnitNoise);
    c.expect(ach.feasible, "achievable (4096, eps=0.5) should be feasible");
    c.rel(ach.log_M_bits, 2000.6385718600706, 1e-10, "achievable log M (4096, eps=0.5)");
    c.close(ach.extras.at("n_total"), 4629.0, 1e-12, "total blocklength (4096)");
    c.close(ach.term_sum(), ach.log_M_bits, 1e-9, "achievable term decomposition");

    const auto cst = bounds::achievable_log_M(65536, 0.1, 1.0, HarvestModel::constant(1.0),
                                              kUnitNoise);
    c.close(cst.epsilon_n, 0.030008173639236421, 1e-12,
            "residual budget (constant, 65536, eps=0.1)");
    c.rel(cst.log_M_bits, 32259.851400019009, 1e-10,
          "achievable log M (constant, 65536, eps=0.1)");

    const auto thm = bounds::theorem1_closed_form(1e5, 0.1, 1.0, HarvestModel::constant(1.0),
                                                  kUnitNoise);
    c.expect(thm.feasible, "closed form at n_hat=1e5 should be feasible");
    c.close(thm.extras.at("n0"), 1e5, 1e-9, "onset decade");
    c.close(thm.extras.at("eps_n0"), 0.035617643481491949, 1e-12, "onset residual budget");
    c.rel(thm.extras.at("fhat"), 12.757262716950316, 1e-10, "quantile slope bound");
    c.rel(thm.extras.at("Chat"), 104.11349542527641, 1e-10, "taylor constant");
    c.close(thm.log_M_bits, 47589.466528, 1e-3, "closed-form log M at n_hat=1e5");
    c.close(thm.extras.at("log_M_bits_sharp"), 47468.377458, 1e-3,
            "sharp-dispersion variant at n_hat=1e5");
    c.close(thm.term_sum(), thm.log_M_bits, 1e-9, "closed-form term decomposition");
    return c;
}

// --------------------------------------------------------------------------
// 2. moment consistency across evaluation routes
// --------------------------------------------------------------------------

Checker criterion2() {
    Checker c;
    for (const auto& [p, nv] : {std::pair{1.0, 1.0}, {2.5, 0.7}}) {
        const ChannelParams ch{nv};
        const std::string tag = " (P=" + fmt(p) + ", nv=" + fmt(nv) + ")";
        const auto closed = bounds::info_density_moments_closed(p, ch);
        const auto quad = bounds::info_density_moments_quadrature(p, ch);
        c.close(quad.mean_bits, closed.mean_bits, 1e-12, "quadrature mean" + tag);
        c.close(quad.var_bits2, closed.var_bits2, 1e-12, "quadrature variance" + tag);
        c.close(quad.abs3_bits3, closed.abs3_bits3, 1e-5, "quadrature |.|^3 moment" + tag);
        c.close(quad.be_K, closed.be_K, 1e-6, "quadrature berry-esseen ratio" + tag);

        const auto mc = bounds::info_density_moments_mc(p, ch, 1000000, 20260817);
        c.le(std::abs(mc.mean_bits - closed.mean_bits), 5.0 * mc.se_mean,
             "monte carlo mean within 5 SE" + tag);
        c.le(std::abs(mc.var_bits2 - closed.var_bits2), 5.0 * mc.se_var,
             "monte carlo variance within 5 SE" + tag);
        c.le(std::abs(mc.abs3_bits3 - closed.abs3_bits3), 5.0 * mc.se_abs3,
             "monte carlo |.|^3 moment within 5 SE" + tag);
        double worst = 0.0;
        try {
            worst = bounds::validate_moment_consistency(quad, mc);
        } catch (const NumericError& e) {
            c.expect(false, std::string("consistency check threw: ") + e.what());
            continue;
        }
        c.le(worst, 5.0, "max quadrature-vs-MC deviation in SE units" + tag);
    }
    return c;
}

// --------------------------------------------------------------------------
// 3. per-event bound dominance over a configuration grid
// --------------------------------------------------------------------------

Checker criterion3() {
    Checker c;
    struct Cfg {
        ehmodel::HarvestKind kind;
        double mean, extra;
        long long n, N_save;
        double E0;
    };
    const Cfg grid[] = {
        {ehmodel::HarvestKind::constant, 0.0, 0.0, 0, 0, 0.0},  // placeholder, index 0 unused
        {ehmodel::HarvestKind::exponential, 1.0, 0.0, 50, 50, 25.0},
        {ehmodel::HarvestKind::exponential, 1.0, 0.0, 32, 80, 30.0},
        {ehmodel::HarvestKind::uniform, 1.0, 0.0, 64, 40, 20.0},
        {ehmodel::HarvestKind::uniform, 1.0, 0.0, 20, 30, 18.0},
        {ehmodel::HarvestKind::bernoulli_scaled, 1.0, 0.5, 40, 60, 24.0},
        {ehmodel::HarvestKind::bernoulli_scaled, 1.0, 0.25, 25, 90, 40.0},
        {ehmodel::HarvestKind::exponential, 2.0, 0.0, 60, 45, 40.0},
        {ehmodel::HarvestKind::uniform, 2.0, 0.0, 80, 70, 90.0},
        {ehmodel::HarvestKind::bernoulli_scaled, 2.0, 0.5, 96, 100, 120.0},
        {ehmodel::HarvestKind::exponential, 0.5, 0.0, 48, 64, 20.0},
    };
    for (int i = 1; i <= 10; ++i) {
        const Cfg& g = grid[i];
        const std::string tag = " [config " + std::to_string(i) + "]";
        const auto m = HarvestModel::make(g.kind, g.mean, g.extra);

        codec::SimConfig sim;
        sim.harvest = m;
        sim.channel = kUnitNoise;
        sim.n = g.n;
        sim.num_messages = 16;
        sim.N_save = g.N_save;
        sim.E0 = g.E0;
        sim.eta = std::log2(static_cast<double>(g.n)) / static_cast<double>(g.n);

        const double cheb = ehmodel::chebyshev_bound_E0(g.N_save, g.E0, m);
        const double kolm = ehmodel::kolmogorov_bound_E1(g.n, g.E0, m);
        const double e2b = std::exp2(-static_cast<double>(g.n) * sim.eta);

        // the grid is chosen so every bound is non-trivial yet non-vacuous
        for (const auto& [name, val] : {std::pair{"save shortfall", cheb},
                                        {"outage", kolm},
                                        {"wrong message", e2b}}) {
            c.expect(val > 0.01 && val < 0.9,
                     std::string(name) + " bound outside (0.01, 0.9)" + tag + ": " + fmt(val));
        }

        // The analytic bounds hold for the random-codebook ensemble, so the
        // empirical side must average over codebooks too. The model-level
        // estimators redraw the codeword energies every trial; a fixed
        // codebook would only measure the conditional rate, which lands on
        // either side of the ensemble bound depending on how energetic its
        // first row happens to be. Each comparison carries the 3-standard-
        // error Monte Carlo slack.
        const auto e0 = ehmodel::estimate_save_failure(m, g.N_save, g.E0, 10000,
                                                       1000 + static_cast<std::uint64_t>(i));
        const auto e1 = ehmodel::estimate_outage(m, g.n, g.E0, 10000,
                                                 2000 + static_cast<std::uint64_t>(i));
        c.le(e0.rate, cheb + 3.0 * se(e0), "empirical save shortfall vs bound" + tag);
        c.le(e1.rate, kolm + 3.0 * se(e1), "empirical outage vs bound" + tag);

        // wrong-message passes barely depend on the sent row's energy, so the
        // full codec run is a fair estimator for this event
        const auto mc = codec::monte_carlo(sim, 10000, 3000 + static_cast<std::uint64_t>(i),
                                           harness::resolve_threads());
        c.le(mc.e2.rate, e2b + 3.0 * se(mc.e2), "empirical wrong-message rate vs bound" + tag);
    }
    return c;
}

// --------------------------------------------------------------------------
// 4. berry-esseen distance envelope for standardized density sums
// --------------------------------------------------------------------------

Checker criterion4() {
    Checker c;
    const double C = 0.5;
    const double V = 1.0406844905028039;
    const double dkw = 0.005146997847;  // sqrt(ln(2/0.01) / (2 * 1e5))
    const long long samples = 100000;
    const double envelopes[] = {0.32345688, 0.16430194, 0.084724469};

    int which = 0;
    double prev_ks = 2.0;
    for (long long n : {16LL, 64LL, 256LL}) {
        const std::string tag = " (n=" + std::to_string(n) + ")";
        const double envelope =
            bounds::berry_esseen_constant() / std::sqrt(static_cast<double>(n)) + dkw;
        c.close(envelope, envelopes[which], 1e-6, "envelope constant" + tag);

        std::vector<double> z(static_cast<std::size_t>(samples));
        const double scale = std::sqrt(static_cast<double>(n) * V);
        for (long long t = 0; t < samples; ++t) {
            auto rng = numerics::derive_stream(42, static_cast<std::uint64_t>(t));
            double s = 0.0;
            for (long long k = 0; k < n; ++k)
                s += bounds::sample_info_density(rng, 1.0, kUnitNoise);
            z[static_cast<std::size_t>(t)] = (s - static_cast<double>(n) * C) / scale;
        }
        std::sort(z.begin(), z.end());
        double ks = 0.0;
        for (long long i = 0; i < samples; ++i) {
            const double f = numerics::std_normal_cdf(z[static_cast<std::size_t>(i)]);
            const double nn = static_cast<double>(samples);
            ks = std::max(ks, std::max(f - static_cast<double>(i) / nn,
                                       static_cast<double>(i + 1) / nn - f));
        }
        c.le(ks, envelope, "kolmogorov distance vs envelope" + tag);
        c.le(ks, prev_ks, "kolmogorov distance should not grow with n" + tag);
        prev_ks = ks;
        ++which;
    }
    return c;
}

// --------------------------------------------------------------------------
// 5. end-to-end budget dominance at n=128
// --------------------------------------------------------------------------

Checker criterion5() {
    Checker c;
    const auto m = HarvestModel::exponential(1.0);
    const auto sched = bounds::make_schedule(128, 1.0, m);
    c.expect(sched.N_save == 55, "schedule N(128) = 55");

    const double cheb = ehmodel::chebyshev_bound_E0(sched.N_save, sched.E0, m);
    const double kolm = ehmodel::kolmogorov_bound_E1(128, sched.E0, m);
    const double e2b = std::exp2(-128.0 * sched.eta);
    const double u = (std::log2(16.0) + 128.0 * sched.eta - 128.0 * 0.5) /
                     std::sqrt(128.0 * 1.0406844905028039);
    const double e3b =
        numerics::std_normal_cdf(u) + bounds::berry_esseen_constant() / std::sqrt(128.0);
    const double total = cheb + kolm + e2b + e3b;

    c.rel(cheb, 0.072727272727272727, 1e-12, "save shortfall bound");
    c.rel(kolm, 0.50776859504132231, 1e-12, "outage bound");
    c.close(e2b, 0.0078125, 1e-18, "wrong-message bound");
    c.close(e3b, 0.11254173355890935, 1e-12, "miss bound");
    c.close(total, 0.70085010, 1e-7, "total budget");

    // The budget bounds the error rate of the random-codebook ensemble, so
    // the measurement pools many independent codebook draws: one simulation
    // seed per batch, 40 x 250 = 10^4 trials. A single codebook would only
    // measure the conditional error rate, which swings widely with the energy
    // of the row actually sent. Batch means give the standard error under
    // the within-batch correlation that sharing a codebook introduces.
    const auto sim = codec::SimConfig::from_schedule(m, kUnitNoise, 128, 16, sched);
    const int batches = 40;
    const long long per_batch = 250;
    long long err_total = 0;
    std::vector<double> batch_rate;
    for (int k = 0; k < batches; ++k) {
        const auto mc = codec::monte_carlo(sim, per_batch, 5000 + static_cast<std::uint64_t>(k),
                                           harness::resolve_threads());
        err_total += mc.counts.err;
        batch_rate.push_back(mc.err.rate);
    }
    const double rate = static_cast<double>(err_total) / (batches * per_batch);
    double varsum = 0.0;
    for (double r : batch_rate) varsum += (r - rate) * (r - rate);
    const double se_batch = std::sqrt(varsum / (batches - 1) / batches);
    c.le(rate, total + 3.0 * se_batch, "empirical error rate vs total budget");
    c.expect(err_total > 0, "the regime is non-trivial: some trials must fail");
    return c;
}

// --------------------------------------------------------------------------
// 6. closed form below the exact bound at matched blocklengths
// --------------------------------------------------------------------------

long long largest_matched_n(double n_hat, double a, const HarvestModel& m) {
    long long lo = 2, hi = static_cast<long long>(n_hat);
    while (lo < hi) {
        const long long mid = lo + (hi - lo + 1) / 2;
        const auto s = bounds::make_schedule(mid, a, m);
        if (static_cast<double>(mid + s.N_save) <= n_hat) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

Checker criterion6() {
    Checker c;
    const auto m = HarvestModel::constant(1.0);
    const double backoff_pins[] = {0.770623, 0.662106, 0.612120, 0.584959};
    const long long matched_pins[] = {9128, 96436, 986293, 9949175};

    int i = 0;
    for (double n_hat : {1e4, 1e5, 1e6, 1e7}) {
        const std::string tag = " (n_hat=" + fmt(n_hat) + ")";
        const auto thm = bounds::theorem1_closed_form(n_hat, 0.1, 1.0, m, kUnitNoise);
        c.expect(thm.feasible, "closed form feasible" + tag);
        const double backoff = thm.extras.at("backoff_normalized");
        c.close(backoff, backoff_pins[i], 1e-4, "normalized backoff" + tag);
        c.expect(backoff >= 0.25 && backoff <= 1.0,
                 "normalized backoff outside [0.25, 1]" + tag + ": " + fmt(backoff));

        const long long n_star = largest_matched_n(n_hat, 1.0, m);
        c.expect(n_star == matched_pins[i],
                 "matched transmit blocklength" + tag + ": got " + std::to_string(n_star) +
                     ", want " + std::to_string(matched_pins[i]));
        const auto ach = bounds::achievable_log_M(n_star, 0.1, 1.0, m, kUnitNoise);
        if (i == 0) {
            // the smallest decade cannot absorb the budget: the exact bound is
            // infeasible there while the closed form never promises otherwise
            c.expect(!ach.feasible, "exact bound at n*=9128 should be infeasible");
            c.close(ach.epsilon_n, -0.00947193, 1e-6, "residual budget at n*=9128");
        } else {
            c.expect(ach.feasible, "exact bound feasible" + tag);
            c.le(thm.extras.at("log_M_bits_case_correct"), ach.log_M_bits,
                 "closed form vs exact bound at matched blocklength" + tag);
        }
        ++i;
    }
    return c;
}

// --------------------------------------------------------------------------
// 7. byte-identical output across thread counts and repeats
// --------------------------------------------------------------------------

Checker criterion7() {
    Checker c;
    harness::ExperimentConfig cfg;
    cfg.harvest = HarvestModel::exponential(1.0);
    cfg.channel = kUnitNoise;
    cfg.n_grid = {64, 128};
    cfg.eps_grid = {0.3};
    cfg.a_grid = {1.0};
    cfg.trials = 4000;
    cfg.num_messages = 8;
    cfg.seed = 11;

    const auto rows1 = harness::run_sweep(cfg, "sweep", 1);
    const auto rows8 = harness::run_sweep(cfg, "sweep", 8);
    const auto rows1b = harness::run_sweep(cfg, "sweep", 1);
    c.expect(rows1.size() == 4, "sweep should emit 2 bound rows + 2 simulate rows");

    const auto csv1 = harness::emit_csv(rows1);
    const auto csv8 = harness::emit_csv(rows8);
    const auto csv1b = harness::emit_csv(rows1b);
    c.expect(csv1 == csv8, "csv must not depend on the thread count");
    c.expect(csv1 == csv1b, "csv must be identical across repeated runs");
    c.expect(harness::emit_json(rows1) == harness::emit_json(rows8),
             "json must not depend on the thread count");
    c.expect(harness::emit_plot_data(rows1) == harness::emit_plot_data(rows8),
             "plot data must not depend on the thread count");
    return c;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* title;
        Checker (*run)();
    };
    const Entry entries[] = {
        {1, "closed-form pins for capacities, schedules, and budgets", criterion1},
        {2, "density moments agree across closed form, quadrature, and monte carlo",
         criterion2},
        {3, "analytic event bounds dominate simulated rates on a 10-config grid",
         criterion3},
        {4, "standardized density sums meet the distance envelope", criterion4},
        {5, "end-to-end error budget dominates the simulated system at n=128", criterion5},
        {6, "closed form stays below the exact bound at matched blocklengths", criterion6},
        {7, "sweep output is byte-identical across runs and thread counts", criterion7},
    };

    int failed = 0;
    for (const auto& e : entries) {
        Checker c;
        try {
            c = e.run();
        } catch (const std::exception& ex) {
            c.failures.push_back(std::string("unexpected exception: ") + ex.what());
        }
        if (c.failures.empty()) {
            std::printf("[PASS] criterion %d: %s\n", e.id, e.title);
        } else {
            ++failed;
            std::printf("[FAIL] criterion %d: %s\n", e.id, e.title);
            for (const auto& f : c.failures) std::printf("       - %s\n", f.c_str());
        }
        std::fflush(stdout);
    }
    if (failed != 0) std::printf("%d of 7 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
