#pragma once

// Energy arrival models and the per-event probability bounds for the
// save-and-transmit scheme: the Chebyshev bound on a failed save phase, the
// Kolmogorov maximal-inequality bound on battery outage during transmission,
// and Monte Carlo estimators (with exact binomial intervals) to check both.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/beta.hpp>

#include "ehfbl/errors.hpp"
#include "ehfbl/numerics.hpp"

namespace ehfbl::ehmodel {

// ---------------------------------------------------------------------------
// Harvest processes
// ---------------------------------------------------------------------------

enum class HarvestKind { constant, exponential, uniform, bernoulli_scaled };

inline const char* to_string(HarvestKind k) {
    switch (k) {
        case HarvestKind::constant: return "constant";
        case HarvestKind::exponential: return "exponential";
        case HarvestKind::uniform: return "uniform";
        case HarvestKind::bernoulli_scaled: return "bernoulli_scaled";
    }
    return "?";
}

// I.i.d. nonnegative energy arrivals Y_i with E[Y] = mean. `extra` is the
// success probability p for bernoulli_scaled (arrival mean/p with prob. p,
// else 0) and is ignored by the other kinds.
struct HarvestModel {
    HarvestKind kind = HarvestKind::exponential;
    double mean = 1.0;
    double extra = 0.0;

    static HarvestModel constant(double mean) { return make(HarvestKind::constant, mean); }
    static HarvestModel exponential(double mean) {
        return make(HarvestKind::exponential, mean);
    }
    // Uniform on [0, 2*mean].
    static HarvestModel uniform(double mean) { return make(HarvestKind::uniform, mean); }
    static HarvestModel bernoulli_scaled(double mean, double p) {
        return make(HarvestKind::bernoulli_scaled, mean, p);
    }

    static HarvestModel make(HarvestKind kind, double mean, double extra = 0.0) {
        if (!(mean > 0.0) || !std::isfinite(mean))
            throw ValidationError("HarvestModel: mean must be finite and > 0, got " +
                                  std::to_string(mean));
        if (kind == HarvestKind::bernoulli_scaled && !(extra > 0.0 && extra <= 1.0))
            throw ValidationError(
                "HarvestModel: bernoulli_scaled needs arrival probability in (0,1], got " +
                std::to_string(extra));
        return HarvestModel{kind, mean, extra};
    }

    double variance() const {
        switch (kind) {
            case HarvestKind::constant: return 0.0;
            case HarvestKind::exponential: return mean * mean;
            case HarvestKind::uniform: return mean * mean / 3.0;  // (2*mean)^2 / 12
            case HarvestKind::bernoulli_scaled:
                // value mean/p w.p. p: E[Y^2] = mean^2/p, Var = mean^2 (1-p)/p
                return mean * mean * (1.0 - extra) / extra;
        }
        return 0.0;
    }
};

inline double sample_harvest(const HarvestModel& m, numerics::RngStream& rng) {
    switch (m.kind) {
        case HarvestKind::constant: return m.mean;
        case HarvestKind::exponential: return rng.next_exponential(m.mean);
        case HarvestKind::uniform: return 2.0 * m.mean * rng.next_uniform();
        case HarvestKind::bernoulli_scaled:
            return rng.next_uniform() < m.extra ? m.mean / m.extra : 0.0;
    }
    return 0.0;
}

// Gaussian codebook entries decay the battery by X^2 with X ~ N(0, E[Y]), so
// the per-slot battery increment Z = Y - X^2 has mean 0 and
// Var(Z) = Var(Y) + Var(X^2) = Var(Y) + 2 E[Y]^2.
inline double increment_variance(const HarvestModel& m) {
    return m.variance() + 2.0 * m.mean * m.mean;
}

// ---------------------------------------------------------------------------
// Analytic per-event bounds
// ---------------------------------------------------------------------------

// P( sum of N arrivals < E0 ) <= N Var(Y) / (N E[Y] - E0)^2, valid whenever
// the save phase collects more than the target on average.
inline double chebyshev_bound_E0(long long N, double E0, double mean, double var_Y) {
    if (N < 1) throw ValidationError("chebyshev_bound_E0: N must be >= 1");
    if (!(mean > 0.0)) throw ValidationError("chebyshev_bound_E0: mean must be > 0");
    if (!(var_Y >= 0.0)) throw ValidationError("chebyshev_bound_E0: var_Y must be >= 0");
    if (!(E0 > 0.0)) throw ValidationError("chebyshev_bound_E0: E0 must be > 0");
    const double excess = static_cast<double>(N) * mean - E0;
    if (!(excess > 0.0))
        throw ValidationError("chebyshev_bound_E0: requires N*mean > E0 (got slack " +
                              std::to_string(excess) + ")");
    return static_cast<double>(N) * var_Y / (excess * excess);
}

inline double chebyshev_bound_E0(long long N, double E0, const HarvestModel& m) {
    return chebyshev_bound_E0(N, E0, m.mean, m.variance());
}

// P( min over k<=n of S_k < -E0 ) <= n Var(Z) / E0^2 for the zero-mean walk
// S_k = sum_{i<=k} Z_i (Kolmogorov's maximal inequality).
inline double kolmogorov_bound_E1(long long n, double E0, double var_Z) {
    if (n < 1) throw ValidationError("kolmogorov_bound_E1: n must be >= 1");
    if (!(E0 > 0.0)) throw ValidationError("kolmogorov_bound_E1: E0 must be > 0");
    if (!(var_Z >= 0.0)) throw ValidationError("kolmogorov_bound_E1: var_Z must be >= 0");
    return static_cast<double>(n) * var_Z / (E0 * E0);
}

inline double kolmogorov_bound_E1(long long n, double E0, const HarvestModel& m) {
    return kolmogorov_bound_E1(n, E0, increment_variance(m));
}

// ---------------------------------------------------------------------------
// Monte Carlo estimators
// ---------------------------------------------------------------------------

// Total energy collected over N save slots.
inline double simulate_save_phase(const HarvestModel& m, long long N,
                                  numerics::RngStream& rng) {
    double total = 0.0;
    for (long long i = 0; i < N; ++i) total += sample_harvest(m, rng);
    return total;
}

// Minimum prefix sum of a walk, with the empty prefix counting as 0.
inline double min_prefix_sum(const std::vector<double>& steps) {
    double s = 0.0, lo = 0.0;
    for (double z : steps) {
        s += z;
        lo = std::min(lo, s);
    }
    return lo;
}

// Exact (Clopper-Pearson) two-sided confidence interval for a binomial
// proportion with k successes in n trials.
inline std::pair<double, double> clopper_pearson(long long k, long long n,
                                                 double confidence = 0.95) {
    if (n < 1) throw ValidationError("clopper_pearson: n must be >= 1");
    if (k < 0 || k > n) throw ValidationError("clopper_pearson: need 0 <= k <= n");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ValidationError("clopper_pearson: confidence must lie in (0,1)");
    const double alpha = 1.0 - confidence;
    const double kk = static_cast<double>(k), nn = static_cast<double>(n);
    double lo = 0.0, hi = 1.0;
    if (k > 0)
        lo = boost::math::quantile(boost::math::beta_distribution<double>(kk, nn - kk + 1.0),
                                   alpha / 2.0);
    if (k < n)
        hi = boost::math::quantile(boost::math::beta_distribution<double>(kk + 1.0, nn - kk),
                                   1.0 - alpha / 2.0);
    return {lo, hi};
}

struct RateEstimate {
    long long failures = 0;
    long long trials = 0;
    double rate = 0.0;
    double lo = 0.0;  // Clopper-Pearson 95% interval
    double hi = 1.0;
};

inline RateEstimate make_rate_estimate(long long failures, long long trials) {
    RateEstimate est;
    est.failures = failures;
    est.trials = trials;
    est.rate = static_cast<double>(failures) / static_cast<double>(trials);
    std::tie(est.lo, est.hi) = clopper_pearson(failures, trials);
    return est;
}

// Empirical P( save phase collects < E0 ). One derived stream per trial.
inline RateEstimate estimate_save_failure(const HarvestModel& m, long long N, double E0,
                                          long long trials, std::uint64_t seed) {
    if (trials < 1) throw ValidationError("estimate_save_failure: trials must be >= 1");
    long long failures = 0;
    for (long long t = 0; t < trials; ++t) {
        auto rng = numerics::derive_stream(seed, static_cast<std::uint64_t>(t));
        if (simulate_save_phase(m, N, rng) < E0) ++failures;
    }
    return make_rate_estimate(failures, trials);
}

// Empirical P( min prefix of the transmit-phase walk drops below -E0 within n
// slots ). Harvest and codebook consumption use separate derived streams per
// trial, mirroring the stream layout of the full codec simulation.
inline RateEstimate estimate_outage(const HarvestModel& m, long long n, double E0,
                                    long long trials, std::uint64_t seed) {
    if (trials < 1) throw ValidationError("estimate_outage: trials must be >= 1");
    if (n < 1) throw ValidationError("estimate_outage: n must be >= 1");
    const double sd = std::sqrt(m.mean);
    long long failures = 0;
    for (long long t = 0; t < trials; ++t) {
        auto harvest = numerics::derive_stream(seed, 2 * static_cast<std::uint64_t>(t));
        auto code = numerics::derive_stream(seed, 2 * static_cast<std::uint64_t>(t) + 1);
        double s = 0.0;
        bool out = false;
        for (long long i = 0; i < n; ++i) {
            const double x = code.next_normal(0.0, sd);
            s += sample_harvest(m, harvest) - x * x;
            if (s < -E0) {
                out = true;
                break;
            }
        }
        if (out) ++failures;
    }
    return make_rate_estimate(failures, trials);
}

}  // namespace ehfbl::ehmodel
