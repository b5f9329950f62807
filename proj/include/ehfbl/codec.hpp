#pragma once

// Executable save-and-transmit codec: a Gaussian random codebook, the
// energy-gated encoder, the threshold decoder, and a deterministic
// multi-threaded Monte Carlo driver that tallies the four error events the
// analytic bounds charge for:
//
//   e0  save phase collects less than E0,
//   e1  the transmit-phase battery walk dips below -E0 (gate closes),
//   e2  some wrong message's information density clears the threshold,
//   e3  the true message's information density fails the threshold.
//
// A trial errs iff e0 or the decoder does not output exactly the true
// message, i.e. error = e0 | e2 | e3.

#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "ehfbl/bounds.hpp"
#include "ehfbl/ehmodel.hpp"
#include "ehfbl/errors.hpp"
#include "ehfbl/numerics.hpp"

namespace ehfbl::codec {

// ---------------------------------------------------------------------------
// Simulation configuration
// ---------------------------------------------------------------------------

struct SimConfig {
    ehmodel::HarvestModel harvest;
    bounds::ChannelParams channel;
    long long n = 0;             // transmit-phase blocklength
    long long num_messages = 2;  // M
    long long N_save = 0;        // save-phase slots
    double E0 = 0.0;             // save-phase energy target / gate budget
    double eta = 0.0;            // threshold slack (bits per channel use)

    void validate() const {
        channel.validate();
        if (n < 1) throw ValidationError("SimConfig: n must be >= 1");
        if (num_messages < 2) throw ValidationError("SimConfig: num_messages must be >= 2");
        if (N_save < 1) throw ValidationError("SimConfig: N_save must be >= 1");
        if (!(E0 > 0.0)) throw ValidationError("SimConfig: E0 must be > 0");
        if (!(eta >= 0.0)) throw ValidationError("SimConfig: eta must be >= 0");
    }

    static SimConfig from_schedule(const ehmodel::HarvestModel& m,
                                   const bounds::ChannelParams& ch, long long n,
                                   long long num_messages, const bounds::Schedule& s) {
        SimConfig cfg;
        cfg.harvest = m;
        cfg.channel = ch;
        cfg.n = n;
        cfg.num_messages = num_messages;
        cfg.N_save = s.N_save;
        cfg.E0 = s.E0;
        cfg.eta = s.eta;
        return cfg;
    }

    double threshold_bits() const {
        return std::log2(static_cast<double>(num_messages)) +
               static_cast<double>(n) * eta;
    }
};

// ---------------------------------------------------------------------------
// Codebook
// ---------------------------------------------------------------------------

// M x n i.i.d. N(0, power) entries, reconstructible from the seed alone (one
// reserved stream, disjoint from any trial stream).
struct Codebook {
    long long num_messages = 0;
    long long n = 0;
    double power = 0.0;
    std::vector<double> symbols;  // row-major, message-major

    const double* row(long long msg) const {
        return symbols.data() + static_cast<std::size_t>(msg) * n;
    }
};

inline Codebook generate_codebook(long long num_messages, long long n, double power,
                                  std::uint64_t seed) {
    if (num_messages < 2) throw ValidationError("generate_codebook: need num_messages >= 2");
    if (n < 1) throw ValidationError("generate_codebook: need n >= 1");
    if (!(power > 0.0)) throw ValidationError("generate_codebook: power must be > 0");
    if (num_messages > 100000000LL / n)
        throw ValidationError("generate_codebook: M*n exceeds the 1e8 entry budget (M=" +
                              std::to_string(num_messages) + ", n=" + std::to_string(n) + ")");
    Codebook cb;
    cb.num_messages = num_messages;
    cb.n = n;
    cb.power = power;
    cb.symbols.resize(static_cast<std::size_t>(num_messages) * n);
    auto rng = numerics::derive_stream(seed, bounds::kCodebookStream);
    const double sd = std::sqrt(power);
    for (auto& s : cb.symbols) s = rng.next_normal(0.0, sd);
    return cb;
}

// ---------------------------------------------------------------------------
// Gated encoder
// ---------------------------------------------------------------------------

struct GateResult {
    std::vector<double> transmitted;  // X with zeros from the first violation on
    bool violated = false;
    long long first_violation = -1;   // index of the first failing prefix
};

// The transmitter may emit symbol k only while every prefix of the *intended*
// consumption stays within budget: with S_l = sum_{i<=l} (Y_i - X_i^2), the
// gate condition is min_{l<=k+1} S_l >= -E0. The walk deliberately keeps
// charging the original X_i^2 after a violation (the gate event is defined on
// the ungated walk, which is what the maximal inequality bounds); since the
// conditions are nested, the first failing prefix silences every later symbol.
inline GateResult encode_gated(const double* x, const std::vector<double>& harvests,
                               double E0) {
    GateResult g;
    const std::size_t n = harvests.size();
    g.transmitted.assign(n, 0.0);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        s += harvests[k] - x[k] * x[k];
        if (s < -E0) {
            g.violated = true;
            g.first_violation = static_cast<long long>(k);
            break;
        }
        g.transmitted[k] = x[k];
    }
    return g;
}

// ---------------------------------------------------------------------------
// Information density and threshold decoding
// ---------------------------------------------------------------------------

// i(x; w) in bits against the N(0, power + sigma^2) reference output law:
//   n/2 log2((P+s2)/s2) + log2(e) sum_k [ w_k^2/(2(P+s2)) - (w_k-x_k)^2/(2 s2) ].
inline double info_density(const double* x, const std::vector<double>& w, double power,
                           const bounds::ChannelParams& ch) {
    const double s2 = ch.noise_var;
    const double denom_w = 2.0 * (power + s2);
    const double denom_z = 2.0 * s2;
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double d = w[k] - x[k];
        acc += w[k] * w[k] / denom_w - d * d / denom_z;
    }
    return 0.5 * static_cast<double>(w.size()) * std::log2(1.0 + power / s2) +
           numerics::kLog2E * acc;
}

struct DecodeResult {
    long long message = -1;   // decoder output, -1 when it declares failure
    long long num_above = 0;  // messages whose density cleared the threshold
};

// Output the unique message whose information density clears the threshold;
// none or more than one is a declared failure.
inline DecodeResult threshold_decode(const Codebook& cb, const std::vector<double>& w,
                                     double threshold_bits,
                                     const bounds::ChannelParams& ch) {
    DecodeResult res;
    for (long long msg = 0; msg < cb.num_messages; ++msg) {
        if (info_density(cb.row(msg), w, cb.power, ch) > threshold_bits) {
            ++res.num_above;
            res.message = res.num_above == 1 ? msg : -1;
        }
    }
    if (res.num_above != 1) res.message = -1;
    return res;
}

// ---------------------------------------------------------------------------
// Monte Carlo trials
// ---------------------------------------------------------------------------

struct TrialOutcome {
    bool e0 = false;     // save-phase shortfall
    bool e1 = false;     // gate violation during transmission
    bool e2 = false;     // some wrong message above threshold
    bool e3 = false;     // true message at or below threshold
    bool error = false;  // e0 or decoder output != true message
};

// Message 0 is transmitted. Trial t owns streams (seed, 2t) for energy
// arrivals and (seed, 2t+1) for channel noise; no other draw in the process
// touches them, so any partition of trials over threads replays identically.
inline TrialOutcome run_trial(const SimConfig& cfg, const Codebook& cb, long long trial,
                              std::uint64_t seed) {
    auto harvest_rng =
        numerics::derive_stream(seed, 2 * static_cast<std::uint64_t>(trial));
    auto noise_rng =
        numerics::derive_stream(seed, 2 * static_cast<std::uint64_t>(trial) + 1);

    TrialOutcome out;
    out.e0 = ehmodel::simulate_save_phase(cfg.harvest, cfg.N_save, harvest_rng) < cfg.E0;

    std::vector<double> harvests(static_cast<std::size_t>(cfg.n));
    for (auto& y : harvests) y = ehmodel::sample_harvest(cfg.harvest, harvest_rng);
    const GateResult gate = encode_gated(cb.row(0), harvests, cfg.E0);
    out.e1 = gate.violated;

    const double sd = std::sqrt(cfg.channel.noise_var);
    std::vector<double> w(static_cast<std::size_t>(cfg.n));
    for (std::size_t k = 0; k < w.size(); ++k)
        w[k] = gate.transmitted[k] + noise_rng.next_normal(0.0, sd);

    const double thr = cfg.threshold_bits();
    out.e3 = !(info_density(cb.row(0), w, cb.power, cfg.channel) > thr);
    for (long long msg = 1; msg < cb.num_messages && !out.e2; ++msg)
        out.e2 = info_density(cb.row(msg), w, cb.power, cfg.channel) > thr;

    out.error = out.e0 || out.e2 || out.e3;
    return out;
}

struct EventCounts {
    long long err = 0, e0 = 0, e1 = 0, e2 = 0, e3 = 0;

    EventCounts& operator+=(const EventCounts& o) {
        err += o.err;
        e0 += o.e0;
        e1 += o.e1;
        e2 += o.e2;
        e3 += o.e3;
        return *this;
    }
};

struct McResult {
    long long trials = 0;
    EventCounts counts;
    ehmodel::RateEstimate err, e0, e1, e2, e3;  // rates with exact 95% intervals
};

// Runs `trials` independent trials split over `threads` contiguous chunks.
// Per-trial streams plus commutative integer tallies make the result a pure
// function of (cfg, trials, seed) -- the thread count can never leak in.
inline McResult monte_carlo(const SimConfig& cfg, long long trials, std::uint64_t seed,
                            int threads = 1) {
    cfg.validate();
    if (trials < 1) throw ValidationError("monte_carlo: trials must be >= 1");
    if (threads < 1) throw ValidationError("monte_carlo: threads must be >= 1");
    const Codebook cb =
        generate_codebook(cfg.num_messages, cfg.n, cfg.harvest.mean, seed);

    const int nthreads = static_cast<int>(std::min<long long>(threads, trials));
    std::vector<EventCounts> partial(static_cast<std::size_t>(nthreads));
    auto worker = [&](int tid, long long lo, long long hi) {
        EventCounts local;
        for (long long t = lo; t < hi; ++t) {
            const TrialOutcome o = run_trial(cfg, cb, t, seed);
            local.err += o.error;
            local.e0 += o.e0;
            local.e1 += o.e1;
            local.e2 += o.e2;
            local.e3 += o.e3;
        }
        partial[static_cast<std::size_t>(tid)] = local;
    };

    if (nthreads == 1) {
        worker(0, 0, trials);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        const long long chunk = (trials + nthreads - 1) / nthreads;
        for (int tid = 0; tid < nthreads; ++tid) {
            const long long lo = tid * chunk;
            const long long hi = std::min<long long>(trials, lo + chunk);
            pool.emplace_back(worker, tid, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    McResult res;
    res.trials = trials;
    for (const auto& p : partial) res.counts += p;
    res.err = ehmodel::make_rate_estimate(res.counts.err, trials);
    res.e0 = ehmodel::make_rate_estimate(res.counts.e0, trials);
    res.e1 = ehmodel::make_rate_estimate(res.counts.e1, trials);
    res.e2 = ehmodel::make_rate_estimate(res.counts.e2, trials);
    res.e3 = ehmodel::make_rate_estimate(res.counts.e3, trials);
    return res;
}

}  // namespace ehfbl::codec
