// Runs the full save-and-transmit codec on one small configuration and prints
// each empirical error-event rate against its analytic bound.

#include <cstdio>

#include "ehfbl/ehfbl.hpp"

int main() {
    using namespace ehfbl;
    codec::SimConfig cfg;
    cfg.harvest = ehmodel::HarvestModel::exponential(1.0);
    cfg.channel = bounds::ChannelParams{1.0};
    cfg.n = 128;
    cfg.num_messages = 16;
    const auto sched = bounds::make_schedule(cfg.n, 1.0, cfg.harvest);
    cfg.N_save = sched.N_save;
    cfg.E0 = sched.E0;
    cfg.eta = sched.eta;

    const long long trials = 20000;
    const auto mc = codec::monte_carlo(cfg, trials, /*seed=*/1, /*threads=*/2);

    const double cheb = ehmodel::chebyshev_bound_E0(cfg.N_save, cfg.E0, cfg.harvest);
    const double kolm = ehmodel::kolmogorov_bound_E1(cfg.n, cfg.E0, cfg.harvest);
    const double e2b = std::exp2(-static_cast<double>(cfg.n) * cfg.eta);
    const double C = bounds::eh_capacity(cfg.harvest, cfg.channel);
    const double V = bounds::eh_dispersion(cfg.harvest, cfg.channel);
    const double u = (std::log2(16.0) + cfg.n * cfg.eta - cfg.n * C) / std::sqrt(cfg.n * V);
    const double e3b = numerics::std_normal_cdf(u) +
                       bounds::berry_esseen_constant() / std::sqrt(1.0 * cfg.n);

    std::printf("n=%lld N_save=%lld E0=%.2f eta=%.5f M=%lld trials=%lld\n", cfg.n,
                cfg.N_save, cfg.E0, cfg.eta, cfg.num_messages, trials);
    std::printf("%8s %12s %22s %12s\n", "event", "empirical", "95% interval", "bound");
    const auto line = [](const char* name, const ehmodel::RateEstimate& est, double bound) {
        std::printf("%8s %12.5f [%9.5f, %9.5f] %12.5f\n", name, est.rate, est.lo, est.hi,
                    bound);
    };
    line("e0", mc.e0, cheb);
    line("e1", mc.e1, kolm);
    line("e2", mc.e2, e2b);
    line("e3", mc.e3, e3b);
    line("error", mc.err, cheb + kolm + e2b + e3b);
    return 0;
}
