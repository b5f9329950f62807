// Prints the achievable rate ladder for an exponential harvester next to the
// closed-form bound and the EH capacity it climbs toward.

#include <cstdio>

#include "ehfbl/ehfbl.hpp"

int main() {
    using namespace ehfbl;
    const auto model = ehmodel::HarvestModel::exponential(1.0);
    const bounds::ChannelParams ch{1.0};
    const double eps = 0.5;
    const double a = 1.0;

    std::printf("EH capacity: %.6f bits/use, dispersion %.6f bits^2\n",
                bounds::eh_capacity(model, ch), bounds::eh_dispersion(model, ch));
    std::printf("%12s %10s %14s %12s %12s\n", "n", "eps_n", "log M (bits)", "rate", "closed");
    for (long long n : {1024LL, 4096LL, 16384LL, 65536LL, 262144LL, 1048576LL}) {
        const auto rep = bounds::achievable_log_M(n, eps, a, model, ch);
        const double n_total = rep.extras.at("n_total");
        const auto closed = bounds::theorem1_closed_form(n_total, eps, a, model, ch);
        if (!rep.feasible) {
            std::printf("%12lld %10.4f %14s %12s %12.4f\n", n, rep.epsilon_n, "infeasible",
                        "-", closed.log_M_bits / n_total);
            continue;
        }
        std::printf("%12lld %10.4f %14.1f %12.6f %12.6f\n", n, rep.epsilon_n, rep.log_M_bits,
                    rep.log_M_bits / n_total, closed.log_M_bits / n_total);
    }
    return 0;
}
