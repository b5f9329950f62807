#pragma once

// Scalar numerics shared by every other header: standard-normal CDF/quantile,
// Gauss-Hermite quadrature, and a small counter-keyed RNG whose streams can be
// re-derived from (seed, stream index) so simulations stay reproducible under
// any thread partitioning.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ehfbl/errors.hpp"

namespace ehfbl::numerics {

inline constexpr double kLog2E = 1.4426950408889634074;  // log2(e)
inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Standard normal distribution
// ---------------------------------------------------------------------------

inline double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

// Phi(x) through erfc keeps full relative accuracy deep into the left tail
// (Phi(-10) ~ 7.6e-24 comes out to ~1e-15 relative), where the naive
// 1 - Phi(-x) form would round to 0 long before.
inline double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace detail {

// Rational initial guess for the normal quantile (Acklam's approximation,
// |error| < 1.15e-9 over (0,1)), valid for p in (0, 0.5].
inline double normal_quantile_guess(double p) {
    static constexpr double a[6] = {
        -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
        1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {
        -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
        6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[6] = {
        -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
        -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {
        7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
        3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

// Inverse of std_normal_cdf. Rational seed plus two Halley corrections against
// the erfc-based CDF lands within a few ulp across (0,1); the p >= 1/2 branch
// reduces through 1-p (exact in doubles on [1/2,1]) so
// std_normal_quantile(1-p) == -std_normal_quantile(p) holds identically.
inline double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw ValidationError("std_normal_quantile: p must lie in (0,1), got " +
                              std::to_string(p));
    if (p == 0.5) return 0.0;
    const bool flip = p > 0.5;
    const double pl = flip ? 1.0 - p : p;
    double x = detail::normal_quantile_guess(pl);
    for (int pass = 0; pass < 2; ++pass) {
        const double err = std_normal_cdf(x) - pl;
        const double u = err * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);  // Halley step; denominator ~1 near the root
    }
    return flip ? -x : x;
}

// ---------------------------------------------------------------------------
// Gauss-Hermite quadrature (physicists' convention)
// ---------------------------------------------------------------------------

// Nodes/weights for integral f(x) exp(-x^2) dx ~ sum w_i f(x_i).
// Weights sum to sqrt(pi); nodes are stored in ascending order.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order() const { return static_cast<int>(nodes.size()); }
};

// Newton iteration on the normalized three-term Hermite recurrence
// (h_{j} = z*sqrt(2/j)*h_{j-1} - sqrt((j-1)/j)*h_{j-2}), which keeps values
// O(1) at any order instead of overflowing like the raw polynomials.
inline QuadratureRule make_gauss_hermite(int order) {
    if (order < 1)
        throw ValidationError("make_gauss_hermite: order must be >= 1, got " +
                              std::to_string(order));
    const int n = order;
    const int m = (n + 1) / 2;
    std::vector<double> x(n), w(n);
    const double pim4 = 0.75112554446494248286;  // pi^{-1/4}
    constexpr double eps = 3.0e-14;
    constexpr int max_iter = 64;

    double z = 0.0, pp = 0.0;
    for (int i = 0; i < m; ++i) {
        // Seed each root from the previous ones (largest root first).
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[i - 2];

        bool converged = false;
        for (int it = 0; it < max_iter; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;  // derivative of the normalized polynomial
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= eps) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw NumericError("make_gauss_hermite: Newton iteration stalled at order " +
                               std::to_string(order));
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if (n % 2 == 1) x[m - 1] = 0.0;  // symmetry pins the middle node exactly

    // Roots were produced largest-first; flip to ascending.
    QuadratureRule rule;
    rule.nodes.assign(x.rbegin(), x.rend());
    rule.weights.assign(w.rbegin(), w.rend());
    return rule;
}

// E[f(X)] for X ~ N(mean, sd^2) via the substitution x = mean + sqrt(2)*sd*t.
template <typename F>
double gauss_hermite_expect(const QuadratureRule& rule, F&& f, double mean = 0.0,
                            double sd = 1.0) {
    if (!(sd >= 0.0))
        throw ValidationError("gauss_hermite_expect: sd must be >= 0");
    const double scale = std::sqrt(2.0) * sd;
    double acc = 0.0;
    for (int i = 0; i < rule.order(); ++i)
        acc += rule.weights[i] * f(mean + scale * rule.nodes[i]);
    return acc / std::sqrt(kPi);
}

// ---------------------------------------------------------------------------
// Counter-keyed RNG streams
// ---------------------------------------------------------------------------

// Finalizer from SplitMix64: bijective, avalanching.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// A SplitMix64 generator. One stream per (seed, stream-index) pair; trials own
// disjoint indices, so results cannot depend on how trials are scheduled
// across threads.
class RngStream {
public:
    explicit RngStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0,1): 53 random bits shifted into
    // [0, 1-2^-53], then nudged off 0 so log() is always finite.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    // Box-Muller, cosine branch only. Always consumes exactly two uniforms and
    // caches nothing, so the draw count per trial is a pure function of the
    // trial -- a requirement for bit-reproducible parallel runs.
    double next_normal() {
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    double next_normal(double mean, double sd) { return mean + sd * next_normal(); }

    // Exponential with the given mean (inverse-CDF transform).
    double next_exponential(double mean) { return -mean * std::log(next_uniform()); }

private:
    std::uint64_t state_;
};

// Hash (seed, stream) into a starting state. Streams with distinct indices are
// decorrelated by the double avalanche; the same pair always yields the same
// stream.
inline RngStream derive_stream(std::uint64_t seed, std::uint64_t stream) {
    const std::uint64_t a = mix64(seed + 0x9e3779b97f4a7c15ULL);
    const std::uint64_t b = mix64(stream + 0xbf58476d1ce4e5b9ULL);
    return RngStream(mix64(a ^ (b + 0x94d049bb133111ebULL + (a << 6) + (a >> 2))));
}

}  // namespace ehfbl::numerics
