#pragma once

#include <skew/bs.hpp>
#include <skew/errors.hpp>

#include <cstdint>
#include <vector>

namespace skew {

/// Two-level local variance model: level sigma1 below the barrier,
/// sigma2 at and above it. Units are price/year, barrier in price units.
struct PclvgParams {
    double sigma1;
    double sigma2;
    double barrier;

    double skew_ratio() const { return sigma2 / sigma1; }
    void validate() const;
};

/// Closed-form call price with the spot pinned at the barrier.
/// tau = 0 returns intrinsic. Throws SpotNotAtBarrier when
/// spot_at_barrier != barrier (the closed form only exists there).
double pclvg_call(const PclvgParams& p, double spot_at_barrier, double strike, double tau);

/// Put via parity P = C - (U - K); exact by construction.
double pclvg_put(const PclvgParams& p, double spot_at_barrier, double strike, double tau);

/// log of the OTM option price at the barrier (put below, call above).
/// Stable for tau down to 1e-5 and beyond, where plain prices underflow.
double pclvg_log_otm_price(const PclvgParams& p, double strike, double tau);

/// Black-Scholes implied volatility of the model call price at spot = barrier.
double pclvg_iv(const PclvgParams& p, double strike, double tau);

/// Short-maturity implied-vol limit: sqrt(sigma2)*log(K/U)/sqrt(2(K-U)) above
/// the barrier and the sigma1 mirror below. Throws StrikeAtBarrier at K = U.
double short_term_iv_limit(const PclvgParams& p, double strike);

/// Call strike symmetric to a put strike across the barrier:
/// U + (U - K)*sigma2/sigma1. Requires 0 < K <= U.
double reflected_strike(const PclvgParams& p, double strike_below);

/// The European payoff replicating an up-and-out put after the barrier is
/// hit: an alternating series of call payoffs with kinks marching up from
/// the reflected strike. The series is truncated exactly at the first kink
/// beyond x. tol > 0 is accepted for signature uniformity; truncation is
/// exact so it is not consumed.
double static_hedge_payoff(const PclvgParams& p, double strike, double x, double tol = 1e-12);

struct HedgeEnvelopes {
    double lower;
    double upper;
};

/// Single-kink bounds (K/U)*(x - Kr)^+ <= g(x) <= (x - Kr)^+ around the
/// reflected strike Kr.
HedgeEnvelopes hedge_envelopes(const PclvgParams& p, double strike, double x);

struct SeriesResult {
    double value;
    int terms_used;
};

/// Put price rebuilt as the alternating series of reflected call prices.
/// Terms decay geometrically; stops when the last term is below
/// tol * |partial sum|. Throws SeriesBudgetExceeded after 1e6 terms.
SeriesResult put_via_calls_series(const PclvgParams& p, double strike, double tau, double tol);

struct SandwichGaps {
    double lower_gap; // P - (K/U) * C(reflected)
    double upper_gap; // C(reflected) - P
};

/// Distances of the put price from its one-call bounds; both are strictly
/// positive for tau > 0 and 0 < K < U.
SandwichGaps sandwich_check(const PclvgParams& p, double strike, double tau);

struct McSample {
    std::vector<double> terminal;    // X_tau per path
    std::vector<double> running_max; // sup of X over [0, tau] per path
};

struct McConfig {
    int n_steps = 2000;
    bool bridge_crossing = true; // Brownian-bridge barrier test between grid points
};

/// Euler simulation of the underlying: diffusion D with the two-level
/// coefficient, absorbed at zero, run to the exponentially distributed
/// total clock tau^2 * xi. Deterministic per (seed, path index) and run in
/// parallel across paths.
McSample simulate_pclvg(const PclvgParams& p, double x0, double tau, int n_paths,
                        std::uint64_t seed, const McConfig& cfg = {});

} // namespace skew
