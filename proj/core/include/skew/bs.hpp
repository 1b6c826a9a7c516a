#pragma once

#include <skew/errors.hpp>

namespace skew {

enum class OptionKind { Call, Put };

/// A plain European quote under zero carry. Prices are in spot units,
/// tau in years, vol annualized.
struct BsQuote {
    double spot;
    double strike;
    double tau;
    double vol;
    OptionKind kind;
};

/// Standard normal CDF. Relative accuracy follows erf/erfc from libm,
/// with the tail branch taken for |x| > 1 so that N(-x) keeps relative
/// accuracy deep in the left tail.
double norm_cdf(double x);

/// Standard normal density.
double norm_pdf(double x);

/// Black-Scholes price with zero interest and dividend rates.
/// vol = 0 is allowed and prices the forward payoff.
double bs_price(const BsQuote& q);
double bs_price(double spot, double strike, double tau, double vol, OptionKind kind);

/// log of the out-of-the-money option price (call if strike >= spot, put
/// otherwise). Stable deep out of the money, where the plain price
/// underflows double precision: the Gaussian tails are expanded around
/// the common factor spot*phi(d1) so no catastrophic cancellation occurs.
/// Returns -inf for vol = 0.
double log_otm_price(double spot, double strike, double tau, double vol);

struct ImpliedVolConfig {
    double vol_lo = 1e-9;
    double vol_hi = 10.0;   // vol_max of the inversion contract
    int max_iter = 200;
    double price_tol_rel = 1e-10; // in units of spot
    double vol_tol = 1e-9;        // bracket resolution before accepting
};

/// Invert bs_price for the volatility. The price must lie strictly inside
/// the static no-arbitrage band for the option kind; otherwise
/// PriceOutOfBand is thrown. NoConvergence signals that the iteration
/// budget was exhausted (pathological input near the band edge) or that
/// no vol in (0, vol_hi] reproduces the price.
double implied_vol(double price, double spot, double strike, double tau, OptionKind kind,
                   const ImpliedVolConfig& cfg = {});

/// Invert the OTM option price given in log space (call if strike >= spot,
/// put otherwise). Used for regimes where the price itself is far below
/// the smallest normal double.
double implied_vol_from_log(double log_price, double spot, double strike, double tau,
                            const ImpliedVolConfig& cfg = {});

} // namespace skew
