#include <skew/pclvg.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace skew {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_strike_tau(double strike, double tau) {
    if (!(strike >= 0.0) || !std::isfinite(strike))
        throw Error("pclvg: strike must be nonnegative");
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw Error("pclvg: tau must be nonnegative");
}

void require_at_barrier(const PclvgParams& p, double spot) {
    if (std::abs(spot - p.barrier) > 1e-12 * p.barrier)
        throw SpotNotAtBarrier("pclvg: closed forms are valid only at spot = barrier");
}

// log of the common denominator 1/s1 + 1/s2 - (1/s2 - 1/s1) exp(-2U/(s1 tau)).
// Always positive: bounded below by 2/max(s1,s2).
double log_denominator(const PclvgParams& p, double tau) {
    const double e = std::exp(-2.0 * p.barrier / (p.sigma1 * tau));
    const double d = 1.0 / p.sigma1 + 1.0 / p.sigma2 - (1.0 / p.sigma2 - 1.0 / p.sigma1) * e;
    return std::log(d);
}

} // namespace

void PclvgParams::validate() const {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0) || !(barrier > 0.0) ||
        !std::isfinite(sigma1) || !std::isfinite(sigma2) || !std::isfinite(barrier))
        throw Error("PclvgParams: sigma1, sigma2, barrier must be positive finite");
}

double pclvg_log_otm_price(const PclvgParams& p, double strike, double tau) {
    p.validate();
    require_strike_tau(strike, tau);
    if (tau == 0.0) return -kInf;
    const double log_den = log_denominator(p, tau);
    if (strike < p.barrier) {
        // extrinsic part of the call = put price
        const double decay = (p.barrier - strike) / (p.sigma1 * tau);
        const double wall = std::log1p(-std::exp(-2.0 * strike / (p.sigma1 * tau)));
        return std::log(tau) - decay + wall - log_den;
    }
    const double decay = (strike - p.barrier) / (p.sigma2 * tau);
    const double wall = std::log1p(-std::exp(-2.0 * p.barrier / (p.sigma1 * tau)));
    return std::log(tau) - decay + wall - log_den;
}

double pclvg_call(const PclvgParams& p, double spot_at_barrier, double strike, double tau) {
    require_at_barrier(p, spot_at_barrier);
    require_strike_tau(strike, tau);
    const double intrinsic = std::max(p.barrier - strike, 0.0);
    if (tau == 0.0) return intrinsic;
    const double extrinsic = std::exp(pclvg_log_otm_price(p, strike, tau));
    return strike < p.barrier ? intrinsic + extrinsic : extrinsic;
}

double pclvg_put(const PclvgParams& p, double spot_at_barrier, double strike, double tau) {
    require_at_barrier(p, spot_at_barrier);
    require_strike_tau(strike, tau);
    if (tau == 0.0) return std::max(strike - p.barrier, 0.0);
    const double otm = std::exp(pclvg_log_otm_price(p, strike, tau));
    // parity against the martingale start E[X] = U: P = C - (U - K)
    return strike < p.barrier ? otm : otm + (strike - p.barrier);
}

double pclvg_iv(const PclvgParams& p, double strike, double tau) {
    if (!(tau > 0.0)) throw Error("pclvg_iv: tau must be positive");
    const double logp = pclvg_log_otm_price(p, strike, tau);
    return implied_vol_from_log(logp, p.barrier, strike, tau);
}

double short_term_iv_limit(const PclvgParams& p, double strike) {
    p.validate();
    if (!(strike > 0.0)) throw Error("short_term_iv_limit: strike must be positive");
    if (strike == p.barrier)
        throw StrikeAtBarrier("short_term_iv_limit: undefined at strike = barrier");
    if (strike > p.barrier)
        return std::sqrt(p.sigma2) * std::log(strike / p.barrier) /
               std::sqrt(2.0 * (strike - p.barrier));
    return std::sqrt(p.sigma1) * std::log(p.barrier / strike) /
           std::sqrt(2.0 * (p.barrier - strike));
}

double reflected_strike(const PclvgParams& p, double strike_below) {
    p.validate();
    if (!(strike_below > 0.0) || strike_below > p.barrier)
        throw StrikeAboveBarrier("reflected_strike: need 0 < strike <= barrier");
    return p.barrier + (p.barrier - strike_below) * p.skew_ratio();
}

double static_hedge_payoff(const PclvgParams& p, double strike, double x, double tol) {
    p.validate();
    if (!(strike > 0.0) || strike > p.barrier)
        throw StrikeAboveBarrier("static_hedge_payoff: need 0 < strike <= barrier");
    if (!(tol > 0.0)) throw Error("static_hedge_payoff: tol must be positive");
    if (!(x >= 0.0)) throw Error("static_hedge_payoff: x must be nonnegative");

    const double U = p.barrier;
    const double rho = p.skew_ratio();
    double g = 0.0;
    for (long n = 0;; ++n) {
        const double up_kink = U + (U * (2.0 * n + 1.0) - strike) * rho;
        if (x <= up_kink) break; // every later term vanishes at this x
        const double down_kink = U + (U * (2.0 * n + 1.0) + strike) * rho;
        g += (x - up_kink) - std::max(x - down_kink, 0.0);
    }
    return g;
}

HedgeEnvelopes hedge_envelopes(const PclvgParams& p, double strike, double x) {
    const double kr = reflected_strike(p, strike);
    const double upper = std::max(x - kr, 0.0);
    return {strike / p.barrier * upper, upper};
}

SeriesResult put_via_calls_series(const PclvgParams& p, double strike, double tau, double tol) {
    p.validate();
    if (!(strike > 0.0) || strike > p.barrier)
        throw StrikeAboveBarrier("put_via_calls_series: need 0 < strike <= barrier");
    if (!(tau > 0.0)) throw Error("put_via_calls_series: tau must be positive");
    if (!(tol > 0.0)) throw Error("put_via_calls_series: tol must be positive");

    const double U = p.barrier;
    const double rho = p.skew_ratio();
    constexpr long kBudget = 1000000;
    double sum = 0.0;
    for (long n = 0; n < kBudget; ++n) {
        const double k_up = U + (U * (2.0 * n + 1.0) - strike) * rho;
        const double k_down = U + (U * (2.0 * n + 1.0) + strike) * rho;
        const double term = pclvg_call(p, U, k_up, tau) - pclvg_call(p, U, k_down, tau);
        sum += term;
        if (std::abs(term) <= tol * std::abs(sum))
            return {sum, static_cast<int>(n + 1)};
    }
    throw SeriesBudgetExceeded("put_via_calls_series: 1e6 terms without convergence");
}

SandwichGaps sandwich_check(const PclvgParams& p, double strike, double tau) {
    if (!(tau > 0.0)) throw Error("sandwich_check: tau must be positive");
    const double kr = reflected_strike(p, strike);
    const double c_refl = pclvg_call(p, p.barrier, kr, tau);
    const double put = pclvg_put(p, p.barrier, strike, tau);

    // The upper gap C(Kr) - P collapses to P * exp(-2K/(sigma1 tau)), far
    // below the rounding floor of the two prices for short maturities.
    // Regroup the hedge series so the gap is a sum of positive call-price
    // differences at well-separated strikes:
    //   C(Kr) - P = sum_n [ C(k_down(n)) - C(k_up(n+1)) ].
    const double U = p.barrier;
    const double rho = p.skew_ratio();
    double upper_gap = 0.0;
    for (long n = 0; n < 1000000; ++n) {
        const double k_down = U + (U * (2.0 * n + 1.0) + strike) * rho;
        const double k_up_next = U + (U * (2.0 * n + 3.0) - strike) * rho;
        const double term =
            pclvg_call(p, U, k_down, tau) - pclvg_call(p, U, k_up_next, tau);
        upper_gap += term;
        if (std::abs(term) <= 1e-14 * std::abs(upper_gap) || term == 0.0) break;
    }
    return {put - strike / p.barrier * c_refl, upper_gap};
}

} // namespace skew
