#include <skew/bs.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace skew {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_quote(double spot, double strike, double tau, double vol) {
    if (!(spot > 0.0) || !(strike > 0.0) || !(tau > 0.0) || !(vol >= 0.0) ||
        !std::isfinite(spot) || !std::isfinite(strike) || !std::isfinite(tau) ||
        !std::isfinite(vol))
        throw Error("bs: invalid quote (need spot>0, strike>0, tau>0, vol>=0)");
}

// sum_k (-1)^k (2k-1)!! (a^-(2k+1) - b^-(2k+1)) for 0 < a < b = a + s.
// Each difference is formed from b^m - a^m = s * sum a^i b^(m-1-i), so the
// known gap s enters exactly and no leading-order cancellation happens.
double mills_bracket(double a, double b, double s) {
    const double ia = 1.0 / a, ib = 1.0 / b;
    double term_sum = 0.0;
    double double_fact = 1.0; // (2k-1)!!
    double sign = 1.0;
    double pa = ia, pb = ib; // a^-(2k+1), b^-(2k+1)
    double prev_mag = kInf;
    for (int k = 0; k < 8; ++k) {
        // b^(2k+1) - a^(2k+1) via the geometric cofactor sum
        double cof = 0.0;
        double apow = 1.0;
        const int m = 2 * k + 1;
        for (int i = 0; i < m; ++i) {
            double bpow = 1.0;
            for (int jj = 0; jj < m - 1 - i; ++jj) bpow *= b;
            cof += apow * bpow;
            apow *= a;
        }
        const double diff = s * cof * pa * pb; // (b^m - a^m)/(a b)^m
        const double term = sign * double_fact * diff;
        const double mag = std::abs(term);
        if (mag >= prev_mag) break; // asymptotic series started to diverge
        term_sum += term;
        prev_mag = mag;
        sign = -sign;
        double_fact *= static_cast<double>(2 * k + 1);
        pa *= ia * ia;
        pb *= ib * ib;
        if (mag < 1e-17 * std::abs(term_sum)) break;
    }
    return term_sum;
}

} // namespace

double norm_cdf(double x) {
    if (x < -1.0) return 0.5 * std::erfc(-x * kInvSqrt2);
    if (x > 1.0) return 1.0 - 0.5 * std::erfc(x * kInvSqrt2);
    return 0.5 + 0.5 * std::erf(x * kInvSqrt2);
}

double norm_pdf(double x) {
    return std::exp(-0.5 * x * x - kHalfLog2Pi);
}

double bs_price(double spot, double strike, double tau, double vol, OptionKind kind) {
    require_quote(spot, strike, tau, vol);
    const double s = vol * std::sqrt(tau);
    if (s == 0.0) {
        return kind == OptionKind::Call ? std::max(spot - strike, 0.0)
                                        : std::max(strike - spot, 0.0);
    }
    const double d1 = std::log(spot / strike) / s + 0.5 * s;
    const double d2 = d1 - s;
    // floor at intrinsic: the difference of the two terms can round a few
    // ulps under the static bound deep in the money
    if (kind == OptionKind::Call)
        return std::max(spot * norm_cdf(d1) - strike * norm_cdf(d2),
                        std::max(spot - strike, 0.0));
    return std::max(strike * norm_cdf(-d2) - spot * norm_cdf(-d1),
                    std::max(strike - spot, 0.0));
}

double bs_price(const BsQuote& q) {
    return bs_price(q.spot, q.strike, q.tau, q.vol, q.kind);
}

double log_otm_price(double spot, double strike, double tau, double vol) {
    require_quote(spot, strike, tau, vol);
    const double s = vol * std::sqrt(tau);
    if (s == 0.0) return -kInf;
    const double d1 = std::log(spot / strike) / s + 0.5 * s;
    const double d2 = d1 - s;

    const bool call = strike >= spot;
    // a = smaller tail argument, b = a + s
    const double a = call ? -d1 : d2;
    const double b = call ? -d2 : d1;

    constexpr double kAsymptoticSwitch = 15.0;
    if (a > kAsymptoticSwitch) {
        // price = spot * phi(d1) * bracket(a, b); spot*phi(d1) == strike*phi(d2)
        const double bracket = mills_bracket(a, b, s);
        return std::log(spot) - 0.5 * d1 * d1 - kHalfLog2Pi + std::log(bracket);
    }

    const double price = call ? spot * norm_cdf(d1) - strike * norm_cdf(d2)
                              : strike * norm_cdf(-d2) - spot * norm_cdf(-d1);
    if (!(price > 0.0)) return -kInf;
    return std::log(price);
}

namespace {

// Safeguarded secant/bisection on f(vol) = price(vol) - target, which is
// strictly increasing in vol. Stops once the price matches to f_tol AND
// the vol bracket is resolved to x_tol, so flat deep-OTM price profiles
// cannot hand back a sloppy vol.
template <class F>
double invert_increasing(F&& f, double lo, double hi, double f_tol, double x_tol,
                         int max_iter, const char* what) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo > 0.0 || fhi < 0.0)
        throw NoConvergence(std::string(what) + ": no root in the vol bracket");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;

    int last_side = 0; // Illinois anti-stagnation bookkeeping
    double x = 0.5 * (lo + hi), fx = kInf;
    for (int it = 0; it < max_iter; ++it) {
        // secant proposal from the bracket endpoints; every other step
        // bisect outright so the bracket provably collapses
        double cand = lo - flo * (hi - lo) / (fhi - flo);
        if ((it & 1) || !(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
        x = cand;
        fx = f(x);
        if (std::abs(fx) <= f_tol && hi - lo <= x_tol) return x;
        if (fx < 0.0) {
            lo = x;
            flo = fx;
            if (last_side == -1) fhi *= 0.5;
            last_side = -1;
        } else {
            hi = x;
            fhi = fx;
            if (last_side == +1) flo *= 0.5;
            last_side = +1;
        }
        if (hi - lo <= 1e-15 * std::max(1.0, hi)) return 0.5 * (lo + hi);
    }
    if (std::abs(fx) <= f_tol) return x;
    throw NoConvergence(std::string(what) + ": iteration budget exhausted");
}

} // namespace

double implied_vol(double price, double spot, double strike, double tau, OptionKind kind,
                   const ImpliedVolConfig& cfg) {
    if (!(spot > 0.0) || !(strike > 0.0) || !(tau > 0.0))
        throw Error("implied_vol: invalid spot/strike/tau");
    const double lower =
        kind == OptionKind::Call ? std::max(spot - strike, 0.0) : std::max(strike - spot, 0.0);
    const double upper = kind == OptionKind::Call ? spot : strike;
    if (!std::isfinite(price) || price <= lower || price >= upper)
        throw PriceOutOfBand("implied_vol: price outside the static no-arbitrage band");

    // tiny extrinsic values sit on the flat part of the price profile where
    // a price criterion cannot pin the vol: flip to the OTM twin (parity
    // preserves the vol) and invert in log space instead
    const double extrinsic = price - lower;
    if (extrinsic < 1e-6 * spot)
        return implied_vol_from_log(std::log(extrinsic), spot, strike, tau, cfg);

    auto f = [&](double v) { return bs_price(spot, strike, tau, v, kind) - price; };
    return invert_increasing(f, cfg.vol_lo, cfg.vol_hi, cfg.price_tol_rel * spot,
                             cfg.vol_tol, cfg.max_iter, "implied_vol");
}

double implied_vol_from_log(double log_price, double spot, double strike, double tau,
                            const ImpliedVolConfig& cfg) {
    if (!(spot > 0.0) || !(strike > 0.0) || !(tau > 0.0))
        throw Error("implied_vol_from_log: invalid spot/strike/tau");
    const double log_upper = std::log(std::min(spot, strike)); // OTM band is (0, min(S,K))
    if (!(log_price < log_upper))
        throw PriceOutOfBand("implied_vol_from_log: log price outside the OTM band");

    auto f = [&](double v) { return log_otm_price(spot, strike, tau, v) - log_price; };
    // log prices are exact to ~1e-13 absolute; bisection on the bracket
    double lo = cfg.vol_lo, hi = cfg.vol_hi;
    if (f(lo) > 0.0) return lo;
    if (f(hi) < 0.0)
        throw NoConvergence("implied_vol_from_log: price above the vol_max price");
    for (int it = 0; it < cfg.max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) < 1e-13 || hi - lo < 1e-15 * std::max(1.0, hi))
            return mid;
        (fm < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace skew
