#include <skew/bs.hpp>

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace skew;

TEST_CASE("norm_cdf: center, symmetry, monotonicity") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    double prev_x = -40.0, prev_v = norm_cdf(prev_x);
    for (int i = 0; i < 2000; ++i) {
        const double x = u(rng);
        CHECK(norm_cdf(x) + norm_cdf(-x) == doctest::Approx(1.0).epsilon(1e-15));
    }
    for (double x = -12.0; x <= 12.0; x += 0.01) {
        const double v = norm_cdf(x);
        CHECK(v >= prev_v);
        prev_x = x;
        prev_v = v;
    }
}

TEST_CASE("norm_cdf: oracle self-consistency in the overlap") {
    // quadrature and continued-fraction references agree to long-double terms
    for (double x = 2.0; x <= 4.0; x += 0.25) {
        const long double a = oracle::norm_cdf_quadrature(-x);
        const long double b = oracle::norm_tail_cf(x);
        CHECK(std::abs((double)((a - b) / b)) < 5e-15);
    }
}

TEST_CASE("norm_cdf: relative accuracy vs quadrature/CF reference") {
    for (double x = -8.0; x <= 8.0 + 1e-12; x += 0.05) {
        const long double ref = oracle::norm_cdf_ref(x);
        const double got = norm_cdf(x);
        CHECK(std::abs((double)((got - ref) / ref)) <= 1e-14);
    }
    // far tails: absolute error
    for (double x = 8.0; x <= 38.0; x += 1.0) {
        const long double ref = oracle::norm_tail_cf(x);
        CHECK(std::abs((double)(norm_cdf(-x) - ref)) <= 1e-16);
    }
}

TEST_CASE("norm_cdf: Mills-ratio tail bound on [3, 8]") {
    const double sqrt_2pi = std::sqrt(2.0 * M_PI);
    for (double x = 3.0; x <= 8.0 + 1e-12; x += 0.1) {
        const double r = norm_cdf(-x) * sqrt_2pi * x * std::exp(0.5 * x * x) - 1.0;
        CHECK(std::abs(r) <= 1.0 / (x * x));
    }
    // the x = 6 spot check against the quadrature/CF oracle
    const long double ref = oracle::norm_tail_cf(6.0L);
    CHECK(norm_cdf(-6.0) == doctest::Approx((double)ref).epsilon(1e-13));
    const double r6 = norm_cdf(-6.0) * sqrt_2pi * 6.0 * std::exp(18.0) - 1.0;
    CHECK(std::abs(r6) <= 1.0 / 36.0);
}

TEST_CASE("bs_price: zero vol prices the forward payoff") {
    CHECK(bs_price({100.0, 90.0, 1.0, 0.0, OptionKind::Call}) == doctest::Approx(10.0));
    CHECK(bs_price({100.0, 90.0, 1.0, 0.0, OptionKind::Put}) == doctest::Approx(0.0));
    CHECK(bs_price({80.0, 90.0, 0.5, 0.0, OptionKind::Put}) == doctest::Approx(10.0));
}

TEST_CASE("bs_price: put-call parity across random quotes") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> us(10.0, 5000.0), uk(0.3, 3.0),
        ut(1e-4, 2.0), uv(0.0, 2.5);
    for (int i = 0; i < 5000; ++i) {
        const double s = us(rng), k = uk(rng) * s, tau = ut(rng), vol = uv(rng);
        const double c = bs_price(s, k, tau, vol, OptionKind::Call);
        const double p = bs_price(s, k, tau, vol, OptionKind::Put);
        CHECK(std::abs(c - p - (s - k)) <= 1e-12 * s);
        CHECK(c >= std::max(s - k, 0.0));
        CHECK(c < s * (1 + 1e-12));
        CHECK(p >= std::max(k - s, 0.0));
        CHECK(p < k * (1 + 1e-12));
    }
}

TEST_CASE("bs_price: barrier reflection identity") {
    // P(U, K1) = (K1/U) C(U, U^2/K1) for any vol, K1 < U
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> uu(50.0, 5000.0), uk(0.35, 0.999),
        ut(1e-3, 2.0), uv(0.05, 1.5);
    for (int i = 0; i < 2000; ++i) {
        const double u = uu(rng), k1 = uk(rng) * u, tau = ut(rng), vol = uv(rng);
        const double put = bs_price(u, k1, tau, vol, OptionKind::Put);
        const double call = bs_price(u, u * u / k1, tau, vol, OptionKind::Call);
        CHECK(std::abs(put - k1 / u * call) <= 1e-12 * u);
    }
    // the spec fixture
    const double put = bs_price(1000.0, 900.0, 0.5, 0.25, OptionKind::Put);
    const double call = bs_price(1000.0, 1000.0 * 1000.0 / 900.0, 0.5, 0.25, OptionKind::Call);
    CHECK(put == doctest::Approx(0.9 * call).epsilon(1e-13));
}

TEST_CASE("bs_price vs long-double reference in the bulk") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uk(0.6, 1.6), ut(0.01, 2.0), uv(0.05, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double k = uk(rng) * 100.0, tau = ut(rng), vol = uv(rng);
        const double got = bs_price(100.0, k, tau, vol, OptionKind::Call);
        const long double ref = oracle::bs_call_ref(100.0L, k, tau, vol);
        CHECK(got == doctest::Approx((double)ref).epsilon(1e-12));
    }
}

TEST_CASE("log_otm_price agrees with the plain price where both work") {
    for (double k : {100.0, 120.0, 160.0, 80.0, 60.0}) {
        for (double vol : {0.1, 0.4, 1.2}) {
            for (double tau : {0.05, 0.5, 1.5}) {
                const OptionKind kind = k >= 100.0 ? OptionKind::Call : OptionKind::Put;
                const double direct = bs_price(100.0, k, tau, vol, kind);
                const double viaLog = std::exp(log_otm_price(100.0, k, tau, vol));
                CHECK(viaLog == doctest::Approx(direct).epsilon(1e-12));
            }
        }
    }
    // continuity across the asymptotic switch: walk tau down so |d1| sweeps
    // through the branch point
    for (double tau = 0.02; tau > 0.0005; tau *= 0.9) {
        const double lp = log_otm_price(100.0, 140.0, tau, 0.2);
        const double lp2 = log_otm_price(100.0, 140.0, tau * 0.999, 0.2);
        CHECK(lp2 < lp); // decreasing in tau, no branch jump
    }
}

TEST_CASE("implied_vol: round trip over the quoted box (OTM instrument)") {
    int checked = 0;
    for (double vol : {0.01, 0.03, 0.1, 0.3, 1.0, 3.0})
        for (double tau : {1e-4, 1e-2, 0.5, 2.0})
            for (double lm : {-1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0}) {
                const double spot = 100.0, strike = spot * std::exp(lm);
                const OptionKind kind =
                    strike >= spot ? OptionKind::Call : OptionKind::Put;
                const double price = bs_price(spot, strike, tau, vol, kind);
                if (!(price > 0.0) || !std::isfinite(price)) continue; // underflowed
                const double iv = implied_vol(price, spot, strike, tau, kind);
                CHECK(std::abs(iv - vol) <= 1e-8);
                ++checked;
            }
    CHECK(checked > 100);
}

TEST_CASE("implied_vol: ITM quotes reproduce the price to contract") {
    // an ITM quote carries the vol only through its extrinsic part, which a
    // double price resolves to ~ulp(price); the price contract still holds
    for (double vol : {0.01, 0.1, 0.5, 2.0})
        for (double tau : {1e-2, 0.5, 2.0})
            for (double lm : {-1.0, -0.3, 0.3, 1.0})
                for (OptionKind kind : {OptionKind::Call, OptionKind::Put}) {
                    const double spot = 100.0, strike = spot * std::exp(lm);
                    const double price = bs_price(spot, strike, tau, vol, kind);
                    const double lower = kind == OptionKind::Call
                                             ? std::max(spot - strike, 0.0)
                                             : std::max(strike - spot, 0.0);
                    if (!(price > lower) || !std::isfinite(price)) continue;
                    const double iv = implied_vol(price, spot, strike, tau, kind);
                    CHECK(std::abs(bs_price(spot, strike, tau, iv, kind) - price) <=
                          1e-10 * spot);
                    CHECK(std::abs(iv - vol) <= 1e-4);
                }
}

TEST_CASE("implied_vol: band edges throw PriceOutOfBand") {
    CHECK_THROWS_AS((void)implied_vol(100.0, 100.0, 90.0, 1.0, OptionKind::Call),
                    PriceOutOfBand);
    CHECK_THROWS_AS((void)implied_vol(10.0, 100.0, 90.0, 1.0, OptionKind::Call),
                    PriceOutOfBand); // exactly intrinsic
    CHECK_THROWS_AS((void)implied_vol(-1.0, 100.0, 90.0, 1.0, OptionKind::Put),
                    PriceOutOfBand);
    CHECK_THROWS_AS((void)implied_vol(90.0, 100.0, 90.0, 1.0, OptionKind::Put),
                    PriceOutOfBand);
}

TEST_CASE("implied_vol: price above the vol_max price cannot converge") {
    const double almost_spot = 100.0 * (1.0 - 1e-13);
    CHECK_THROWS_AS((void)implied_vol(almost_spot, 100.0, 100.0, 1e-4, OptionKind::Call),
                    NoConvergence);
}
