#include <skew/hedging.hpp>

#include <skew/synthetic.hpp>

#include <doctest.h>

#include <cmath>

using namespace skew;

namespace {

constexpr double kBarrier = 1000.0;

MarketSurface flat_surface(double vol, double spot,
                           std::vector<double> strikes = {600.0, 675.0, 800.0, 900.0,
                                                          1050.0, 1111.111111111111,
                                                          1200.0, 1400.0}) {
    MarketSurface s;
    s.observation_date = Date{2026, 1, 5};
    s.spot = spot;
    s.strikes = std::move(strikes);
    s.taus = {0.02, 0.1, 0.25, 0.5, 1.0};
    s.iv.assign(s.strikes.size(), std::vector<double>(s.taus.size(), vol));
    s.quality.assign(s.strikes.size(),
                     std::vector<CellQuality>(s.taus.size(), CellQuality::Observed));
    return s;
}

MarketPath no_hit_path(double s0, double s_T, double T) {
    MarketPath p;
    p.times = {0.0, T / 3, 2 * T / 3, T};
    p.spots = {s0, 0.5 * (s0 + s_T), 0.9 * s_T + 0.1 * s0, s_T};
    return p;
}

} // namespace

TEST_CASE("bhr_strategy: the worked weights") {
    const auto surf = flat_surface(0.25, 950.0, {675.0, 1050.0, 1200.0});
    const auto strat = bhr_strategy(750.0, kBarrier, 0.5, surf.strikes, surf);
    REQUIRE(strat.portfolio.legs.size() == 2);
    CHECK(strat.portfolio.legs[0].kind == LegKind::Put);
    CHECK(strat.portfolio.legs[0].strike == 675.0);
    CHECK(strat.portfolio.legs[0].weight == doctest::Approx(250.0 / 325.0));
    CHECK(strat.portfolio.legs[1].kind == LegKind::Forward);
    CHECK(strat.portfolio.legs[1].strike == kBarrier);
    CHECK(strat.portfolio.legs[1].weight == doctest::Approx(-75.0 / 325.0));
    // cost = put_w * P + fwd_w * (S0 - U)
    const double put_px =
        bs_price(950.0, 675.0, 0.5, iv_at(surf, 675.0, 0.5), OptionKind::Put);
    CHECK(strat.initial_cost ==
          doctest::Approx(250.0 / 325.0 * put_px - 75.0 / 325.0 * (950.0 - 1000.0)));
}

TEST_CASE("bhr_strategy: strike at K collapses to a pure put") {
    const auto surf = flat_surface(0.25, 950.0, {500.0, 750.0, 1050.0});
    const auto strat = bhr_strategy(750.0, kBarrier, 0.5, surf.strikes, surf);
    bool has_pure_put = false;
    for (const auto& l : strat.portfolio.legs)
        if (l.kind == LegKind::Put && l.strike == 750.0 && l.weight == 1.0)
            has_pure_put = true;
    // the K_i = K candidate has zero forward weight; whether it is chosen
    // depends on prices, but it must exist among candidates when cheapest
    if (has_pure_put)
        for (const auto& l : strat.portfolio.legs)
            if (l.kind == LegKind::Forward) CHECK(l.weight == doctest::Approx(0.0));
    // fallback: no strike at or below K -> one put at the smallest strike
    const auto surf2 = flat_surface(0.25, 950.0, {800.0, 900.0, 1050.0});
    const auto fb = bhr_strategy(750.0, kBarrier, 0.5, surf2.strikes, surf2);
    REQUIRE(fb.portfolio.legs.size() == 1);
    CHECK(fb.portfolio.legs[0].kind == LegKind::Put);
    CHECK(fb.portfolio.legs[0].strike == 800.0);
    CHECK(fb.portfolio.legs[0].weight == 1.0);
}

TEST_CASE("bhr payoff geometry: touches the barrier-option payoff below K_i") {
    const auto surf = flat_surface(0.25, 950.0, {675.0, 1050.0, 1200.0});
    const auto strat = bhr_strategy(750.0, kBarrier, 1.0, surf.strikes, surf);
    for (double s_T = 0.0; s_T <= 999.0; s_T += 13.7) {
        MarketPath path = no_hit_path(950.0, s_T, 1.0);
        // keep interim samples below the barrier
        for (auto& s : path.spots) s = std::min(s, 990.0);
        path.spots.back() = s_T;
        const auto ev = evaluate_on_path(strat, path);
        const double uop = std::max(750.0 - s_T, 0.0);
        CHECK(ev.uop_payoff == doctest::Approx(uop));
        CHECK(ev.inequality_ok);
        const double expected =
            250.0 / 325.0 * std::max(675.0 - s_T, 0.0) - 75.0 / 325.0 * (s_T - 1000.0);
        CHECK(ev.liquidation_value == doctest::Approx(expected).epsilon(1e-12));
        if (s_T <= 675.0) // the hedge is exactly tight below the put strike
            CHECK(ev.liquidation_value == doctest::Approx(uop).epsilon(1e-12));
    }
}

TEST_CASE("improved_superhedge: the worked call leg") {
    const std::vector<double> strikes{675.0, 900.0, 1050.0, 1100.0, 1150.0, 1200.0};
    const auto surf = flat_surface(0.25, 950.0, strikes);
    const auto strat = improved_superhedge(750.0, kBarrier, 0.5, 0.6, strikes, surf);
    REQUIRE(strat.portfolio.legs.size() == 3);
    CHECK(strat.portfolio.legs[0].strike == 675.0);
    CHECK(strat.portfolio.legs[2].kind == LegKind::Call);
    CHECK(strat.portfolio.legs[2].strike == 1200.0); // min grid strike >= 1195
    CHECK(strat.portfolio.legs[2].weight ==
          doctest::Approx(-(250.0 / 325.0) * (675.0 / 1000.0)));
}

TEST_CASE("improved_superhedge: no eligible call strike reduces to plain BHR") {
    const std::vector<double> strikes{675.0, 900.0, 1100.0};
    const auto surf = flat_surface(0.25, 950.0, strikes);
    const auto plain = bhr_strategy(750.0, kBarrier, 0.5, strikes, surf);
    const auto improved = improved_superhedge(750.0, kBarrier, 0.5, 0.6, strikes, surf);
    REQUIRE(improved.portfolio.legs.size() == plain.portfolio.legs.size());
    CHECK(improved.initial_cost == doctest::Approx(plain.initial_cost));
}

TEST_CASE("improved_superhedge: never costs more than BHR") {
    for (double ratio : {0.4, 0.8, 1.2})
        for (double level : {60.0, 150.0, 300.0}) {
            const PclvgParams p{level, ratio * level, kBarrier};
            const std::vector<double> strikes{600.0, 675.0, 800.0, 900.0,
                                              1050.0, 1150.0, 1250.0, 1400.0};
            auto surf = pclvg_surface(p, strikes, {0.05, 0.15, 0.3, 0.6});
            surf.spot = 980.0; // spot below the barrier; vols stay the model's
            for (double kappa : {0.4, 0.7, 1.1}) {
                const auto plain = bhr_strategy(750.0, kBarrier, 0.3, strikes, surf);
                const auto better =
                    improved_superhedge(750.0, kBarrier, 0.3, kappa, strikes, surf);
                CHECK(better.initial_cost <= plain.initial_cost + 1e-12);
            }
        }
}

TEST_CASE("improved_subhedge: short rtis-low legs, liquidation credit") {
    const std::vector<double> strikes{675.0, 740.0, 900.0, 1100.0, 1200.0};
    const auto surf = flat_surface(0.25, 950.0, strikes);
    const auto strat = improved_subhedge(750.0, kBarrier, 0.5, 0.6, strikes, surf);
    // put strike: largest grid strike <= K is 740; reflected = 1156 -> 1100
    REQUIRE(strat.portfolio.legs.size() == 2);
    CHECK(strat.portfolio.legs[0].kind == LegKind::Call);
    CHECK(strat.portfolio.legs[0].strike == 1100.0);
    CHECK(strat.portfolio.legs[0].weight == -1.0);
    CHECK(strat.portfolio.legs[1].kind == LegKind::Put);
    CHECK(strat.portfolio.legs[1].strike == 740.0);
    CHECK(strat.portfolio.legs[1].weight == +1.0);

    CHECK_THROWS_AS(
        (void)improved_subhedge(650.0, kBarrier, 0.5, 0.6, strikes, surf),
        NoEligibleStrike);
}

TEST_CASE("evaluate_on_path: barrier hit marks the book on the hit surface") {
    const std::vector<double> strikes{675.0, 900.0, 1050.0, 1100.0, 1150.0, 1200.0};
    const auto surf0 = flat_surface(0.25, 950.0, strikes);
    const auto strat = improved_superhedge(750.0, kBarrier, 0.5, 0.6, strikes, surf0);

    MarketPath path;
    path.times = {0.0, 0.1, 0.2, 0.3, 0.5};
    path.spots = {950.0, 980.0, 1000.0, 940.0, 930.0};
    path.surfaces.resize(5);
    // the surface at the touch must satisfy the upper beliefs: a model
    // smile with skew ratio below kappa_upper = 0.6
    path.surfaces[2] =
        pclvg_surface(PclvgParams{150.0, 0.5 * 150.0, kBarrier}, strikes,
                      {0.02, 0.1, 0.3, 0.5});
    const auto ev = evaluate_on_path(strat, path);
    CHECK(ev.liquidation_time == doctest::Approx(0.2));
    CHECK(ev.uop_payoff == 0.0);
    CHECK(ev.liquidation_value >= -1e-9 * kBarrier);
    CHECK(ev.inequality_ok);

    // a flat (symmetric-skew) surface violates those beliefs, and the
    // liquidation value may then go negative
    path.surfaces[2] = flat_surface(0.25, 1000.0, strikes);
    const auto ev_flat = evaluate_on_path(strat, path);
    CHECK(ev_flat.liquidation_value < ev.liquidation_value);
}

TEST_CASE("evaluate_on_path: the flat-vol reflection pair closes at a profit") {
    // strikes K1 and U^2/K1 with a flat smile: the put and the discounted
    // call cancel exactly; any positive put skew closes strictly positive
    const std::vector<double> strikes{900.0, 1111.111111111111, 1300.0};
    const auto surf0 = flat_surface(0.2, 950.0, strikes);
    // kappa placing the reflected strike at U^2/K1 = 1111.11 on the grid:
    // U + (U - 900) kappa = 1111.11 -> kappa = 1.1111
    const double kappa = (1000.0 * 1000.0 / 900.0 - 1000.0) / 100.0;
    const auto strat = improved_superhedge(950.0, kBarrier, 0.5, kappa, strikes, surf0);

    MarketPath path;
    path.times = {0.0, 0.1, 0.5};
    path.spots = {950.0, 1000.0, 900.0};
    path.surfaces.resize(3);
    path.surfaces[1] = flat_surface(0.2, 1000.0, strikes);
    const auto flat_ev = evaluate_on_path(strat, path);
    CHECK(flat_ev.uop_payoff == 0.0);
    CHECK(flat_ev.liquidation_value == doctest::Approx(0.0).epsilon(1e-10));

    auto skewed = flat_surface(0.2, 1000.0, strikes);
    for (std::size_t t = 0; t < skewed.taus.size(); ++t) {
        skewed.iv[0][t] = 0.25; // puts rich, calls cheap: nonnegative skew
        skewed.iv[1][t] = 0.18;
        skewed.iv[2][t] = 0.18;
    }
    path.surfaces[1] = skewed;
    const auto skew_ev = evaluate_on_path(strat, path);
    CHECK(skew_ev.liquidation_value > 0.0);
    CHECK(skew_ev.inequality_ok);
}

TEST_CASE("evaluate_on_path: coarse sampling at the crossing is refused") {
    const std::vector<double> strikes{675.0, 900.0, 1050.0, 1100.0};
    const auto surf0 = flat_surface(0.25, 950.0, strikes);
    const auto strat = bhr_strategy(750.0, kBarrier, 0.5, strikes, surf0);

    MarketPath path;
    path.times = {0.0, 0.2, 0.5};
    path.spots = {950.0, 1300.0, 900.0}; // jumps far past the barrier
    path.surfaces.resize(3);
    path.surfaces[1] = flat_surface(0.25, 1300.0, strikes);
    CHECK_THROWS_AS((void)evaluate_on_path(strat, path), PathGap);

    // and a path that does not cover [0, T]
    MarketPath shortpath;
    shortpath.times = {0.0, 0.2};
    shortpath.spots = {950.0, 940.0};
    CHECK_THROWS_AS((void)evaluate_on_path(strat, shortpath), PathGap);
}

TEST_CASE("synth_path: covers the horizon and marks the touch") {
    const PclvgParams dyn{200.0, 120.0, kBarrier};
    PathConfig cfg;
    cfg.mark_strikes = {675.0, 900.0, 1050.0, 1150.0};
    int touched = 0, marked = 0;
    for (int seed = 0; seed < 40; ++seed) {
        const auto path = synth_path(dyn, 980.0, 0.5, cfg, seed);
        REQUIRE(path.times.front() == 0.0);
        REQUIRE(path.times.back() == doctest::Approx(0.5));
        for (std::size_t i = 0; i < path.spots.size(); ++i) {
            CHECK(path.spots[i] >= 0.0);
            if (path.spots[i] >= kBarrier && path.times[i] < 0.5) {
                ++touched;
                if (path.surfaces[i].has_value()) {
                    ++marked;
                    CHECK(path.surfaces[i]->spot == kBarrier);
                }
                break;
            }
        }
    }
    CHECK(touched > 0);
    CHECK(marked == touched);
}
