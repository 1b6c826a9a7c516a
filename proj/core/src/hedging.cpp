#include <skew/hedging.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace skew {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_hedge_inputs(double strike, double barrier, double maturity,
                          const MarketSurface& surf) {
    if (!(strike > 0.0) || !(strike <= barrier))
        throw Error("hedging: need 0 < K <= U");
    if (!(maturity > 0.0)) throw Error("hedging: maturity must be positive");
    if (surf.spot > barrier * (1 + 1e-12))
        throw Error("hedging: spot must not exceed the barrier");
}

HedgeStrategy cheapest(std::vector<Portfolio> candidates, double strike, double barrier,
                       double maturity, const MarketSurface& surf) {
    HedgeStrategy best;
    best.barrier = barrier;
    best.maturity = maturity;
    best.uop_strike = strike;
    double best_cost = kInf;
    for (auto& cand : candidates) {
        const double cost = price_portfolio(cand, surf);
        if (cost <= best_cost) { // ties go to the later (larger put strike) candidate
            best_cost = cost;
            best.portfolio = std::move(cand);
        }
    }
    best.initial_cost = best_cost;
    return best;
}

} // namespace

HedgeStrategy bhr_strategy(double strike, double barrier, double maturity,
                           std::span<const double> strikes, const MarketSurface& surf) {
    require_hedge_inputs(strike, barrier, maturity, surf);
    if (strikes.empty()) throw Error("bhr_strategy: empty strike grid");
    std::vector<Portfolio> candidates;
    for (double k_i : strikes) {
        if (!(k_i <= strike) || !(k_i < barrier)) continue;
        const double put_w = (barrier - strike) / (barrier - k_i);
        const double fwd_w = (k_i - strike) / (barrier - k_i);
        Portfolio port;
        port.legs = {{LegKind::Put, k_i, maturity, put_w},
                     {LegKind::Forward, barrier, maturity, fwd_w}};
        candidates.push_back(std::move(port));
    }
    if (candidates.empty()) {
        // no strike at or below K: one put at the smallest available strike
        Portfolio port;
        port.legs = {{LegKind::Put, strikes.front(), maturity, 1.0}};
        candidates.push_back(std::move(port));
    }
    return cheapest(std::move(candidates), strike, barrier, maturity, surf);
}

HedgeStrategy improved_superhedge(double strike, double barrier, double maturity,
                                  double kappa_upper, std::span<const double> strikes,
                                  const MarketSurface& surf) {
    require_hedge_inputs(strike, barrier, maturity, surf);
    if (!(kappa_upper > 0.0)) throw Error("improved_superhedge: kappa must be positive");

    std::vector<Portfolio> candidates;
    bool have_low = false;
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        const double k_i = strikes[i];
        if (!(k_i <= strike) || !(k_i < barrier)) continue;
        have_low = true;
        const double put_w = (barrier - strike) / (barrier - k_i);
        const double fwd_w = (k_i - strike) / (barrier - k_i);
        Portfolio port;
        port.legs = {{LegKind::Put, k_i, maturity, put_w},
                     {LegKind::Forward, barrier, maturity, fwd_w}};
        try {
            const std::size_t j = overline_j(i, kappa_upper, barrier, strikes);
            port.legs.push_back(
                {LegKind::Call, strikes[j], maturity, -put_w * k_i / barrier});
        } catch (const NoEligibleStrike&) {
            // no reflected strike on the grid: the call part is skipped
        }
        candidates.push_back(std::move(port));
    }
    if (!have_low) {
        for (std::size_t i = 0; i < strikes.size(); ++i) {
            if (!(strikes[i] < barrier)) continue;
            Portfolio port;
            port.legs = {{LegKind::Put, strikes[i], maturity, 1.0}};
            try {
                const std::size_t j = overline_j(i, kappa_upper, barrier, strikes);
                port.legs.push_back(
                    {LegKind::Call, strikes[j], maturity, -strikes[i] / barrier});
            } catch (const NoEligibleStrike&) {
            }
            candidates.push_back(std::move(port));
        }
    }
    if (candidates.empty()) throw Error("improved_superhedge: no strike below the barrier");
    return cheapest(std::move(candidates), strike, barrier, maturity, surf);
}

HedgeStrategy improved_subhedge(double strike, double barrier, double maturity,
                                double kappa_star, std::span<const double> strikes,
                                const MarketSurface& surf) {
    require_hedge_inputs(strike, barrier, maturity, surf);
    // largest grid strike at or below K
    std::size_t i = strikes.size();
    for (std::size_t k = 0; k < strikes.size(); ++k)
        if (strikes[k] <= strike && strikes[k] < barrier) i = k;
    if (i == strikes.size())
        throw NoEligibleStrike("improved_subhedge: no strike at or below K");

    Portfolio rtis = build_rtis_low(i, kappa_star, barrier, strikes, maturity);
    HedgeStrategy strat;
    strat.barrier = barrier;
    strat.maturity = maturity;
    strat.uop_strike = strike;
    for (auto leg : rtis.legs) {
        leg.weight = -leg.weight;
        strat.portfolio.legs.push_back(leg);
    }
    strat.initial_cost = -price_portfolio(rtis, surf);
    return strat;
}

PathEvaluation evaluate_on_path(const HedgeStrategy& strat, const MarketPath& path) {
    const double T = strat.maturity;
    const double U = strat.barrier;
    if (path.times.size() < 2 || path.times.size() != path.spots.size())
        throw Error("evaluate_on_path: malformed path");
    if (!path.surfaces.empty() && path.surfaces.size() != path.times.size())
        throw Error("evaluate_on_path: surfaces misaligned with times");
    if (path.times.front() > 1e-12 || path.times.back() < T * (1 - 1e-9))
        throw PathGap("evaluate_on_path: samples do not cover [0, T]");
    for (std::size_t i = 1; i < path.times.size(); ++i)
        if (!(path.times[i] > path.times[i - 1]))
            throw Error("evaluate_on_path: times must be increasing");

    // first sample at or above the barrier within [0, T]
    std::size_t hit = path.times.size();
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        if (path.times[i] > T * (1 + 1e-12)) break;
        if (path.spots[i] >= U) {
            hit = i;
            break;
        }
    }
    const bool barrier_hit = hit < path.times.size();

    // terminal spot: the last sample at or before T
    std::size_t t_idx = 0;
    for (std::size_t i = 0; i < path.times.size(); ++i)
        if (path.times[i] <= T * (1 + 1e-12)) t_idx = i;
    const double s_terminal = path.spots[t_idx];

    PathEvaluation ev{};
    ev.uop_payoff = barrier_hit ? 0.0 : std::max(strat.uop_strike - s_terminal, 0.0);

    auto intrinsic_value = [&](double s) {
        double v = 0.0;
        for (const auto& l : strat.portfolio.legs) {
            switch (l.kind) {
            case LegKind::Call: v += l.weight * std::max(s - l.strike, 0.0); break;
            case LegKind::Put: v += l.weight * std::max(l.strike - s, 0.0); break;
            case LegKind::Forward: v += l.weight * (s - l.strike); break;
            }
        }
        return v;
    };

    if (!barrier_hit || path.times[hit] >= T * (1 - 1e-12)) {
        ev.liquidation_time = T;
        ev.liquidation_value = intrinsic_value(s_terminal);
    } else {
        const double t_star = path.times[hit];
        const double remaining = T - t_star;
        if (path.surfaces.empty() || !path.surfaces[hit].has_value())
            throw PathGap("evaluate_on_path: no surface at the barrier hit");
        const MarketSurface& surf = *path.surfaces[hit];

        // continuity proxy: the crossing must be resolved to about one
        // strike-grid step around the barrier, else the sampled path
        // cannot stand in for S(H_U) = U
        double grid_step = kInf;
        for (std::size_t k = 1; k < surf.strikes.size(); ++k)
            if (surf.strikes[k - 1] <= U && U <= surf.strikes[k])
                grid_step = surf.strikes[k] - surf.strikes[k - 1];
        if (!std::isfinite(grid_step) && surf.strikes.size() >= 2)
            grid_step = surf.strikes[1] - surf.strikes[0];
        const double overshoot = path.spots[hit] - U;
        const double undershoot = hit > 0 ? U - path.spots[hit - 1] : 0.0;
        if (overshoot > grid_step || undershoot > grid_step)
            throw PathGap("evaluate_on_path: sampling too coarse at the barrier crossing");

        ev.liquidation_time = t_star;
        double v = 0.0;
        for (const auto& l : strat.portfolio.legs) {
            if (l.kind == LegKind::Forward) {
                v += l.weight * (path.spots[hit] - l.strike);
                continue;
            }
            const double vol = iv_at(surf, l.strike, remaining);
            v += l.weight * bs_price(surf.spot, l.strike, remaining, vol,
                                     l.kind == LegKind::Call ? OptionKind::Call
                                                             : OptionKind::Put);
        }
        ev.liquidation_value = v;
    }

    ev.inequality_ok = ev.liquidation_value >= ev.uop_payoff - 1e-9 * U;
    return ev;
}

} // namespace skew
