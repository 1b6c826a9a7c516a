#pragma once

#include <skew/rtis.hpp>
#include <skew/surface.hpp>

#include <optional>
#include <span>
#include <vector>

namespace skew {

/// A semi-static position: the portfolio is held until the barrier is
/// first touched or the options mature, whichever comes first, and
/// liquidated there.
struct HedgeStrategy {
    Portfolio portfolio;
    double barrier = 0.0;    // U
    double maturity = 0.0;   // T; every option leg matures here
    double uop_strike = 0.0; // K of the barrier option being hedged
    double initial_cost = 0.0;
};

/// A sampled admissible path: spots on a time grid covering [0, T] with
/// a surface wherever the portfolio may need marking to market.
struct MarketPath {
    std::vector<double> times;
    std::vector<double> spots;
    std::vector<std::optional<MarketSurface>> surfaces; // may be sparse
};

/// Put-plus-forward super-replication of the up-and-out put, cheapest
/// over the eligible put strikes; falls back to one put at the smallest
/// strike when no strike sits at or below K.
HedgeStrategy bhr_strategy(double strike, double barrier, double maturity,
                           std::span<const double> strikes, const MarketSurface& surf);

/// The same portfolio with an additional short call at the strike picked
/// by overline_j under the upper skewness ratio; never costs more than
/// the plain strategy, and strictly less when the call has value.
HedgeStrategy improved_superhedge(double strike, double barrier, double maturity,
                                  double kappa_upper, std::span<const double> strikes,
                                  const MarketSurface& surf);

/// Sub-replication: short one low-side skew portfolio with the put strike
/// at the largest grid strike <= K, closed at the barrier hit.
HedgeStrategy improved_subhedge(double strike, double barrier, double maturity,
                                double kappa_star, std::span<const double> strikes,
                                const MarketSurface& surf);

struct PathEvaluation {
    double liquidation_time;
    double liquidation_value;
    double uop_payoff;
    bool inequality_ok; // liquidation value dominates the barrier-option payoff
};

/// Mark the strategy on a sampled path: barrier hit at the first sample
/// with spot >= U, options valued on that sample's surface with the
/// remaining maturity, or at intrinsic when held to maturity. Throws
/// PathGap when the sampling is too coarse to stand in for a continuous
/// barrier touch.
PathEvaluation evaluate_on_path(const HedgeStrategy& strat, const MarketPath& path);

} // namespace skew
