#pragma once

#include <skew/surface.hpp>

#include <span>
#include <string>
#include <vector>

namespace skew {

enum class LegKind { Call, Put, Forward };

struct Leg {
    LegKind kind;
    double strike;
    double tau;
    double weight;
};

enum class Normalization { Raw, PutDollarOne };

struct Portfolio {
    std::vector<Leg> legs;
    Normalization normalization = Normalization::Raw;
};

/// Index of the largest strike in (U, U + (U - K_i)*kappa]. Throws
/// NoEligibleStrike when the set is empty.
std::size_t underline_j(std::size_t i, double kappa, double barrier,
                        std::span<const double> strikes);

/// Index of the smallest strike >= U + (U - K_i)*kappa.
std::size_t overline_j(std::size_t i, double kappa, double barrier,
                       std::span<const double> strikes);

/// Long one call at K_{underline_j}, short one co-maturing put at K_i.
Portfolio build_rtis_low(std::size_t i, double kappa_star, double barrier,
                         std::span<const double> strikes, double tau);

/// Long one put at K_i, short K_i/U calls at K_{overline_j}.
Portfolio build_rtis_high(std::size_t i, double kappa_upper, double barrier,
                          std::span<const double> strikes, double tau);

/// Rescale so one unit of money sits in the (first) put leg at current
/// surface prices.
Portfolio with_put_dollar_normalization(Portfolio port, const MarketSurface& surf);

/// Linear pricing: options marked off the surface vols, forwards at
/// spot - strike regardless of the vols.
double price_portfolio(const Portfolio& port, const MarketSurface& surf);

/// Nearest grid strike to moneyness * spot, ties broken toward the lower
/// strike.
std::size_t nearest_strike_index(double target, std::span<const double> strikes);

struct AuditVerdict {
    bool accepted;
    std::string reason; // counterexample family when rejected
};

/// Checks whether weights (alpha on the call at K_j, beta on the put at
/// K_i) and the call index can satisfy both sign properties. Requires the
/// reflected strike of K_i under kappa_star to sit on the grid.
AuditVerdict minimality_audit(double alpha, double beta, std::size_t i, std::size_t j,
                              double kappa_star, double kappa_upper, double barrier,
                              std::span<const double> strikes);

void save_portfolio_json(const Portfolio& port, const std::filesystem::path& path);
Portfolio load_portfolio_json(const std::filesystem::path& path);

} // namespace skew
