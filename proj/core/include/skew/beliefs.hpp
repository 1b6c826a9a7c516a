#pragma once

#include <skew/pclvg.hpp>
#include <skew/surface.hpp>

#include <filesystem>
#include <optional>
#include <vector>

namespace skew {

enum class BeliefSide { Lower, Upper };

/// Skewness beliefs: per-strike bound functions a, b sampled on a tau
/// grid, relative to a barrier. A surface belongs to the lower beliefs
/// when some c > 0 scales it under b below the barrier and over a above
/// it (and the mirror for the upper beliefs), uniformly in tau up to the
/// horizon.
struct Beliefs {
    double barrier = 0.0;
    std::vector<double> strikes;
    std::vector<double> tau_grid;
    std::vector<std::vector<double>> a; // [strike][tau]
    std::vector<std::vector<double>> b;
    BeliefSide side = BeliefSide::Lower;
    double horizon = 0.0;

    /// bound value with linear interpolation in tau, clamped at the grid ends
    double bound(const std::vector<std::vector<double>>& f, std::size_t strike_idx,
                 double tau, bool* clamped = nullptr) const;
};

/// Beliefs generated by the model surface: every bound function equals the
/// model vol, so the generator itself is a member with c = 1 for any T.
Beliefs generated_beliefs(const PclvgParams& p, const std::vector<double>& strikes,
                          const std::vector<double>& tau_grid, BeliefSide side);

struct MembershipDiag {
    bool clamped = false;  // some c^2 tau fell outside the bound grid
    double margin = 0.0;   // worst constraint slack at the returned c
};

/// Search for a witness scale c on a log grid in [1e-3, 1e3], refined
/// around the best margin. Returns the max-margin c when feasible.
std::optional<double> check_membership(const MarketSurface& sigma_surface,
                                       const Beliefs& bel,
                                       MembershipDiag* diag = nullptr);

struct DominatingSurface {
    PclvgParams params;
    double horizon; // maximal verified validity
};

/// Construct a model surface dominating the bound functions in the given
/// direction, seeded from the short-maturity wing limits and verified on
/// the tau grid; the horizon is the largest verified grid prefix.
/// Throws NotFound when no parameters work even at the first grid point.
DominatingSurface find_dominating(const Beliefs& bel, BeliefSide direction);

/// Scale the ratio-constrained model until it dominates the market
/// surface (model vol above the market at the put strike, below it on the
/// call wing) for grid maturities up to T. Returns the smallest feasible
/// scale; throws Infeasible naming the binding call strike.
PclvgParams fit_scale(double ratio, const MarketSurface& market, double barrier,
                      std::size_t put_strike_idx, double horizon);

void save_beliefs_json(const Beliefs& bel, const std::filesystem::path& path);
Beliefs load_beliefs_json(const std::filesystem::path& path);

} // namespace skew
