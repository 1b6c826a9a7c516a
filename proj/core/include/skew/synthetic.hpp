#pragma once

#include <skew/hedging.hpp>
#include <skew/pclvg.hpp>
#include <skew/surface.hpp>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace skew {

/// Synthetic option-chain generator. Emits the same CSV schema the loader
/// consumes, so every pipeline is testable without licensed market data.
struct SynthConfig {
    Date start_date{2026, 1, 5};
    int n_days = 1;
    double spot0 = 1000.0;
    std::vector<double> moneyness = {0.80, 0.85, 0.90, 0.95, 0.975,
                                     1.0,  1.025, 1.05, 1.10, 1.15, 1.20};
    std::vector<int> expiry_days = {7, 21, 42, 63};

    enum class Model { Pclvg, FlatBs } model = Model::Pclvg;
    double sigma1 = 80.0;  // price/year at spot0 = 1000 (short-term ATM vol ~ 0.2)
    double ratio = 0.6;    // sigma2/sigma1
    double flat_vol = 0.2; // FlatBs only

    double rate = 0.0;
    double div_yield = 0.0;

    double half_spread_rel = 0.005; // half bid/ask width relative to mid
    double noise_rel = 0.0;         // multiplicative mid noise stdev
    double zero_oi_fraction = 0.0;  // fraction of rows emitted with open_interest 0
    double missing_bid_fraction = 0.0;
    double spot_vol_daily = 0.0;   // lognormal daily spot wiggle
    double ratio_jitter = 0.0;     // lognormal jitter of ratio per (day, expiry)
    double strike_step = 5.0;      // strikes snapped to this grid (0 = raw)
    std::uint64_t seed = 1;
};

std::vector<RawQuote> synth_chain(const SynthConfig& cfg);

void write_chain_csv(const std::filesystem::path& path, const std::vector<RawQuote>& rows);

/// The model-generated surface at spot = barrier (all cells Observed).
MarketSurface pclvg_surface(const PclvgParams& p, const std::vector<double>& strikes,
                            const std::vector<double>& taus);

struct PathConfig {
    int n_times = 128;  // samples of [0, T]
    int substeps = 16;  // Euler refinement between samples
    /// marking surface attached at the first barrier touch
    double mark_sigma1 = 0.0; // 0: reuse the dynamics sigma1
    double mark_ratio = 0.0;  // 0: reuse the dynamics ratio
    std::vector<double> mark_strikes; // strike grid of the marking surface
};

/// Sample one path of the model underlying on a uniform time grid of
/// [0, T], with a single-maturity marking surface attached at the first
/// sample at or above the barrier.
MarketPath synth_path(const PclvgParams& dynamics, double x0, double maturity,
                      const PathConfig& cfg, std::uint64_t seed);

} // namespace skew
