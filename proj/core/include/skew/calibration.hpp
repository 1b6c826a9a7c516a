#pragma once

#include <skew/pclvg.hpp>
#include <skew/surface.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace skew {

/// One quote of a single-maturity smile in the zero-carry world, spot at
/// the barrier.
struct SmileQuote {
    double strike;
    double mid;
    OptionKind kind;
};

struct SmileFit {
    std::string date;
    double tau = 0.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double rmse = 0.0; // price units
    int n_quotes = 0;

    double ratio() const { return sigma2 / sigma1; }
};

struct FitConfig {
    double sigma_lo = 1e-8;
    double sigma_hi = 1e6;
    int starts_per_axis = 5;   // log-spaced multi-start around the wing seeds
    double start_span = 10.0;  // multiplicative half-width of the start grid
    double rel_obj_tol = 1e-10;
    int max_iter = 500;
};

/// Least-squares fit of the two variance levels to one smile,
/// price-space objective, Nelder-Mead in log parameters over a
/// deterministic multi-start grid seeded by inverting the short-maturity
/// wing limits at the most OTM quotes.
SmileFit fit_smile(std::span<const SmileQuote> slice, double barrier, double tau,
                   const std::string& date = {}, const FitConfig& cfg = {});

struct SkewEntry {
    std::string date;
    double tau;
    double ratio;
};

struct SkewSeries {
    std::vector<SkewEntry> entries;
};

enum class BarrierRule { Spot, Fixed };

struct CalibrationConfig {
    BarrierRule barrier_rule = BarrierRule::Spot;
    double fixed_barrier = 0.0;
    int jobs = 0;
    FitConfig fit;
};

/// Fit every (date, maturity) slice of the dataset; slices that cannot be
/// fitted (too few quotes, one-sided) are skipped with a note on stderr.
std::vector<SmileFit> calibrate_dataset(const std::vector<MarketSurface>& dataset,
                                        const CalibrationConfig& cfg = {});

SkewSeries skew_series_from_fits(const std::vector<SmileFit>& fits);
SkewSeries skew_series(const std::vector<MarketSurface>& dataset,
                       const CalibrationConfig& cfg = {});

struct Kappas {
    double kappa_star;  // alpha-quantile
    double kappa_upper; // (1-alpha)-quantile
    double kappa_mean;  // sample average
    double alpha;
    std::size_t n;
};

/// Empirical quantiles with linear interpolation between order statistics.
Kappas quantile_kappas(const SkewSeries& series, double alpha);

void write_fits_csv(const std::vector<SmileFit>& fits, const std::filesystem::path& path);
void write_fits_json(const std::vector<SmileFit>& fits, const std::filesystem::path& path);
void write_kappas_json(const Kappas& k, const std::filesystem::path& path);
Kappas load_kappas_json(const std::filesystem::path& path);

/// Rebuild the OTM smile quotes of one surface maturity from its vols.
std::vector<SmileQuote> slice_quotes(const MarketSurface& s, std::size_t tau_idx,
                                     double barrier);

} // namespace skew
