#pragma once

#include <skew/bs.hpp>
#include <skew/errors.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace skew {

/// Calendar date; year fractions are ACT/365.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    static Date parse(const std::string& iso); // "YYYY-MM-DD"
    std::string str() const;
    long serial() const; // days since epoch

    friend bool operator==(const Date&, const Date&) = default;
    friend auto operator<=>(const Date&, const Date&) = default;
};

double year_frac_act365(const Date& from, const Date& to);

/// One row of the chain CSV. bid/ask are empty when the quote side is
/// not available (such rows are excluded, not rejected).
struct RawQuote {
    Date date;
    Date expiry;
    double strike = 0.0;
    OptionKind kind = OptionKind::Call;
    std::optional<double> bid;
    std::optional<double> ask;
    long open_interest = 0;
    double underlying = 0.0;
    double rate = 0.0;
    double div_yield = 0.0;
};

/// A quote mapped to the zero-carry world: strike and spot discounted,
/// the option price left unchanged.
struct ZeroCarryQuote {
    double raw_strike;
    double strike; // K * exp(-r tau)
    double spot;   // S * exp(-q tau)
    double tau;
    double mid;
    OptionKind kind;
};

/// Piecewise-linear curve of annualized rates over tau. Queries outside
/// the knot range throw CurveDomainError (a flat curve has no such range).
class Curve {
public:
    Curve() : flat_(0.0) {}
    explicit Curve(double flat) : flat_(flat) {}
    Curve(std::vector<double> taus, std::vector<double> values);

    double operator()(double tau) const;

private:
    std::optional<double> flat_;
    std::vector<double> taus_;
    std::vector<double> values_;
};

std::vector<RawQuote> read_chain_csv(const std::filesystem::path& path);

std::vector<ZeroCarryQuote> normalize_carry(const std::vector<RawQuote>& quotes,
                                            const Curve& rates, const Curve& dividends);

enum class CellQuality { Observed, Interpolated, Missing };

/// Market implied-vol surface at one observation time. iv is indexed
/// [strike][tau] and holds NaN on Missing cells. Strikes are quoted raw;
/// the vols were derived from carry-adjusted quotes.
struct MarketSurface {
    Date observation_date;
    double spot = 0.0;
    std::vector<double> strikes;
    std::vector<double> taus;
    std::vector<std::vector<double>> iv;
    std::vector<std::vector<CellQuality>> quality;

    bool observed(std::size_t k, std::size_t t) const {
        return quality[k][t] != CellQuality::Missing;
    }
};

struct ChainConfig {
    int keep_front_maturities = 3;
};

/// Build the surface of one observation date from a chain CSV:
/// mid = (bid+ask)/2, zero-open-interest rows dropped, carry normalized,
/// only the front maturities kept, implied vols from OTM quotes only.
MarketSurface load_chain(const std::filesystem::path& path, const ChainConfig& cfg = {});

/// Same pipeline for a CSV holding several observation dates; dates with
/// no usable quotes are skipped.
std::vector<MarketSurface> load_chain_dataset(const std::filesystem::path& path,
                                              const ChainConfig& cfg = {});

/// Build one surface from an in-memory set of rows (single date).
MarketSurface build_surface(const std::vector<RawQuote>& rows, const ChainConfig& cfg = {});

struct Violation {
    int condition; // 1: short-term limit proxy, 2: strike monotonicity,
                   // 3: calendar monotonicity, 4: strike convexity
    int strike_idx;
    int tau_idx;
    double magnitude;
};

struct AdmissibilityReport {
    bool passed = true;
    std::vector<Violation> violations;
};

struct AdmissibilityConfig {
    /// Condition 1 proxy: the two shortest maturities' vols must agree to
    /// this relative band (a finite grid cannot certify a limit).
    double short_term_band = 0.5;
    /// slack on price comparisons, in units of spot
    double price_slack_rel = 1e-9;
};

/// Static no-arbitrage check on the discrete grid via call prices
/// recomputed from the vols.
AdmissibilityReport validate_admissible(const MarketSurface& s,
                                        const AdmissibilityConfig& cfg = {});

/// Interpolated vol: linear in strike on the vol, linear in tau on total
/// variance. Exact on grid nodes; OutOfDomain outside the grid box or
/// when a needed cell is Missing.
double iv_at(const MarketSurface& s, double strike, double tau);

} // namespace skew
