#include <skew/calibration.hpp>

#include <skew/detail/parallel.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>

namespace skew {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Objective {
    std::span<const SmileQuote> slice;
    double barrier;
    double tau;
    double log_lo, log_hi;

    double operator()(double log_s1, double log_s2) const {
        if (log_s1 < log_lo || log_s1 > log_hi || log_s2 < log_lo || log_s2 > log_hi)
            return kInf;
        const PclvgParams p{std::exp(log_s1), std::exp(log_s2), barrier};
        double sse = 0.0;
        for (const auto& q : slice) {
            const double model = q.kind == OptionKind::Call
                                     ? pclvg_call(p, barrier, q.strike, tau)
                                     : pclvg_put(p, barrier, q.strike, tau);
            const double d = model - q.mid;
            sse += d * d;
        }
        return sse;
    }
};

struct NmPoint {
    double x, y, f;
};

// Nelder-Mead on two log parameters. Returns the best vertex.
NmPoint nelder_mead(const Objective& obj, double x0, double y0, double rel_tol,
                    int max_iter) {
    const double h = 0.4; // initial simplex size in log units
    std::array<NmPoint, 3> s{NmPoint{x0, y0, obj(x0, y0)},
                             NmPoint{x0 + h, y0, obj(x0 + h, y0)},
                             NmPoint{x0, y0 + h, obj(x0, y0 + h)}};
    auto order = [&] {
        std::sort(s.begin(), s.end(),
                  [](const NmPoint& a, const NmPoint& b) { return a.f < b.f; });
    };
    order();
    for (int it = 0; it < max_iter; ++it) {
        if (s[2].f - s[0].f <= rel_tol * (std::abs(s[0].f) + 1e-300)) break;
        const double cx = 0.5 * (s[0].x + s[1].x);
        const double cy = 0.5 * (s[0].y + s[1].y);
        auto try_point = [&](double t) {
            NmPoint p{cx + t * (cx - s[2].x), cy + t * (cy - s[2].y), 0.0};
            p.f = obj(p.x, p.y);
            return p;
        };
        NmPoint r = try_point(1.0); // reflection
        if (r.f < s[0].f) {
            NmPoint e = try_point(2.0); // expansion
            s[2] = e.f < r.f ? e : r;
        } else if (r.f < s[1].f) {
            s[2] = r;
        } else {
            NmPoint c = r.f < s[2].f ? try_point(0.5) : try_point(-0.5); // contraction
            if (c.f < std::min(r.f, s[2].f)) {
                s[2] = c;
            } else { // shrink toward the best vertex
                for (int k = 1; k < 3; ++k) {
                    s[k].x = s[0].x + 0.5 * (s[k].x - s[0].x);
                    s[k].y = s[0].y + 0.5 * (s[k].y - s[0].y);
                    s[k].f = obj(s[k].x, s[k].y);
                }
            }
        }
        order();
    }
    return s[0];
}

double wing_coeff(double barrier, double strike) {
    return std::abs(std::log(strike / barrier)) /
           std::sqrt(2.0 * std::abs(strike - barrier));
}

// invert the short-maturity wing limit at the most OTM quote of one side
double wing_seed(std::span<const SmileQuote> slice, double barrier, double tau,
                 bool below) {
    const SmileQuote* pick = nullptr;
    for (const auto& q : slice) {
        if ((q.strike < barrier) != below) continue;
        if (!pick || (below ? q.strike < pick->strike : q.strike > pick->strike))
            pick = &q;
    }
    if (pick) {
        try {
            const double iv = implied_vol(pick->mid, barrier, pick->strike, tau,
                                          pick->kind);
            const double w = wing_coeff(barrier, pick->strike);
            return (iv / w) * (iv / w);
        } catch (const Error&) {
            // fall through to the flat-vol fallback
        }
    }
    return 2.0 * barrier * 0.04; // sigma of a ~20% flat smile near the barrier
}

} // namespace

SmileFit fit_smile(std::span<const SmileQuote> slice, double barrier, double tau,
                   const std::string& date, const FitConfig& cfg) {
    if (slice.size() < 3)
        throw InsufficientQuotes("fit_smile: need at least 3 quotes");
    bool any_below = false, any_above = false;
    for (const auto& q : slice) {
        if (!(q.strike > 0.0) || !(q.mid > 0.0))
            throw Error("fit_smile: quotes must have positive strike and price");
        (q.strike < barrier ? any_below : any_above) = true;
    }
    if (!any_below || !any_above)
        throw OneSidedSmile("fit_smile: need a strike on each side of the barrier");
    if (!(tau > 0.0)) throw Error("fit_smile: tau must be positive");

    const Objective obj{slice, barrier, tau, std::log(cfg.sigma_lo),
                        std::log(cfg.sigma_hi)};
    const double seed1 = std::log(wing_seed(slice, barrier, tau, true));
    const double seed2 = std::log(wing_seed(slice, barrier, tau, false));

    NmPoint best{0, 0, kInf};
    const int n = std::max(1, cfg.starts_per_axis);
    const double span = std::log(cfg.start_span);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double x0 = n == 1 ? seed1 : seed1 - span + 2.0 * span * a / (n - 1);
            const double y0 = n == 1 ? seed2 : seed2 - span + 2.0 * span * b / (n - 1);
            const NmPoint r = nelder_mead(obj, x0, y0, cfg.rel_obj_tol, cfg.max_iter);
            if (r.f < best.f) best = r;
        }
    if (!std::isfinite(best.f)) throw Error("fit_smile: optimizer failed to start");

    SmileFit fit;
    fit.date = date;
    fit.tau = tau;
    fit.sigma1 = std::exp(best.x);
    fit.sigma2 = std::exp(best.y);
    fit.rmse = std::sqrt(best.f / static_cast<double>(slice.size()));
    fit.n_quotes = static_cast<int>(slice.size());
    return fit;
}

std::vector<SmileQuote> slice_quotes(const MarketSurface& s, std::size_t tau_idx,
                                     double barrier) {
    std::vector<SmileQuote> out;
    for (std::size_t k = 0; k < s.strikes.size(); ++k) {
        if (!s.observed(k, tau_idx)) continue;
        const double strike = s.strikes[k];
        const OptionKind kind = strike < barrier ? OptionKind::Put : OptionKind::Call;
        const double mid =
            bs_price(s.spot, strike, s.taus[tau_idx], s.iv[k][tau_idx], kind);
        if (mid > 0.0) out.push_back({strike, mid, kind});
    }
    return out;
}

std::vector<SmileFit> calibrate_dataset(const std::vector<MarketSurface>& dataset,
                                        const CalibrationConfig& cfg) {
    struct Task {
        const MarketSurface* surf;
        std::size_t tau_idx;
    };
    std::vector<Task> tasks;
    for (const auto& s : dataset)
        for (std::size_t t = 0; t < s.taus.size(); ++t) tasks.push_back({&s, t});

    std::vector<SmileFit> fits(tasks.size());
    std::vector<char> ok(tasks.size(), 0);
    std::mutex log_mutex;
    detail::parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
        const auto& [surf, t] = tasks[i];
        const double barrier =
            cfg.barrier_rule == BarrierRule::Spot ? surf->spot : cfg.fixed_barrier;
        try {
            const auto quotes = slice_quotes(*surf, t, barrier);
            fits[i] = fit_smile(quotes, barrier, surf->taus[t],
                                surf->observation_date.str(), cfg.fit);
            ok[i] = 1;
        } catch (const Error& e) {
            std::lock_guard lock(log_mutex);
            std::cerr << "calibrate: skipping " << surf->observation_date.str() << " tau="
                      << surf->taus[t] << ": " << e.what() << '\n';
        }
    });

    std::vector<SmileFit> out;
    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (ok[i]) out.push_back(std::move(fits[i]));
    std::stable_sort(out.begin(), out.end(), [](const SmileFit& a, const SmileFit& b) {
        return a.date != b.date ? a.date < b.date : a.tau < b.tau;
    });
    return out;
}

SkewSeries skew_series_from_fits(const std::vector<SmileFit>& fits) {
    SkewSeries series;
    for (const auto& f : fits) series.entries.push_back({f.date, f.tau, f.ratio()});
    return series;
}

SkewSeries skew_series(const std::vector<MarketSurface>& dataset,
                       const CalibrationConfig& cfg) {
    if (dataset.empty()) throw Error("skew_series: empty dataset");
    return skew_series_from_fits(calibrate_dataset(dataset, cfg));
}

Kappas quantile_kappas(const SkewSeries& series, double alpha) {
    if (series.entries.empty()) throw EmptySeries("quantile_kappas: empty series");
    if (!(alpha > 0.0) || !(alpha < 0.5))
        throw Error("quantile_kappas: alpha must lie in (0, 0.5)");

    std::vector<double> xs;
    xs.reserve(series.entries.size());
    double mean = 0.0;
    for (const auto& e : series.entries) {
        xs.push_back(e.ratio);
        mean += e.ratio;
    }
    mean /= static_cast<double>(xs.size());
    std::sort(xs.begin(), xs.end());

    auto quantile = [&](double p) {
        const double h = p * static_cast<double>(xs.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, xs.size() - 1);
        const double w = h - std::floor(h);
        return xs[lo] + w * (xs[hi] - xs[lo]);
    };
    return {quantile(alpha), quantile(1.0 - alpha), mean, alpha, xs.size()};
}

void write_fits_csv(const std::vector<SmileFit>& fits, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write fits csv: " + path.string());
    out.precision(12);
    out << "date,tau,sigma1,sigma2,ratio,rmse,n_quotes\n";
    for (const auto& f : fits)
        out << f.date << ',' << f.tau << ',' << f.sigma1 << ',' << f.sigma2 << ','
            << f.ratio() << ',' << f.rmse << ',' << f.n_quotes << '\n';
}

void write_fits_json(const std::vector<SmileFit>& fits, const std::filesystem::path& path) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& f : fits)
        j.push_back({{"date", f.date},
                     {"tau", f.tau},
                     {"sigma1", f.sigma1},
                     {"sigma2", f.sigma2},
                     {"ratio", f.ratio()},
                     {"rmse", f.rmse},
                     {"n_quotes", f.n_quotes}});
    std::ofstream out(path);
    if (!out) throw IoError("cannot write fits json: " + path.string());
    out << j.dump(2) << '\n';
}

void write_kappas_json(const Kappas& k, const std::filesystem::path& path) {
    nlohmann::json j{{"kappa_star", k.kappa_star},
                     {"kappa_upper", k.kappa_upper},
                     {"kappa_mean", k.kappa_mean},
                     {"alpha", k.alpha},
                     {"n", k.n}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write kappas json: " + path.string());
    out << j.dump(2) << '\n';
}

Kappas load_kappas_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open kappas json: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        Kappas k{};
        k.kappa_star = j.at("kappa_star").get<double>();
        k.kappa_upper = j.at("kappa_upper").get<double>();
        k.kappa_mean = j.value("kappa_mean", 0.5 * (k.kappa_star + k.kappa_upper));
        k.alpha = j.value("alpha", 0.01);
        k.n = j.value("n", std::size_t{0});
        return k;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("kappas json " + path.string() + ": " + e.what());
    }
}

} // namespace skew
