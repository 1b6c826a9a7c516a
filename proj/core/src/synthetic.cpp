#include <skew/synthetic.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

namespace skew {

namespace {

Date add_days(const Date& d, int days) {
    using namespace std::chrono;
    const sys_days sd = sys_days{year_month_day{std::chrono::year{d.year},
                                                std::chrono::month{unsigned(d.month)},
                                                std::chrono::day{unsigned(d.day)}}} +
                        std::chrono::days{days};
    const year_month_day ymd{sd};
    return {int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day()))};
}

} // namespace

std::vector<RawQuote> synth_chain(const SynthConfig& cfg) {
    if (cfg.n_days < 1 || cfg.moneyness.empty() || cfg.expiry_days.empty())
        throw Error("synth_chain: need at least one day, strike and expiry");

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<RawQuote> rows;
    double spot = cfg.spot0;
    for (int day = 0; day < cfg.n_days; ++day) {
        const Date date = add_days(cfg.start_date, day);
        if (day > 0 && cfg.spot_vol_daily > 0.0)
            spot *= std::exp(cfg.spot_vol_daily * gauss(rng) -
                             0.5 * cfg.spot_vol_daily * cfg.spot_vol_daily);

        // strike grid for the day
        std::set<double> strike_set;
        for (double m : cfg.moneyness) {
            double k = m * spot;
            if (cfg.strike_step > 0.0) k = std::round(k / cfg.strike_step) * cfg.strike_step;
            if (k > 0.0) strike_set.insert(k);
        }

        for (int ed : cfg.expiry_days) {
            const Date expiry = add_days(date, ed);
            const double tau = year_frac_act365(date, expiry);
            double ratio = cfg.ratio;
            if (cfg.ratio_jitter > 0.0) ratio *= std::exp(cfg.ratio_jitter * gauss(rng));
            // sigma scales with the spot so the vol level stays put
            const PclvgParams p{cfg.sigma1 * spot / cfg.spot0,
                                ratio * cfg.sigma1 * spot / cfg.spot0, spot};

            for (double strike : strike_set) {
                const double s_adj = spot * std::exp(-cfg.div_yield * tau);
                const double k_adj = strike * std::exp(-cfg.rate * tau);
                double vol;
                if (cfg.model == SynthConfig::Model::Pclvg) {
                    // the model smile lives in the zero-carry world
                    vol = pclvg_iv(p, strike, tau);
                } else {
                    vol = cfg.flat_vol;
                }
                for (OptionKind kind : {OptionKind::Call, OptionKind::Put}) {
                    double mid = bs_price(s_adj, k_adj, tau, vol, kind);
                    if (cfg.noise_rel > 0.0)
                        mid *= std::exp(cfg.noise_rel * gauss(rng) -
                                        0.5 * cfg.noise_rel * cfg.noise_rel);
                    if (!(mid > 0.0)) continue;
                    RawQuote q;
                    q.date = date;
                    q.expiry = expiry;
                    q.strike = strike;
                    q.kind = kind;
                    const double h = cfg.half_spread_rel;
                    q.bid = mid * (1.0 - h);
                    q.ask = mid * (1.0 + h);
                    if (cfg.missing_bid_fraction > 0.0 && unif(rng) < cfg.missing_bid_fraction)
                        q.bid.reset();
                    q.open_interest =
                        (cfg.zero_oi_fraction > 0.0 && unif(rng) < cfg.zero_oi_fraction)
                            ? 0
                            : 100 + static_cast<long>(unif(rng) * 900);
                    q.underlying = spot;
                    q.rate = cfg.rate;
                    q.div_yield = cfg.div_yield;
                    rows.push_back(q);
                }
            }
        }
    }
    return rows;
}

void write_chain_csv(const std::filesystem::path& path, const std::vector<RawQuote>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write chain csv: " + path.string());
    out << "date,expiry,strike,kind,bid,ask,open_interest,underlying,rate,div_yield\n";
    out.precision(12);
    for (const auto& q : rows) {
        out << q.date.str() << ',' << q.expiry.str() << ',' << q.strike << ','
            << (q.kind == OptionKind::Call ? 'C' : 'P') << ',';
        if (q.bid) out << *q.bid;
        out << ',';
        if (q.ask) out << *q.ask;
        out << ',' << q.open_interest << ',' << q.underlying << ',' << q.rate << ','
            << q.div_yield << '\n';
    }
}

MarketPath synth_path(const PclvgParams& dynamics, double x0, double maturity,
                      const PathConfig& cfg, std::uint64_t seed) {
    dynamics.validate();
    if (!(x0 > 0.0) || !(maturity > 0.0))
        throw Error("synth_path: need positive x0 and maturity");
    if (cfg.n_times < 2 || cfg.substeps < 1) throw Error("synth_path: bad grid");

    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> exp1(1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double U = dynamics.barrier;
    const double xi = exp1(rng);

    MarketPath path;
    path.times.resize(static_cast<std::size_t>(cfg.n_times) + 1);
    path.spots.resize(path.times.size());
    path.surfaces.resize(path.times.size());

    double d = x0;
    path.times[0] = 0.0;
    path.spots[0] = x0;
    double s_prev = 0.0;
    for (int k = 1; k <= cfg.n_times; ++k) {
        const double t = maturity * k / cfg.n_times;
        const double s_here = t * t * xi; // the clock runs quadratically
        const double ds = (s_here - s_prev) / cfg.substeps;
        for (int m = 0; m < cfg.substeps && d > 0.0; ++m) {
            const double sig = d < U ? dynamics.sigma1 : dynamics.sigma2;
            d += std::sqrt(2.0 * ds) * sig * gauss(rng);
            if (d < 0.0) d = 0.0;
        }
        s_prev = s_here;
        path.times[static_cast<std::size_t>(k)] = t;
        path.spots[static_cast<std::size_t>(k)] = d;
    }

    // marking surface at the first barrier touch, at the remaining maturity
    for (std::size_t k = 0; k < path.spots.size(); ++k) {
        if (path.spots[k] < U) continue;
        const double remaining = maturity - path.times[k];
        if (remaining <= 0.0) break;
        const double s1 = cfg.mark_sigma1 > 0.0 ? cfg.mark_sigma1 : dynamics.sigma1;
        const double rho = cfg.mark_ratio > 0.0 ? cfg.mark_ratio : dynamics.skew_ratio();
        const PclvgParams mark{s1, rho * s1, U};
        const std::vector<double>& ks =
            cfg.mark_strikes.empty()
                ? std::vector<double>{0.80 * U, 0.90 * U, 0.95 * U, 1.05 * U, 1.15 * U}
                : cfg.mark_strikes;
        path.surfaces[k] = pclvg_surface(mark, ks, {remaining});
        break;
    }
    return path;
}

MarketSurface pclvg_surface(const PclvgParams& p, const std::vector<double>& strikes,
                            const std::vector<double>& taus) {
    p.validate();
    MarketSurface s;
    s.observation_date = Date{2026, 1, 5};
    s.spot = p.barrier;
    s.strikes = strikes;
    s.taus = taus;
    s.iv.assign(strikes.size(), std::vector<double>(taus.size(), 0.0));
    s.quality.assign(strikes.size(),
                     std::vector<CellQuality>(taus.size(), CellQuality::Observed));
    for (std::size_t k = 0; k < strikes.size(); ++k)
        for (std::size_t t = 0; t < taus.size(); ++t)
            s.iv[k][t] = pclvg_iv(p, strikes[k], taus[t]);
    return s;
}

} // namespace skew
