// Command-line front end: chain validation, calibration, skew portfolios,
// barrier-option hedging and plot-ready figure data.

#include <skew/beliefs.hpp>
#include <skew/calibration.hpp>
#include <skew/hedging.hpp>
#include <skew/pclvg.hpp>
#include <skew/rtis.hpp>
#include <skew/surface.hpp>
#include <skew/synthetic.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct GlobalOpts {
    std::vector<std::string> inputs;
    std::string out;
    std::string barrier = "spot"; // "spot" or a number
    double put_moneyness = 0.95;
    double alpha = 0.01;
    std::string kappa_file;
    std::uint64_t seed = 1;
    int jobs = 0;
    double tol = 1e-10;
};

double barrier_for(const GlobalOpts& g, const skew::MarketSurface& s) {
    if (g.barrier == "spot") return s.spot;
    return std::stod(g.barrier);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw skew::IoError("cannot write " + path);
    out.precision(12);
    return out;
}

std::vector<skew::MarketSurface> load_inputs(const GlobalOpts& g) {
    if (g.inputs.empty()) throw skew::IoError("no --input given");
    std::vector<skew::MarketSurface> all;
    for (const auto& path : g.inputs) {
        auto part = skew::load_chain_dataset(path);
        all.insert(all.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }
    return all;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const GlobalOpts& g) {
    bool all_passed = true;
    json report;
    report["surfaces"] = json::array();
    for (const auto& path : g.inputs) {
        for (const auto& s : skew::load_chain_dataset(path)) {
            const auto rep = skew::validate_admissible(s);
            all_passed = all_passed && rep.passed;
            json js{{"file", path},
                    {"date", s.observation_date.str()},
                    {"passed", rep.passed},
                    {"violations", json::array()}};
            for (const auto& v : rep.violations)
                js["violations"].push_back({{"condition", v.condition},
                                            {"strike", s.strikes[v.strike_idx]},
                                            {"tau", s.taus[v.tau_idx]},
                                            {"magnitude", v.magnitude}});
            report["surfaces"].push_back(std::move(js));
        }
    }
    report["passed"] = all_passed;
    if (!g.out.empty())
        open_out(g.out) << report.dump(2) << '\n';
    else
        std::cout << report.dump(2) << '\n';
    return all_passed ? kExitOk : kExitValidation;
}

// --------------------------------------------------------------- calibrate

int cmd_calibrate(const GlobalOpts& g) {
    const auto dataset = load_inputs(g);
    skew::CalibrationConfig cfg;
    cfg.jobs = g.jobs;
    cfg.fit.rel_obj_tol = g.tol;
    if (g.barrier != "spot") {
        cfg.barrier_rule = skew::BarrierRule::Fixed;
        cfg.fixed_barrier = std::stod(g.barrier);
    }
    const auto fits = skew::calibrate_dataset(dataset, cfg);
    const auto series = skew::skew_series_from_fits(fits);
    const auto kappas = skew::quantile_kappas(series, g.alpha);

    std::filesystem::path dir = g.out.empty() ? "." : g.out;
    std::filesystem::create_directories(dir);
    skew::write_fits_csv(fits, dir / "fits.csv");
    skew::write_fits_json(fits, dir / "fits.json");
    skew::write_kappas_json(kappas, dir / "kappas.json");
    std::cout << "calibrated " << fits.size() << " slices; kappa_star="
              << kappas.kappa_star << " kappa_upper=" << kappas.kappa_upper
              << " kappa_mean=" << kappas.kappa_mean << '\n';
    return kExitOk;
}

// -------------------------------------------------------------------- rtis

struct RtisCell {
    bool skipped = true;
    double call_strike = 0.0;
    double value = 0.0;
};

void emit_cell(std::ostream& out, const RtisCell& c) {
    if (c.skipped) {
        out << ",,1";
    } else {
        out << c.call_strike << ',' << c.value << ",0";
    }
}

int cmd_rtis(const GlobalOpts& g) {
    if (g.kappa_file.empty()) throw skew::IoError("rtis: --kappa-file required");
    const auto kappas = skew::load_kappas_json(g.kappa_file);
    const auto dataset = load_inputs(g);

    auto out = open_out(g.out.empty() ? "rtis.csv" : g.out);
    out << "date,tau,spot,put_strike"
           ",low_star_call_strike,low_star_value,low_star_skipped"
           ",low_mean_call_strike,low_mean_value,low_mean_skipped"
           ",high_upper_call_strike,high_upper_value,high_upper_skipped"
           ",high_mean_call_strike,high_mean_value,high_mean_skipped\n";

    for (const auto& s : dataset) {
        const double U = barrier_for(g, s);
        // put strike: closest grid strike below the barrier to the target
        std::vector<double> below;
        for (double k : s.strikes)
            if (k < U) below.push_back(k);
        if (below.empty()) continue;
        const std::size_t ib = skew::nearest_strike_index(g.put_moneyness * s.spot, below);
        std::size_t i = 0;
        while (s.strikes[i] != below[ib]) ++i;

        for (std::size_t t = 0; t < s.taus.size(); ++t) {
            const double tau = s.taus[t];
            auto build = [&](double kappa, bool low) {
                RtisCell cell;
                try {
                    skew::Portfolio port =
                        low ? skew::build_rtis_low(i, kappa, U, s.strikes, tau)
                            : skew::build_rtis_high(i, kappa, U, s.strikes, tau);
                    const auto norm = skew::with_put_dollar_normalization(port, s);
                    cell.call_strike = port.legs[low ? 0 : 1].strike;
                    cell.value = skew::price_portfolio(norm, s);
                    cell.skipped = false;
                } catch (const skew::Error&) {
                    // no eligible strike (or unpriceable leg): emit a skip marker
                }
                return cell;
            };
            out << s.observation_date.str() << ',' << tau << ',' << s.spot << ','
                << s.strikes[i] << ',';
            emit_cell(out, build(kappas.kappa_star, true));
            out << ',';
            emit_cell(out, build(kappas.kappa_mean, true));
            out << ',';
            emit_cell(out, build(kappas.kappa_upper, false));
            out << ',';
            emit_cell(out, build(kappas.kappa_mean, false));
            out << '\n';
        }
    }
    return kExitOk;
}

// -------------------------------------------------------------- superhedge

int cmd_superhedge(const GlobalOpts& g, double uop_strike, double maturity,
                   int simulate_paths, const std::vector<std::string>& path_files) {
    if (g.kappa_file.empty()) throw skew::IoError("superhedge: --kappa-file required");
    const auto kappas = skew::load_kappas_json(g.kappa_file);
    const auto dataset = load_inputs(g);
    const auto& s0 = dataset.front();
    const double U = barrier_for(g, s0);

    const auto bhr = skew::bhr_strategy(uop_strike, U, maturity, s0.strikes, s0);
    const auto improved = skew::improved_superhedge(uop_strike, U, maturity,
                                                    kappas.kappa_upper, s0.strikes, s0);

    json report;
    report["barrier"] = U;
    report["uop_strike"] = uop_strike;
    report["maturity"] = maturity;
    report["kappa_upper"] = kappas.kappa_upper;
    auto legs_json = [](const skew::HedgeStrategy& h) {
        json legs = json::array();
        for (const auto& l : h.portfolio.legs) {
            const char* kind = l.kind == skew::LegKind::Call  ? "call"
                               : l.kind == skew::LegKind::Put ? "put"
                                                              : "forward";
            legs.push_back({{"kind", kind},
                            {"strike", l.strike},
                            {"tau", l.tau},
                            {"weight", l.weight}});
        }
        return legs;
    };
    report["bhr"] = {{"cost", bhr.initial_cost}, {"legs", legs_json(bhr)}};
    report["improved"] = {{"cost", improved.initial_cost}, {"legs", legs_json(improved)}};

    json paths = json::array();
    int gaps = 0;
    auto eval_path = [&](const skew::MarketPath& path, const std::string& label) {
        try {
            const auto ev = skew::evaluate_on_path(improved, path);
            paths.push_back({{"path", label},
                             {"liquidation_time", ev.liquidation_time},
                             {"liquidation_value", ev.liquidation_value},
                             {"uop_payoff", ev.uop_payoff},
                             {"inequality_ok", ev.inequality_ok}});
        } catch (const skew::PathGap& e) {
            ++gaps;
            paths.push_back({{"path", label}, {"path_gap", e.what()}});
        }
    };

    // externally supplied paths: CSV time,spot[,chain csv for that time]
    for (const auto& pf : path_files) {
        std::ifstream in(pf);
        if (!in) throw skew::IoError("cannot open path file " + pf);
        std::string line;
        std::getline(in, line); // header
        skew::MarketPath path;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string t, sp, surf;
            std::getline(ss, t, ',');
            std::getline(ss, sp, ',');
            std::getline(ss, surf, ',');
            path.times.push_back(std::stod(t));
            path.spots.push_back(std::stod(sp));
            if (!surf.empty())
                path.surfaces.push_back(skew::load_chain(surf));
            else
                path.surfaces.emplace_back();
        }
        eval_path(path, pf);
    }

    // simulated paths: dynamics at the fitted vol level, marking surfaces
    // inside the upper beliefs
    if (simulate_paths > 0) {
        skew::CalibrationConfig ccfg;
        ccfg.jobs = g.jobs;
        const auto fits = skew::calibrate_dataset({s0}, ccfg);
        const double sigma1 = fits.empty() ? 0.08 * U : fits.front().sigma1;
        skew::PathConfig pcfg;
        pcfg.mark_ratio = kappas.kappa_upper;
        pcfg.mark_sigma1 = sigma1;
        pcfg.mark_strikes = std::vector<double>(s0.strikes.begin(), s0.strikes.end());
        const skew::PclvgParams dyn{sigma1, 0.8 * kappas.kappa_upper * sigma1, U};
        for (int p = 0; p < simulate_paths; ++p)
            eval_path(skew::synth_path(dyn, s0.spot, maturity, pcfg, g.seed + p),
                      "sim-" + std::to_string(p));
    }

    report["paths"] = std::move(paths);
    report["path_gaps"] = gaps;
    bool all_ok = true;
    for (const auto& pj : report["paths"])
        if (pj.contains("inequality_ok") && !pj["inequality_ok"].get<bool>())
            all_ok = false;
    report["all_paths_dominate"] = all_ok;

    if (!g.out.empty())
        open_out(g.out) << report.dump(2) << '\n';
    else
        std::cout << report.dump(2) << '\n';
    return all_ok ? kExitOk : kExitValidation;
}

// ------------------------------------------------------------------ figure

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

int figure_g_payoff(const GlobalOpts& g, double barrier, double ratio, double strike,
                    double xmax, int points) {
    const skew::PclvgParams p{1.0, ratio, barrier};
    if (xmax <= 0.0) xmax = 3.5 * barrier;

    // kink abscissas of g below xmax, in order
    std::set<double> xs;
    for (int i = 0; i <= points; ++i) xs.insert(xmax * i / points);
    std::set<double> kinks;
    for (long n = 0;; ++n) {
        const double up = barrier + (barrier * (2.0 * n + 1.0) - strike) * ratio;
        const double down = barrier + (barrier * (2.0 * n + 1.0) + strike) * ratio;
        if (up > xmax && down > xmax) break;
        if (up <= xmax) kinks.insert(up);
        if (down <= xmax) kinks.insert(down);
    }
    xs.insert(kinks.begin(), kinks.end());

    auto out = open_out(g.out.empty() ? "g_payoff.csv" : g.out);
    out << "x,g,g_lower,g_upper,is_kink\n";
    for (double x : xs) {
        const double gv = skew::static_hedge_payoff(p, strike, x);
        const auto env = skew::hedge_envelopes(p, strike, x);
        out << x << ',' << gv << ',' << env.lower << ',' << env.upper << ','
            << (kinks.count(x) ? 1 : 0) << '\n';
    }
    return kExitOk;
}

int figure_bhr_payoff(const GlobalOpts& g, double barrier, double strike,
                      double put_strike, double kappa,
                      const std::vector<double>& strikes, int points) {
    const double U = barrier, K = strike, Ki = put_strike;
    if (!(Ki < U) || !(K <= U)) throw skew::Error("bhr-payoff: need K_i < U, K <= U");
    const double put_w = (U - K) / (U - Ki);
    const double fwd_w = (Ki - K) / (U - Ki);

    std::optional<double> call_strike;
    if (!strikes.empty()) {
        std::vector<double> grid(strikes);
        grid.push_back(Ki); // the put strike need not sit on the traded grid
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        std::size_t i = 0;
        while (grid[i] != Ki) ++i;
        try {
            call_strike = grid[skew::overline_j(i, kappa, U, grid)];
        } catch (const skew::NoEligibleStrike&) {
        }
    }
    const double call_w = call_strike ? -put_w * Ki / U : 0.0;

    auto out = open_out(g.out.empty() ? "bhr_payoff.csv" : g.out);
    out << "s,bhr_below,bhr_hit,improved_below,improved_hit,uop\n";
    const double smax = call_strike ? 1.4 * *call_strike : 1.2 * U;
    for (int i = 0; i <= points; ++i) {
        const double s = smax * i / points;
        const double put = std::max(Ki - s, 0.0);
        const double call = call_strike ? std::max(s - *call_strike, 0.0) : 0.0;
        const double bhr_below = put_w * put + fwd_w * (s - U);
        const double bhr_hit = put_w * put; // forward closed at the barrier touch
        out << s << ',' << bhr_below << ',' << bhr_hit << ','
            << bhr_below + call_w * call << ',' << bhr_hit + call_w * call << ','
            << (s <= U ? std::max(K - s, 0.0) : 0.0) << '\n';
    }
    return kExitOk;
}

int figure_smile_fit(const GlobalOpts& g) {
    const auto dataset = load_inputs(g);
    skew::CalibrationConfig cfg;
    cfg.jobs = g.jobs;
    if (g.barrier != "spot") {
        cfg.barrier_rule = skew::BarrierRule::Fixed;
        cfg.fixed_barrier = std::stod(g.barrier);
    }
    const auto fits = skew::calibrate_dataset(dataset, cfg);
    auto out = open_out(g.out.empty() ? "smile_fit.csv" : g.out);
    out << "date,tau,strike,market_iv,model_iv\n";
    for (const auto& s : dataset) {
        const double U = barrier_for(g, s);
        for (std::size_t t = 0; t < s.taus.size(); ++t) {
            const skew::SmileFit* fit = nullptr;
            for (const auto& f : fits)
                if (f.date == s.observation_date.str() && f.tau == s.taus[t]) fit = &f;
            if (!fit) continue;
            const skew::PclvgParams p{fit->sigma1, fit->sigma2, U};
            for (std::size_t k = 0; k < s.strikes.size(); ++k) {
                if (!s.observed(k, t)) continue;
                out << s.observation_date.str() << ',' << s.taus[t] << ',' << s.strikes[k]
                    << ',' << s.iv[k][t] << ',' << skew::pclvg_iv(p, s.strikes[k], s.taus[t])
                    << '\n';
            }
        }
    }
    return kExitOk;
}

int figure_dominating(const GlobalOpts& g) {
    if (g.kappa_file.empty()) throw skew::IoError("dominating: --kappa-file required");
    const auto kappas = skew::load_kappas_json(g.kappa_file);
    const auto dataset = load_inputs(g);
    auto out = open_out(g.out.empty() ? "dominating.csv" : g.out);
    out << "date,tau,strike,market_iv,lower_dominating_iv,upper_dominating_iv\n";
    for (const auto& s : dataset) {
        const double U = barrier_for(g, s);
        std::vector<double> below;
        for (double k : s.strikes)
            if (k < U) below.push_back(k);
        if (below.empty()) continue;
        const std::size_t ib = skew::nearest_strike_index(g.put_moneyness * s.spot, below);
        std::size_t i = 0;
        while (s.strikes[i] != below[ib]) ++i;

        for (std::size_t t = 0; t < s.taus.size(); ++t) {
            std::optional<skew::PclvgParams> lower, upper;
            try {
                lower = skew::fit_scale(kappas.kappa_star, s, U, i, s.taus[t]);
            } catch (const skew::Error&) {
            }
            try {
                upper = skew::fit_scale(kappas.kappa_upper, s, U, i, s.taus[t]);
            } catch (const skew::Error&) {
            }
            for (std::size_t k = 0; k < s.strikes.size(); ++k) {
                if (!s.observed(k, t) || s.strikes[k] == U) continue;
                out << s.observation_date.str() << ',' << s.taus[t] << ',' << s.strikes[k]
                    << ',' << s.iv[k][t] << ',';
                if (lower) out << skew::pclvg_iv(*lower, s.strikes[k], s.taus[t]);
                out << ',';
                if (upper) out << skew::pclvg_iv(*upper, s.strikes[k], s.taus[t]);
                out << '\n';
            }
        }
    }
    return kExitOk;
}

int figure_series_passthrough(const GlobalOpts& g, const std::string& which) {
    if (g.inputs.empty()) throw skew::IoError("figure: --input required");
    std::ifstream in(g.inputs.front());
    if (!in) throw skew::IoError("cannot open " + g.inputs.front());
    std::string header;
    std::getline(in, header);
    std::stringstream hs(header);
    std::vector<std::string> cols;
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);

    auto col_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return static_cast<long>(i);
        return -1L;
    };

    std::vector<std::string> keep;
    if (which == "skew-series") {
        keep = {"date", "tau", "sigma1", "sigma2", "ratio"};
    } else if (which == "rtis-series") {
        keep = {"date", "tau", "low_star_value", "low_mean_value", "high_upper_value",
                "high_mean_value"};
    } else { // rtis-moneyness
        keep = {"date", "tau", "spot", "low_star_call_strike", "high_upper_call_strike"};
    }
    std::vector<long> idx;
    for (const auto& name : keep) {
        const long i = col_of(name);
        if (i < 0) throw skew::SchemaError("figure: column " + name + " missing");
        idx.push_back(i);
    }

    auto out = open_out(g.out.empty() ? which + ".csv" : g.out);
    out << "index";
    if (which == "rtis-moneyness") {
        out << ",date,tau,low_star_call_moneyness,high_upper_call_moneyness\n";
    } else {
        for (const auto& name : keep) out << ',' << name;
        out << '\n';
    }
    std::string line;
    long row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::vector<std::string> cells;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        cells.resize(cols.size());
        if (which == "rtis-moneyness") {
            if (cells[static_cast<std::size_t>(idx[3])].empty() &&
                cells[static_cast<std::size_t>(idx[4])].empty())
                continue;
            const double spot = std::stod(cells[static_cast<std::size_t>(idx[2])]);
            out << row << ',' << cells[static_cast<std::size_t>(idx[0])] << ','
                << cells[static_cast<std::size_t>(idx[1])] << ',';
            if (!cells[static_cast<std::size_t>(idx[3])].empty())
                out << std::stod(cells[static_cast<std::size_t>(idx[3])]) / spot;
            out << ',';
            if (!cells[static_cast<std::size_t>(idx[4])].empty())
                out << std::stod(cells[static_cast<std::size_t>(idx[4])]) / spot;
            out << '\n';
        } else {
            out << row;
            for (long i : idx) out << ',' << cells[static_cast<std::size_t>(i)];
            out << '\n';
        }
        ++row;
    }
    return kExitOk;
}

// ------------------------------------------------------------------- synth

int cmd_synth(const GlobalOpts& g, skew::SynthConfig cfg) {
    cfg.seed = g.seed;
    const auto rows = skew::synth_chain(cfg);
    skew::write_chain_csv(g.out.empty() ? "chain.csv" : g.out, rows);
    std::cout << "wrote " << rows.size() << " rows\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"implied-skew toolbox: validation, calibration, skew portfolios, "
                 "barrier hedging, figure data"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--input", g.inputs, "input CSV file(s)");
    app.add_option("--out", g.out, "output file or directory");
    app.add_option("--barrier", g.barrier, "barrier rule: 'spot' or a level");
    app.add_option("--put-moneyness", g.put_moneyness, "put strike as a spot fraction");
    app.add_option("--alpha", g.alpha, "quantile level for the skew bounds");
    app.add_option("--kappa-file", g.kappa_file, "kappas.json from 'calibrate'");
    app.add_option("--seed", g.seed, "seed for all randomness");
    app.add_option("--jobs", g.jobs, "parallel workers (0 = auto)");
    app.add_option("--tol", g.tol, "numeric tolerance");

    app.add_subcommand("validate", "static no-arbitrage check of chain CSVs");

    app.add_subcommand("calibrate", "fit the two-level model per smile, export the "
                                    "skew series and its quantiles");

    app.add_subcommand("rtis", "price the skew portfolios per (date, maturity)");

    auto* sh = app.add_subcommand("superhedge", "barrier-option super-replication");
    double uop_strike = 0.0, maturity = 0.0;
    int simulate_paths = 0;
    std::vector<std::string> path_files;
    sh->add_option("--uop-strike", uop_strike, "barrier-option strike")->required();
    sh->add_option("--maturity", maturity, "maturity in years")->required();
    sh->add_option("--paths", path_files, "path CSV file(s): time,spot[,chain csv]");
    sh->add_option("--simulate", simulate_paths, "number of simulated paths");

    auto* fig = app.add_subcommand("figure", "plot-ready CSV for one figure family");
    std::string fig_name;
    double fig_barrier = 1000.0, fig_ratio = 0.6, fig_strike = 750.0;
    double fig_put_strike = 675.0, fig_xmax = 0.0;
    int fig_points = 700;
    std::string fig_strikes;
    fig->add_option("--name", fig_name,
                    "g-payoff | bhr-payoff | smile-fit | dominating | skew-series | "
                    "rtis-series | rtis-moneyness")
        ->required();
    fig->add_option("--fig-barrier", fig_barrier, "barrier for payoff figures");
    fig->add_option("--ratio", fig_ratio, "sigma2/sigma1 for payoff figures");
    fig->add_option("--strike", fig_strike, "payoff strike K");
    fig->add_option("--put-strike", fig_put_strike, "hedge put strike K_i");
    fig->add_option("--xmax", fig_xmax, "abscissa range (0 = auto)");
    fig->add_option("--points", fig_points, "grid points");
    fig->add_option("--strikes", fig_strikes, "comma-separated strike grid");

    auto* sy = app.add_subcommand("synth", "generate a synthetic chain CSV");
    skew::SynthConfig scfg;
    int synth_days = 1;
    std::string synth_model = "pclvg", synth_expiries, synth_moneyness, synth_start;
    sy->add_option("--days", synth_days, "number of observation dates");
    sy->add_option("--spot", scfg.spot0, "initial spot");
    sy->add_option("--model", synth_model, "pclvg | flatbs");
    sy->add_option("--sigma1", scfg.sigma1, "lower variance level (price/year)");
    sy->add_option("--synth-ratio", scfg.ratio, "sigma2/sigma1");
    sy->add_option("--flat-vol", scfg.flat_vol, "flat vol for flatbs");
    sy->add_option("--rate", scfg.rate, "interest rate");
    sy->add_option("--div-yield", scfg.div_yield, "dividend yield");
    sy->add_option("--noise", scfg.noise_rel, "multiplicative mid noise");
    sy->add_option("--zero-oi-frac", scfg.zero_oi_fraction, "fraction of zero-OI rows");
    sy->add_option("--spot-vol", scfg.spot_vol_daily, "daily spot wiggle");
    sy->add_option("--ratio-jitter", scfg.ratio_jitter, "per-slice ratio jitter");
    sy->add_option("--expiries", synth_expiries, "comma-separated expiry day offsets");
    sy->add_option("--moneyness", synth_moneyness, "comma-separated strike moneyness");
    sy->add_option("--start-date", synth_start, "first observation date (ISO)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("validate")) return cmd_validate(g);
        if (app.got_subcommand("calibrate")) return cmd_calibrate(g);
        if (app.got_subcommand("rtis")) return cmd_rtis(g);
        if (app.got_subcommand("superhedge"))
            return cmd_superhedge(g, uop_strike, maturity, simulate_paths, path_files);
        if (app.got_subcommand("figure")) {
            if (fig_name == "g-payoff")
                return figure_g_payoff(g, fig_barrier, fig_ratio, fig_strike, fig_xmax,
                                       fig_points);
            if (fig_name == "bhr-payoff")
                return figure_bhr_payoff(g, fig_barrier, fig_strike, fig_put_strike,
                                         fig_ratio,
                                         fig_strikes.empty() ? std::vector<double>{}
                                                             : parse_list(fig_strikes),
                                         fig_points);
            if (fig_name == "smile-fit") return figure_smile_fit(g);
            if (fig_name == "dominating") return figure_dominating(g);
            if (fig_name == "skew-series" || fig_name == "rtis-series" ||
                fig_name == "rtis-moneyness")
                return figure_series_passthrough(g, fig_name);
            throw skew::UnknownFigure("unknown figure '" + fig_name + "'");
        }
        if (app.got_subcommand("synth")) {
            if (synth_model == "flatbs") scfg.model = skew::SynthConfig::Model::FlatBs;
            scfg.n_days = synth_days;
            if (!synth_expiries.empty()) {
                scfg.expiry_days.clear();
                for (double d : parse_list(synth_expiries))
                    scfg.expiry_days.push_back(static_cast<int>(d));
            }
            if (!synth_moneyness.empty()) scfg.moneyness = parse_list(synth_moneyness);
            if (!synth_start.empty()) scfg.start_date = skew::Date::parse(synth_start);
            return cmd_synth(g, scfg);
        }
    } catch (const skew::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const skew::SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const skew::EmptySurface& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const skew::UnknownFigure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const skew::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
