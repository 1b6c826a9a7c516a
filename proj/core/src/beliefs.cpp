#include <skew/beliefs.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace skew {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double interp_clamped(const std::vector<double>& xs, const std::vector<double>& ys,
                      double x, bool* clamped) {
    if (x <= xs.front()) {
        if (clamped && x < xs.front() * (1 - 1e-12)) *clamped = true;
        return ys.front();
    }
    if (x >= xs.back()) {
        if (clamped && x > xs.back() * (1 + 1e-12)) *clamped = true;
        return ys.back();
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + w * (ys[hi] - ys[lo]);
}

} // namespace

double Beliefs::bound(const std::vector<std::vector<double>>& f, std::size_t strike_idx,
                      double tau, bool* clamped) const {
    return interp_clamped(tau_grid, f[strike_idx], tau, clamped);
}

Beliefs generated_beliefs(const PclvgParams& p, const std::vector<double>& strikes,
                          const std::vector<double>& tau_grid, BeliefSide side) {
    p.validate();
    if (strikes.empty() || tau_grid.empty())
        throw Error("generated_beliefs: empty strike or tau grid");
    for (double k : strikes)
        if (k == p.barrier)
            throw BarrierOnStrike("generated_beliefs: barrier coincides with a strike");

    Beliefs bel;
    bel.barrier = p.barrier;
    bel.strikes = strikes;
    bel.tau_grid = tau_grid;
    bel.side = side;
    bel.horizon = tau_grid.back();
    bel.a.assign(strikes.size(), std::vector<double>(tau_grid.size(), 0.0));
    bel.b = bel.a;
    for (std::size_t k = 0; k < strikes.size(); ++k)
        for (std::size_t t = 0; t < tau_grid.size(); ++t) {
            const double v = pclvg_iv(p, strikes[k], tau_grid[t]);
            // the generating surface sits on both bound functions
            bel.a[k][t] = v;
            bel.b[k][t] = v;
        }
    return bel;
}

namespace {

struct MembershipProblem {
    const MarketSurface* surf;
    const Beliefs* bel;
    std::vector<std::size_t> surf_strike_idx; // per belief strike
    std::vector<std::size_t> surf_tau_idx;    // surface taus within the horizon

    // worst signed slack over all constraints at scale c (>= 0 means all hold)
    double margin(double c, bool* clamped = nullptr) const {
        const Beliefs& B = *bel;
        const MarketSurface& S = *surf;
        double worst = kInf;
        for (std::size_t bk = 0; bk < B.strikes.size(); ++bk) {
            const double strike = B.strikes[bk];
            const bool below = strike < B.barrier;
            for (std::size_t st : surf_tau_idx) {
                const double tau = S.taus[st];
                const double sigma = S.iv[surf_strike_idx[bk]][st];
                if (!std::isfinite(sigma)) continue; // Missing cell
                double slack;
                if (B.side == BeliefSide::Lower) {
                    slack = below ? c * B.bound(B.b, bk, c * c * tau, clamped) - sigma
                                  : sigma - c * B.bound(B.a, bk, c * c * tau, clamped);
                } else {
                    slack = below ? sigma - c * B.bound(B.a, bk, c * c * tau, clamped)
                                  : c * B.bound(B.b, bk, c * c * tau, clamped) - sigma;
                }
                worst = std::min(worst, slack);
            }
        }
        return worst;
    }
};

} // namespace

std::optional<double> check_membership(const MarketSurface& surf, const Beliefs& bel,
                                       MembershipDiag* diag) {
    MembershipProblem prob{&surf, &bel, {}, {}};

    // belief strikes must be present on the surface
    for (double k : bel.strikes) {
        const auto it =
            std::find_if(surf.strikes.begin(), surf.strikes.end(), [&](double sk) {
                return std::abs(sk - k) <= 1e-9 * std::max(1.0, std::abs(k));
            });
        if (it == surf.strikes.end())
            throw GridMismatch("check_membership: belief strike not on the surface");
        prob.surf_strike_idx.push_back(
            static_cast<std::size_t>(it - surf.strikes.begin()));
    }
    for (std::size_t t = 0; t < surf.taus.size(); ++t)
        if (surf.taus[t] <= bel.horizon * (1 + 1e-12)) prob.surf_tau_idx.push_back(t);
    if (prob.surf_tau_idx.empty())
        throw GridMismatch("check_membership: no surface maturity within the horizon");

    // scan log-spaced candidates, then refine around the best margin
    constexpr int kGrid = 601;
    const double lo = std::log(1e-3), hi = std::log(1e3);
    double best_c = 1.0, best_m = -kInf;
    for (int i = 0; i < kGrid; ++i) {
        const double c = std::exp(lo + (hi - lo) * i / (kGrid - 1));
        const double m = prob.margin(c);
        if (m > best_m) {
            best_m = m;
            best_c = c;
        }
    }
    // golden-section polish of the (locally) concave margin around the best point
    {
        const double step = (hi - lo) / (kGrid - 1);
        double a = std::log(best_c) - step, b = std::log(best_c) + step;
        constexpr double kGolden = 0.61803398874989484820;
        double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
        double f1 = prob.margin(std::exp(x1)), f2 = prob.margin(std::exp(x2));
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + kGolden * (b - a);
                f2 = prob.margin(std::exp(x2));
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - kGolden * (b - a);
                f1 = prob.margin(std::exp(x1));
            }
        }
        const double c = std::exp(0.5 * (a + b));
        const double m = prob.margin(c);
        if (m > best_m) {
            best_m = m;
            best_c = c;
        }
    }

    const double slack = -1e-9; // equality members survive floating noise
    if (best_m < slack) return std::nullopt;
    if (diag) {
        diag->margin = best_m;
        bool clamped = false;
        prob.margin(best_c, &clamped);
        diag->clamped = clamped;
    }
    return best_c;
}

namespace {

// short-term wing coefficient: limit vol = sqrt(sigma_side) * wing(K)
double wing_coeff(double barrier, double strike) {
    return std::abs(std::log(strike / barrier)) /
           std::sqrt(2.0 * std::abs(strike - barrier));
}

} // namespace

DominatingSurface find_dominating(const Beliefs& bel, BeliefSide direction) {
    if (bel.strikes.empty() || bel.tau_grid.empty())
        throw Error("find_dominating: empty beliefs");
    for (double k : bel.strikes)
        if (k == bel.barrier)
            throw BarrierOnStrike("find_dominating: barrier coincides with a strike");

    const double U = bel.barrier;
    // Dominance roles per direction:
    //   Lower: model vol >= b below the barrier, <= a above it.
    //   Upper: model vol <= a below the barrier, >= b above it.
    const auto& below_f = direction == BeliefSide::Lower ? bel.b : bel.a;
    const auto& above_f = direction == BeliefSide::Lower ? bel.a : bel.b;
    const bool below_is_floor = direction == BeliefSide::Lower;

    // seed each wing from the short-maturity limits at the first grid point
    double sigma1_req = 0.0; // floor constraints want sigma1 at least this
    double sigma1_cap = kInf;
    double sigma2_req = 0.0;
    double sigma2_cap = kInf;
    for (std::size_t k = 0; k < bel.strikes.size(); ++k) {
        const double strike = bel.strikes[k];
        const double w = wing_coeff(U, strike);
        const double v0 = (strike < U ? below_f : above_f)[k].front();
        const double s = (v0 / w) * (v0 / w);
        if (strike < U) {
            if (below_is_floor)
                sigma1_req = std::max(sigma1_req, s);
            else
                sigma1_cap = std::min(sigma1_cap, s);
        } else {
            if (below_is_floor)
                sigma2_cap = std::min(sigma2_cap, s);
            else
                sigma2_req = std::max(sigma2_req, s);
        }
    }

    auto verified_prefix = [&](const PclvgParams& p) -> std::size_t {
        std::size_t n = 0;
        for (std::size_t t = 0; t < bel.tau_grid.size(); ++t) {
            bool ok = true;
            for (std::size_t k = 0; k < bel.strikes.size() && ok; ++k) {
                const double strike = bel.strikes[k];
                const double v = pclvg_iv(p, strike, bel.tau_grid[t]);
                const bool floor_here = (strike < U) == below_is_floor;
                const double bound = (strike < U ? below_f : above_f)[k][t];
                const double tol = 1e-9 * std::max(1.0, bound);
                ok = floor_here ? v >= bound - tol : v <= bound + tol;
            }
            if (!ok) break;
            ++n;
        }
        return n;
    };

    DominatingSurface best{{0, 0, U}, 0.0};
    std::size_t best_prefix = 0;
    for (double margin : {1.02, 1.1, 1.3, 1.75, 2.5, 4.0}) {
        PclvgParams p{0, 0, U};
        if (below_is_floor) {
            p.sigma1 = sigma1_req * margin * margin;
            p.sigma2 = (std::isfinite(sigma2_cap) ? sigma2_cap : 1.0) / (margin * margin);
        } else {
            p.sigma1 = (std::isfinite(sigma1_cap) ? sigma1_cap : 1.0) / (margin * margin);
            p.sigma2 = sigma2_req * margin * margin;
        }
        if (!(p.sigma1 > 0.0) || !(p.sigma2 > 0.0)) continue;
        const std::size_t n = verified_prefix(p);
        if (n > best_prefix) {
            best_prefix = n;
            best = {p, bel.tau_grid[n - 1]};
            if (n == bel.tau_grid.size()) break;
        }
    }
    if (best_prefix == 0)
        throw NotFound("find_dominating: no parameters feasible at the first grid point");
    return best;
}

PclvgParams fit_scale(double ratio, const MarketSurface& market, double barrier,
                      std::size_t put_strike_idx, double horizon) {
    if (!(ratio > 0.0)) throw Error("fit_scale: ratio must be positive");
    if (put_strike_idx >= market.strikes.size())
        throw Error("fit_scale: put strike index out of range");
    const double k_put = market.strikes[put_strike_idx];
    if (!(k_put < barrier)) throw Error("fit_scale: put strike must lie below the barrier");

    std::vector<std::size_t> taus;
    for (std::size_t t = 0; t < market.taus.size(); ++t)
        if (market.taus[t] <= horizon * (1 + 1e-12)) taus.push_back(t);
    if (taus.empty()) throw GridMismatch("fit_scale: no market maturity within the horizon");

    std::vector<std::size_t> call_idx;
    for (std::size_t k = 0; k < market.strikes.size(); ++k)
        if (market.strikes[k] > barrier) call_idx.push_back(k);
    if (call_idx.empty()) throw Error("fit_scale: no strike above the barrier");

    auto params_at = [&](double lambda) {
        return PclvgParams{lambda * lambda, ratio * lambda * lambda, barrier};
    };
    // put-wing slack, increasing in lambda
    auto put_margin = [&](double lambda) {
        const PclvgParams p = params_at(lambda);
        double worst = kInf;
        for (std::size_t t : taus) {
            const double mkt = market.iv[put_strike_idx][t];
            if (!std::isfinite(mkt)) continue;
            worst = std::min(worst, pclvg_iv(p, k_put, market.taus[t]) - mkt);
        }
        return worst;
    };

    double lo = 1e-8, hi = 1e-8;
    while (put_margin(hi) < 0.0) {
        hi *= 4.0;
        if (hi > 1e12) throw Infeasible("fit_scale: put wing cannot be dominated");
    }
    for (int it = 0; it < 100 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        (put_margin(mid) >= 0.0 ? hi : lo) = mid;
    }
    const double lambda = hi; // smallest feasible scale

    // call-wing feasibility at the chosen scale
    const PclvgParams p = params_at(lambda);
    double worst = kInf;
    std::size_t binding = call_idx.front();
    for (std::size_t k : call_idx)
        for (std::size_t t : taus) {
            const double mkt = market.iv[k][t];
            if (!std::isfinite(mkt)) continue;
            const double slack = mkt - pclvg_iv(p, market.strikes[k], market.taus[t]);
            if (slack < worst) {
                worst = slack;
                binding = k;
            }
        }
    if (worst < -1e-9)
        throw Infeasible("fit_scale: call wing violated at strike " +
                         std::to_string(market.strikes[binding]));
    return p;
}

void save_beliefs_json(const Beliefs& bel, const std::filesystem::path& path) {
    nlohmann::json j;
    j["barrier"] = bel.barrier;
    j["side"] = bel.side == BeliefSide::Lower ? "lower" : "upper";
    j["horizon"] = bel.horizon;
    j["tau_grid"] = bel.tau_grid;
    j["strikes"] = bel.strikes;
    j["a"] = bel.a;
    j["b"] = bel.b;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write beliefs json: " + path.string());
    out << j.dump(2) << '\n';
}

Beliefs load_beliefs_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open beliefs json: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        Beliefs bel;
        bel.barrier = j.at("barrier").get<double>();
        bel.side = j.at("side").get<std::string>() == "lower" ? BeliefSide::Lower
                                                              : BeliefSide::Upper;
        bel.horizon = j.at("horizon").get<double>();
        bel.tau_grid = j.at("tau_grid").get<std::vector<double>>();
        bel.strikes = j.at("strikes").get<std::vector<double>>();
        bel.a = j.at("a").get<std::vector<std::vector<double>>>();
        bel.b = j.at("b").get<std::vector<std::vector<double>>>();
        return bel;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("beliefs json " + path.string() + ": " + e.what());
    }
}

} // namespace skew
