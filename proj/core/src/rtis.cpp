#include <skew/rtis.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace skew {

namespace {

double reflected(double barrier, double k_put, double kappa) {
    return barrier + (barrier - k_put) * kappa;
}

void require_put_strike(std::size_t i, double barrier, std::span<const double> strikes) {
    if (i >= strikes.size()) throw Error("rtis: strike index out of range");
    if (!(strikes[i] < barrier))
        throw Error("rtis: the put strike must lie below the barrier");
}

constexpr double kGridTolRel = 1e-9; // "on the grid" comparisons

} // namespace

std::size_t underline_j(std::size_t i, double kappa, double barrier,
                        std::span<const double> strikes) {
    require_put_strike(i, barrier, strikes);
    const double kr = reflected(barrier, strikes[i], kappa);
    const double tol = kGridTolRel * barrier;
    std::size_t best = strikes.size();
    for (std::size_t j = 0; j < strikes.size(); ++j)
        if (strikes[j] > barrier && strikes[j] <= kr + tol) best = j;
    if (best == strikes.size())
        throw NoEligibleStrike("underline_j: no strike in (U, reflected strike]");
    return best;
}

std::size_t overline_j(std::size_t i, double kappa, double barrier,
                       std::span<const double> strikes) {
    require_put_strike(i, barrier, strikes);
    const double kr = reflected(barrier, strikes[i], kappa);
    const double tol = kGridTolRel * barrier;
    for (std::size_t j = 0; j < strikes.size(); ++j)
        if (strikes[j] >= kr - tol) return j;
    throw NoEligibleStrike("overline_j: no strike at or above the reflected strike");
}

Portfolio build_rtis_low(std::size_t i, double kappa_star, double barrier,
                         std::span<const double> strikes, double tau) {
    const std::size_t j = underline_j(i, kappa_star, barrier, strikes);
    Portfolio port;
    port.legs = {{LegKind::Call, strikes[j], tau, +1.0},
                 {LegKind::Put, strikes[i], tau, -1.0}};
    return port;
}

Portfolio build_rtis_high(std::size_t i, double kappa_upper, double barrier,
                          std::span<const double> strikes, double tau) {
    const std::size_t j = overline_j(i, kappa_upper, barrier, strikes);
    Portfolio port;
    port.legs = {{LegKind::Put, strikes[i], tau, +1.0},
                 {LegKind::Call, strikes[j], tau, -strikes[i] / barrier}};
    return port;
}

Portfolio with_put_dollar_normalization(Portfolio port, const MarketSurface& surf) {
    const auto it = std::find_if(port.legs.begin(), port.legs.end(),
                                 [](const Leg& l) { return l.kind == LegKind::Put; });
    if (it == port.legs.end())
        throw Error("with_put_dollar_normalization: portfolio has no put leg");
    const double put_price =
        bs_price(surf.spot, it->strike, it->tau, iv_at(surf, it->strike, it->tau),
                 OptionKind::Put);
    const double scale = std::abs(it->weight) * put_price;
    if (!(scale > 0.0))
        throw Error("with_put_dollar_normalization: put leg has zero value");
    for (auto& l : port.legs) l.weight /= scale;
    port.normalization = Normalization::PutDollarOne;
    return port;
}

double price_portfolio(const Portfolio& port, const MarketSurface& surf) {
    if (port.legs.empty()) throw Error("price_portfolio: empty portfolio");
    double value = 0.0;
    for (const auto& l : port.legs) {
        if (l.weight == 0.0) continue;
        if (l.kind == LegKind::Forward) {
            value += l.weight * (surf.spot - l.strike);
            continue;
        }
        const double vol = iv_at(surf, l.strike, l.tau);
        const double px = bs_price(surf.spot, l.strike, l.tau, vol,
                                   l.kind == LegKind::Call ? OptionKind::Call
                                                           : OptionKind::Put);
        value += l.weight * px;
    }
    return value;
}

std::size_t nearest_strike_index(double target, std::span<const double> strikes) {
    if (strikes.empty()) throw Error("nearest_strike_index: empty grid");
    std::size_t best = 0;
    double best_d = std::abs(strikes[0] - target);
    for (std::size_t k = 1; k < strikes.size(); ++k) {
        const double d = std::abs(strikes[k] - target);
        // ties go to the lower strike, so strictly smaller distance to move up
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

AuditVerdict minimality_audit(double alpha, double beta, std::size_t i, std::size_t j,
                              double kappa_star, double kappa_upper, double barrier,
                              std::span<const double> strikes) {
    require_put_strike(i, barrier, strikes);
    if (j >= strikes.size() || !(strikes[j] > barrier))
        throw Error("minimality_audit: K_j must lie above the barrier");
    if (!(kappa_upper > 0.0) || !(kappa_upper < kappa_star))
        throw Error("minimality_audit: need 0 < kappa_upper < kappa_star");

    const std::size_t ju = underline_j(i, kappa_star, barrier, strikes);
    const double kr = reflected(barrier, strikes[i], kappa_star);
    if (std::abs(strikes[ju] - kr) > kGridTolRel * barrier)
        throw Error("minimality_audit: reflected strike must sit on the grid");

    if (alpha < 0.0 || beta > 0.0) return {false, "wrong-side weights"};
    if (beta == 0.0) return {false, "beta zero: the negative-price property fails"};
    if (strikes[j] > strikes[ju] + kGridTolRel * barrier)
        return {false, "call strike above the reflected strike"};
    if (strikes[j] < strikes[ju] - kGridTolRel * barrier)
        return {false, "call strike below the reflected strike"};
    if (alpha < -beta)
        return {false, "alpha below -beta at the equality strike"};
    return {true, ""};
}

void save_portfolio_json(const Portfolio& port, const std::filesystem::path& path) {
    nlohmann::json j;
    j["normalization"] =
        port.normalization == Normalization::PutDollarOne ? "put_dollar_one" : "raw";
    j["legs"] = nlohmann::json::array();
    for (const auto& l : port.legs) {
        const char* kind = l.kind == LegKind::Call  ? "call"
                           : l.kind == LegKind::Put ? "put"
                                                    : "forward";
        j["legs"].push_back(
            {{"kind", kind}, {"strike", l.strike}, {"tau", l.tau}, {"weight", l.weight}});
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write portfolio json: " + path.string());
    out << j.dump(2) << '\n';
}

Portfolio load_portfolio_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open portfolio json: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        Portfolio port;
        port.normalization = j.at("normalization").get<std::string>() == "put_dollar_one"
                                 ? Normalization::PutDollarOne
                                 : Normalization::Raw;
        for (const auto& lj : j.at("legs")) {
            Leg l;
            const std::string kind = lj.at("kind").get<std::string>();
            l.kind = kind == "call"  ? LegKind::Call
                     : kind == "put" ? LegKind::Put
                                     : LegKind::Forward;
            l.strike = lj.at("strike").get<double>();
            l.tau = lj.at("tau").get<double>();
            l.weight = lj.at("weight").get<double>();
            port.legs.push_back(l);
        }
        return port;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("portfolio json " + path.string() + ": " + e.what());
    }
}

} // namespace skew
