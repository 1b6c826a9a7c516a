#include <skew/surface.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace skew {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_num(const std::string& cell, const char* what, int line_no) {
    const std::string t = trim(cell);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    auto [p, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc{} || p != end)
        throw SchemaError("chain csv line " + std::to_string(line_no) + ": bad " + what +
                          " '" + cell + "'");
    return v;
}

long parse_long(const std::string& cell, const char* what, int line_no) {
    const std::string t = trim(cell);
    long v = 0;
    const auto* end = t.data() + t.size();
    auto [p, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc{} || p != end)
        throw SchemaError("chain csv line " + std::to_string(line_no) + ": bad " + what +
                          " '" + cell + "'");
    return v;
}

} // namespace

Date Date::parse(const std::string& iso) {
    const std::string t = trim(iso);
    int y = 0, m = 0, d = 0;
    if (std::sscanf(t.c_str(), "%d-%d-%d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
        d > 31)
        throw SchemaError("bad ISO date '" + iso + "'");
    return {y, m, d};
}

std::string Date::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

long Date::serial() const {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{unsigned(month)},
                             std::chrono::day{unsigned(day)}};
    return sys_days{ymd}.time_since_epoch().count();
}

double year_frac_act365(const Date& from, const Date& to) {
    return static_cast<double>(to.serial() - from.serial()) / 365.0;
}

Curve::Curve(std::vector<double> taus, std::vector<double> values)
    : taus_(std::move(taus)), values_(std::move(values)) {
    if (taus_.size() != values_.size() || taus_.empty())
        throw Error("Curve: knots and values must be nonempty and aligned");
    if (!std::is_sorted(taus_.begin(), taus_.end()))
        throw Error("Curve: knots must be sorted");
}

double Curve::operator()(double tau) const {
    if (flat_) return *flat_;
    constexpr double eps = 1e-12;
    if (tau < taus_.front() - eps || tau > taus_.back() + eps)
        throw CurveDomainError("Curve: tau outside the knot range");
    if (tau <= taus_.front()) return values_.front();
    if (tau >= taus_.back()) return values_.back();
    const auto it = std::upper_bound(taus_.begin(), taus_.end(), tau);
    const std::size_t hi = static_cast<std::size_t>(it - taus_.begin());
    const std::size_t lo = hi - 1;
    const double w = (tau - taus_[lo]) / (taus_[hi] - taus_[lo]);
    return values_[lo] + w * (values_[hi] - values_[lo]);
}

std::vector<RawQuote> read_chain_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open chain csv: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty chain csv: " + path.string());
    const auto header = split_csv_line(trim(line));
    const std::vector<std::string> expected = {"date", "expiry",        "strike",
                                               "kind", "bid",           "ask",
                                               "open_interest", "underlying",
                                               "rate", "div_yield"};
    if (header.size() != expected.size())
        throw SchemaError("chain csv header has " + std::to_string(header.size()) +
                          " columns, expected 10");
    for (std::size_t i = 0; i < expected.size(); ++i)
        if (trim(header[i]) != expected[i])
            throw SchemaError("chain csv header column " + std::to_string(i + 1) +
                              " is '" + header[i] + "', expected '" + expected[i] + "'");

    std::vector<RawQuote> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 10)
            throw SchemaError("chain csv line " + std::to_string(line_no) + ": expected 10 cells, got " +
                              std::to_string(cells.size()));
        RawQuote q;
        q.date = Date::parse(cells[0]);
        q.expiry = Date::parse(cells[1]);
        q.strike = parse_num(cells[2], "strike", line_no);
        const std::string kind = trim(cells[3]);
        if (kind == "C")
            q.kind = OptionKind::Call;
        else if (kind == "P")
            q.kind = OptionKind::Put;
        else
            throw SchemaError("chain csv line " + std::to_string(line_no) + ": kind must be C or P");
        if (!trim(cells[4]).empty()) q.bid = parse_num(cells[4], "bid", line_no);
        if (!trim(cells[5]).empty()) q.ask = parse_num(cells[5], "ask", line_no);
        q.open_interest = parse_long(cells[6], "open_interest", line_no);
        q.underlying = parse_num(cells[7], "underlying", line_no);
        q.rate = parse_num(cells[8], "rate", line_no);
        q.div_yield = parse_num(cells[9], "div_yield", line_no);
        rows.push_back(q);
    }
    return rows;
}

std::vector<ZeroCarryQuote> normalize_carry(const std::vector<RawQuote>& quotes,
                                            const Curve& rates, const Curve& dividends) {
    std::vector<ZeroCarryQuote> out;
    out.reserve(quotes.size());
    for (const auto& q : quotes) {
        if (!q.bid || !q.ask) continue;
        const double tau = year_frac_act365(q.date, q.expiry);
        if (!(tau > 0.0)) continue;
        const double r = rates(tau);
        const double dy = dividends(tau);
        ZeroCarryQuote z;
        z.raw_strike = q.strike;
        z.strike = q.strike * std::exp(-r * tau);
        z.spot = q.underlying * std::exp(-dy * tau);
        z.tau = tau;
        z.mid = 0.5 * (*q.bid + *q.ask);
        z.kind = q.kind;
        out.push_back(z);
    }
    return out;
}

MarketSurface build_surface(const std::vector<RawQuote>& rows, const ChainConfig& cfg) {
    if (rows.empty()) throw EmptySurface("build_surface: no rows");
    const Date date = rows.front().date;

    // usable rows: both sides quoted, positive open interest, live expiry
    std::vector<RawQuote> usable;
    for (const auto& q : rows) {
        if (q.date != date)
            throw SchemaError("build_surface: rows span several observation dates");
        if (!q.bid || !q.ask) continue;
        if (q.open_interest <= 0) continue;
        if (year_frac_act365(q.date, q.expiry) <= 0.0) continue;
        usable.push_back(q);
    }
    if (usable.empty())
        throw EmptySurface("build_surface: no usable quotes on " + date.str());

    // the per-row carry data is the curve, sampled exactly at the needed taus
    std::map<double, double> rate_knots, div_knots;
    for (const auto& q : usable) {
        const double tau = year_frac_act365(q.date, q.expiry);
        rate_knots[tau] = q.rate;
        div_knots[tau] = q.div_yield;
    }
    auto to_curve = [](const std::map<double, double>& knots) {
        std::vector<double> t, v;
        for (auto& [tau, x] : knots) {
            t.push_back(tau);
            v.push_back(x);
        }
        return Curve(std::move(t), std::move(v));
    };
    auto zq = normalize_carry(usable, to_curve(rate_knots), to_curve(div_knots));

    // keep the front maturities
    std::set<double> tau_set;
    for (const auto& z : zq) tau_set.insert(z.tau);
    std::vector<double> taus(tau_set.begin(), tau_set.end());
    if (cfg.keep_front_maturities > 0 &&
        taus.size() > static_cast<std::size_t>(cfg.keep_front_maturities))
        taus.resize(static_cast<std::size_t>(cfg.keep_front_maturities));

    // OTM only, implied vols quote by quote
    struct Cell {
        double iv_sum = 0.0;
        int n = 0;
    };
    std::map<std::pair<double, double>, Cell> cells; // (raw strike, tau)
    double spot_raw = usable.front().underlying;
    for (const auto& z : zq) {
        if (std::find(taus.begin(), taus.end(), z.tau) == taus.end()) continue;
        const bool otm = z.kind == OptionKind::Call ? z.strike >= z.spot : z.strike < z.spot;
        if (!otm) continue;
        double iv;
        try {
            iv = implied_vol(z.mid, z.spot, z.strike, z.tau, z.kind);
        } catch (const Error&) {
            continue; // unusable quote (outside band / no inversion)
        }
        auto& c = cells[{z.raw_strike, z.tau}];
        c.iv_sum += iv;
        c.n += 1;
    }
    if (cells.empty())
        throw EmptySurface("build_surface: no OTM quote converted on " + date.str());

    std::set<double> strike_set;
    for (const auto& [key, c] : cells) strike_set.insert(key.first);
    std::vector<double> strikes(strike_set.begin(), strike_set.end());
    if (strikes.size() < 2)
        throw EmptySurface("build_surface: fewer than two strikes on " + date.str());

    MarketSurface s;
    s.observation_date = date;
    s.spot = spot_raw;
    s.strikes = strikes;
    s.taus = taus;
    s.iv.assign(strikes.size(), std::vector<double>(taus.size(), kNaN));
    s.quality.assign(strikes.size(),
                     std::vector<CellQuality>(taus.size(), CellQuality::Missing));
    for (std::size_t k = 0; k < strikes.size(); ++k)
        for (std::size_t t = 0; t < taus.size(); ++t) {
            const auto it = cells.find({strikes[k], taus[t]});
            if (it == cells.end()) continue;
            s.iv[k][t] = it->second.iv_sum / it->second.n;
            s.quality[k][t] = CellQuality::Observed;
        }
    return s;
}

MarketSurface load_chain(const std::filesystem::path& path, const ChainConfig& cfg) {
    const auto rows = read_chain_csv(path);
    if (rows.empty()) throw EmptySurface("load_chain: no rows in " + path.string());
    return build_surface(rows, cfg);
}

std::vector<MarketSurface> load_chain_dataset(const std::filesystem::path& path,
                                              const ChainConfig& cfg) {
    const auto rows = read_chain_csv(path);
    std::map<long, std::vector<RawQuote>> by_date;
    for (const auto& q : rows) by_date[q.date.serial()].push_back(q);
    std::vector<MarketSurface> out;
    for (auto& [serial, group] : by_date) {
        try {
            out.push_back(build_surface(group, cfg));
        } catch (const EmptySurface&) {
            // dates without usable quotes are skipped
        }
    }
    if (out.empty()) throw EmptySurface("load_chain_dataset: no usable dates");
    return out;
}

AdmissibilityReport validate_admissible(const MarketSurface& s,
                                        const AdmissibilityConfig& cfg) {
    AdmissibilityReport rep;
    auto flag = [&](int cond, int k, int t, double mag) {
        rep.violations.push_back({cond, k, t, mag});
    };
    const double slack = cfg.price_slack_rel * s.spot;
    const std::size_t n_k = s.strikes.size();
    const std::size_t n_t = s.taus.size();

    auto call_price = [&](std::size_t k, std::size_t t) {
        return bs_price(s.spot, s.strikes[k], s.taus[t], s.iv[k][t], OptionKind::Call);
    };

    // condition 1: short-term limit proxy per strike
    for (std::size_t k = 0; k < n_k; ++k) {
        std::vector<std::size_t> ts;
        for (std::size_t t = 0; t < n_t && ts.size() < 2; ++t)
            if (s.observed(k, t)) ts.push_back(t);
        if (ts.empty()) continue;
        const double front = s.iv[k][ts[0]];
        if (!(front > 0.0) || !std::isfinite(front)) {
            flag(1, static_cast<int>(k), static_cast<int>(ts[0]),
                 std::isfinite(front) ? -front : 1.0);
            continue;
        }
        if (ts.size() == 2) {
            const double next = s.iv[k][ts[1]];
            const double dev = std::abs(front / next - 1.0);
            if (dev > cfg.short_term_band)
                flag(1, static_cast<int>(k), static_cast<int>(ts[0]),
                     dev - cfg.short_term_band);
        }
    }

    for (std::size_t t = 0; t < n_t; ++t) {
        // condition 2: calls nonincreasing in strike
        for (std::size_t k = 0; k + 1 < n_k; ++k) {
            if (!s.observed(k, t) || !s.observed(k + 1, t)) continue;
            const double lo = call_price(k, t), hi = call_price(k + 1, t);
            if (hi > lo + slack) flag(2, static_cast<int>(k + 1), static_cast<int>(t), hi - lo);
        }
        // condition 4: discrete convexity in strike, with K0 = 0 and C(0) = spot
        for (std::size_t k = 0; k + 1 < n_k; ++k) {
            if (!s.observed(k, t) || !s.observed(k + 1, t)) continue;
            double c_prev, k_prev;
            if (k == 0) {
                c_prev = s.spot;
                k_prev = 0.0;
            } else {
                if (!s.observed(k - 1, t)) continue;
                c_prev = call_price(k - 1, t);
                k_prev = s.strikes[k - 1];
            }
            const double left =
                (call_price(k, t) - c_prev) / (s.strikes[k] - k_prev);
            const double right =
                (call_price(k + 1, t) - call_price(k, t)) / (s.strikes[k + 1] - s.strikes[k]);
            if (right < left - cfg.price_slack_rel)
                flag(4, static_cast<int>(k), static_cast<int>(t), left - right);
        }
    }

    // condition 3: calls nondecreasing in maturity
    for (std::size_t k = 0; k < n_k; ++k)
        for (std::size_t t = 0; t + 1 < n_t; ++t) {
            if (!s.observed(k, t) || !s.observed(k, t + 1)) continue;
            const double now = call_price(k, t), later = call_price(k, t + 1);
            if (now > later + slack) flag(3, static_cast<int>(k), static_cast<int>(t), now - later);
        }

    rep.passed = rep.violations.empty();
    return rep;
}

double iv_at(const MarketSurface& s, double strike, double tau) {
    if (s.strikes.empty() || s.taus.empty()) throw OutOfDomain("iv_at: empty surface");
    constexpr double eps = 1e-9;
    if (strike < s.strikes.front() * (1 - eps) || strike > s.strikes.back() * (1 + eps))
        throw OutOfDomain("iv_at: strike outside grid");
    if (tau < s.taus.front() * (1 - eps) || tau > s.taus.back() * (1 + eps))
        throw OutOfDomain("iv_at: tau outside grid");

    auto bracket = [](const std::vector<double>& xs, double x) {
        if (x <= xs.front()) return std::pair<std::size_t, std::size_t>{0, 0};
        if (x >= xs.back())
            return std::pair<std::size_t, std::size_t>{xs.size() - 1, xs.size() - 1};
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
        return std::pair<std::size_t, std::size_t>{hi - 1, hi};
    };

    const auto [k0, k1] = bracket(s.strikes, strike);
    const auto [t0, t1] = bracket(s.taus, tau);

    auto vol_node = [&](std::size_t k, std::size_t t) {
        if (!s.observed(k, t)) throw OutOfDomain("iv_at: missing cell in the stencil");
        return s.iv[k][t];
    };
    // linear in strike on the vol at fixed tau
    auto vol_in_strike = [&](std::size_t t) {
        if (k0 == k1) return vol_node(k0, t);
        const double w = (strike - s.strikes[k0]) / (s.strikes[k1] - s.strikes[k0]);
        return vol_node(k0, t) + w * (vol_node(k1, t) - vol_node(k0, t));
    };
    const double v_lo = vol_in_strike(t0);
    if (t0 == t1) return v_lo;
    const double v_hi = vol_in_strike(t1);
    // linear in tau on total variance
    const double w_lo = v_lo * v_lo * s.taus[t0];
    const double w_hi = v_hi * v_hi * s.taus[t1];
    const double w = (tau - s.taus[t0]) / (s.taus[t1] - s.taus[t0]);
    const double tv = w_lo + w * (w_hi - w_lo);
    return std::sqrt(std::max(tv, 0.0) / tau);
}

} // namespace skew
