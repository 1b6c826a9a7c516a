#include <skew/beliefs.hpp>

#include <skew/synthetic.hpp>

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace skew;

namespace {

const std::vector<double> kStrikes{0.85, 0.92, 1.08, 1.2};
const std::vector<double> kTaus{0.01, 0.05, 0.1, 0.2};

} // namespace

TEST_CASE("generated_beliefs: bound functions carry the model vols") {
    const PclvgParams gen{0.6, 0.36, 1.0};
    const auto bel = generated_beliefs(gen, kStrikes, kTaus, BeliefSide::Lower);
    CHECK(bel.horizon == kTaus.back());
    for (std::size_t k = 0; k < kStrikes.size(); ++k)
        for (std::size_t t = 0; t < kTaus.size(); ++t) {
            const double v = pclvg_iv(gen, kStrikes[k], kTaus[t]);
            CHECK(bel.a[k][t] == v);
            CHECK(bel.b[k][t] == v);
        }
    CHECK_THROWS_AS(
        (void)generated_beliefs(gen, {0.9, 1.0, 1.1}, kTaus, BeliefSide::Lower),
        BarrierOnStrike);
}

TEST_CASE("check_membership: the generator is a member with c near one") {
    const PclvgParams gen{0.6, 0.36, 1.0};
    const auto surf = pclvg_surface(gen, kStrikes, kTaus);
    for (BeliefSide side : {BeliefSide::Lower, BeliefSide::Upper}) {
        const auto bel = generated_beliefs(gen, kStrikes, kTaus, side);
        MembershipDiag diag;
        const auto c = check_membership(surf, bel, &diag);
        REQUIRE(c.has_value());
        CHECK(*c == doctest::Approx(1.0).epsilon(0.02));
        CHECK(diag.margin >= -1e-9);
    }
}

TEST_CASE("check_membership: the scaling law identifies c = 2") {
    const PclvgParams gen{0.6, 0.36, 1.0};
    // vol doubled with tau compressed by four = the model at 4x variance;
    // the bound grid must reach 4x the surface maturities so c^2 tau stays
    // on the sampled range
    std::vector<double> wide = kTaus;
    for (double t : kTaus) wide.push_back(4.0 * t);
    std::sort(wide.begin(), wide.end());
    const PclvgParams scaled{4.0 * 0.6, 4.0 * 0.36, 1.0};
    const auto surf = pclvg_surface(scaled, kStrikes, kTaus);
    const auto bel = generated_beliefs(gen, kStrikes, wide, BeliefSide::Lower);
    const auto c = check_membership(surf, bel);
    REQUIRE(c.has_value());
    CHECK(*c == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("check_membership: a low-skew surface is rejected by lower beliefs") {
    const PclvgParams gen{0.6, 0.9, 1.0}; // generator ratio 1.5
    const auto bel = generated_beliefs(gen, kStrikes, kTaus, BeliefSide::Lower);
    // matched put wing, call wing far below what any scaling can lift
    const PclvgParams low_skew{0.6, 0.06, 1.0};
    const auto surf = pclvg_surface(low_skew, kStrikes, kTaus);
    CHECK_FALSE(check_membership(surf, bel).has_value());
}

TEST_CASE("check_membership: grid mismatch is detected") {
    const PclvgParams gen{0.6, 0.36, 1.0};
    const auto bel = generated_beliefs(gen, kStrikes, kTaus, BeliefSide::Lower);
    const auto surf = pclvg_surface(gen, {0.8, 1.1}, kTaus); // missing belief strikes
    CHECK_THROWS_AS((void)check_membership(surf, bel), GridMismatch);
}

TEST_CASE("beliefs are invariant under the scaling of their input functions") {
    const PclvgParams gen{0.6, 0.36, 1.0};
    const auto bel = generated_beliefs(gen, kStrikes, kTaus, BeliefSide::Lower);

    // resample {c a(c^2 .), c b(c^2 .)} exactly on the compressed grid
    auto rescale = [&](double c) {
        Beliefs out = bel;
        for (auto& tau : out.tau_grid) tau /= c * c;
        out.horizon /= c * c;
        for (auto& row : out.a)
            for (auto& v : row) v *= c;
        for (auto& row : out.b)
            for (auto& v : row) v *= c;
        return out;
    };

    const auto member = pclvg_surface(PclvgParams{0.7, 0.5, 1.0}, kStrikes, kTaus);
    const auto outsider = pclvg_surface(PclvgParams{0.6, 0.06, 1.0}, kStrikes, kTaus);
    for (double c : {0.5, 2.0}) {
        const auto scaled = rescale(c);
        // the member taus must stay within the compressed horizon
        auto member_c = member, outsider_c = outsider;
        const auto in_member = check_membership(member, bel).has_value();
        const auto in_outsider = check_membership(outsider, bel).has_value();
        if (scaled.horizon >= member.taus.back()) {
            CHECK(check_membership(member, scaled).has_value() == in_member);
            CHECK(check_membership(outsider, scaled).has_value() == in_outsider);
        }
    }
}

TEST_CASE("widening the bound functions only grows the accepted set") {
    const PclvgParams gen{0.6, 0.48, 1.0};
    const auto bel = generated_beliefs(gen, kStrikes, kTaus, BeliefSide::Lower);
    Beliefs widened = bel;
    for (std::size_t k = 0; k < kStrikes.size(); ++k)
        for (auto& v : (kStrikes[k] > 1.0 ? widened.a[k] : widened.b[k]))
            v *= kStrikes[k] > 1.0 ? 0.8 : 1.25; // a down, b up

    const auto member = pclvg_surface(gen, kStrikes, kTaus);
    MembershipDiag before, after;
    REQUIRE(check_membership(member, bel, &before).has_value());
    REQUIRE(check_membership(member, widened, &after).has_value());
    CHECK(after.margin >= before.margin - 1e-12);
}

TEST_CASE("find_dominating: the generator's beliefs dominate themselves") {
    const PclvgParams gen{0.6, 0.36, 1.0};
    const auto bel = generated_beliefs(gen, kStrikes, kTaus, BeliefSide::Lower);
    const auto dom = find_dominating(bel, BeliefSide::Lower);
    CHECK(dom.horizon > 0.0);

    // inequalities hold on the verified prefix; the search margin keeps the
    // surface within a small factor of the bounds at the shortest maturity
    for (std::size_t k = 0; k < kStrikes.size(); ++k) {
        const double v = pclvg_iv(dom.params, kStrikes[k], kTaus.front());
        const double bound = bel.a[k][0]; // == bel.b[k][0]
        if (kStrikes[k] < 1.0) {
            CHECK(v >= bound * (1 - 1e-9));
            CHECK(v <= bound * 3.0);
        } else {
            CHECK(v <= bound * (1 + 1e-9));
            CHECK(v >= bound / 3.0);
        }
    }
}

TEST_CASE("find_dominating: the upper direction raises the skew ratio") {
    const PclvgParams gen{0.6, 0.36, 1.0};
    const auto bel = generated_beliefs(gen, kStrikes, kTaus, BeliefSide::Upper);
    const auto dom = find_dominating(bel, BeliefSide::Upper);
    CHECK(dom.params.skew_ratio() >= gen.skew_ratio() * (1 - 1e-9));
}

TEST_CASE("find_dominating: flat bounds around the barrier") {
    Beliefs bel;
    bel.barrier = 1.0;
    bel.strikes = {0.9, 1.1};
    bel.tau_grid = {0.001, 0.005};
    bel.horizon = 0.005;
    bel.side = BeliefSide::Lower;
    bel.a = {{0.15, 0.15}, {0.15, 0.15}};
    bel.b = {{0.25, 0.25}, {0.25, 0.25}};
    const auto dom = find_dominating(bel, BeliefSide::Lower);
    // short-maturity wing limits certify the construction
    CHECK(short_term_iv_limit(dom.params, 0.9) >= 0.25);
    CHECK(short_term_iv_limit(dom.params, 1.1) <= 0.15);
}

TEST_CASE("find_dominating: infeasible at the first grid point") {
    Beliefs bel;
    bel.barrier = 1.0;
    bel.strikes = {0.9, 1.1};
    bel.tau_grid = {5.0};
    bel.horizon = 5.0;
    bel.side = BeliefSide::Upper;
    // below must stay under 1e-4 while above exceeds 3: at tau = 5 the
    // needed sigma2 floods the whole smile
    bel.a = {{1e-4}, {1e-4}};
    bel.b = {{3.0}, {3.0}};
    CHECK_THROWS_AS((void)find_dominating(bel, BeliefSide::Upper), NotFound);
}

TEST_CASE("fit_scale: equality at the generator, scaling oracle at sigma/4") {
    const std::vector<double> strikes{0.85, 0.92, 1.08, 1.2};
    const std::vector<double> taus{0.02, 0.06, 0.15};
    const PclvgParams gen{0.8, 0.48, 1.0};
    const auto market = pclvg_surface(gen, strikes, taus);

    const auto fit = fit_scale(gen.skew_ratio(), market, 1.0, 0, taus.back());
    CHECK(fit.sigma1 == doctest::Approx(0.8).epsilon(1e-4));
    CHECK(fit.sigma2 / fit.sigma1 == doctest::Approx(0.6).epsilon(1e-12));

    // market generated at sigma/4: vols are halved with tau compressed by
    // four, so the smallest dominating scale is a quarter of the level
    const auto market_q = pclvg_surface(PclvgParams{0.2, 0.12, 1.0}, strikes, taus);
    const auto fit_q = fit_scale(0.6, market_q, 1.0, 0, taus.back());
    CHECK(fit_q.sigma1 == doctest::Approx(0.2).epsilon(1e-4));
}

TEST_CASE("fit_scale: a steep market skew is infeasible and names the strike") {
    const std::vector<double> strikes{0.85, 0.92, 1.08, 1.2};
    const std::vector<double> taus{0.02, 0.06};
    // market call wing far below anything a 0.6-ratio model can slide under
    const auto market = pclvg_surface(PclvgParams{0.8, 0.04, 1.0}, strikes, taus);
    CHECK_THROWS_WITH_AS((void)fit_scale(0.6, market, 1.0, 0, taus.back()),
                         doctest::Contains("strike"), Infeasible);
}

TEST_CASE("beliefs JSON round trip") {
    const PclvgParams gen{0.6, 0.36, 1.0};
    const auto bel = generated_beliefs(gen, kStrikes, kTaus, BeliefSide::Upper);
    const auto path = std::filesystem::temp_directory_path() / "beliefs_rt.json";
    save_beliefs_json(bel, path);
    const auto back = load_beliefs_json(path);
    CHECK(back.barrier == bel.barrier);
    CHECK(back.side == bel.side);
    CHECK(back.horizon == bel.horizon);
    CHECK(back.strikes == bel.strikes);
    CHECK(back.tau_grid == bel.tau_grid);
    CHECK(back.a == bel.a);
    CHECK(back.b == bel.b);
}
