#include <doctest.h>

#include <cmath>

#include "ctfl/errors.hpp"
#include "ctfl/experiments.hpp"
#include "support/oracles.hpp"

using namespace ctfl;

TEST_CASE("radius schedules") {
    CHECK(RadiusSchedule::power_half().rho(3, 4) == doctest::Approx(9.0));
    CHECK(RadiusSchedule::power_half(2.0).rho(4, 3) == doctest::Approx(16.0));
    CHECK_THROWS_AS(RadiusSchedule::power_half(2.0).rho(4, 0), ValidationError);
    const auto capped = RadiusSchedule::capped({1.0, 2.0, 9.0});
    CHECK(capped.rho(3, 2) == 9.0);
    CHECK_THROWS_AS(RadiusSchedule::capped({1.0, 4.0}).rho(3, 1), ValidationError);
    const IndexedCantorSpec levels({CantorSpec(4, {0}), CantorSpec(9, {0})});
    CHECK(RadiusSchedule::indexed_sqrt(0.5).rho(levels) == doctest::Approx(3.0));
}

TEST_CASE("fixed sweep rows") {
    const CantorSpec mid(3, {0, 2});
    const auto rows = sweep_fixed(mid, RadiusSchedule::power_half(), 6);
    REQUIRE(rows.size() == 7);
    CHECK(rows[0].norm == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-14));
    for (const auto& r : rows) {
        CHECK(r.norm_source == "scan");
        CHECK(r.norm <= 2 * r.lambda0_canonical + 1e-10);
        CHECK(std::isfinite(r.scaled_norm));
        CHECK(r.thm32_ratio > 0);
        const double d = std::log(2.0) / std::log(3.0);
        const double want = r.norm * std::pow(1.5, r.n) * std::pow(r.rho, d - 1);
        CHECK(r.scaled_norm == doctest::Approx(want).epsilon(1e-12));
        const double ratio =
            std::pow(r.rho + 1, d) / (std::pow(2.0, r.n) * -std::expm1(-r.rho * std::pow(3.0, -r.n))) * r.norm;
        CHECK(r.thm32_ratio == doctest::Approx(ratio).epsilon(1e-12));
    }
}

TEST_CASE("fixed sweep past the cap falls back to lambda0") {
    const CantorSpec canon(3, {0, 1});
    SweepOptions small;
    small.cap = 20;
    const auto capped = sweep_fixed(canon, RadiusSchedule::power_half(), 6, small);
    const auto full = sweep_fixed(canon, RadiusSchedule::power_half(), 6);
    for (std::size_t i = 0; i < capped.size(); ++i) {
        CHECK(capped[i].norm_source == (capped[i].n <= 4 ? "scan" : "lambda0"));
        CHECK(capped[i].norm == doctest::Approx(full[i].norm).epsilon(1e-12));
    }
}

TEST_CASE("reverse counterexample preconditions") {
    CHECK_THROWS_AS(sweep_reverse_counterexample(3, 0, RadiusSchedule::power_half(), 4), ValidationError);
    CHECK_THROWS_AS(sweep_reverse_counterexample(3, 3, RadiusSchedule::power_half(), 4), ValidationError);
    SweepOptions small;
    small.cap = 100;
    CHECK_THROWS_AS(sweep_reverse_counterexample(3, 2, RadiusSchedule::power_half(), 8, small), CapExceeded);
}

TEST_CASE("reverse counterexample ratios") {
    const auto rows = sweep_reverse_counterexample(4, 2, RadiusSchedule::power_half(), 10);
    REQUIRE(rows.size() == 11);
    for (const auto& r : rows) {
        CHECK(r.ratio > 0);
        CHECK(r.ratio == doctest::Approx(r.norm_reverse / r.norm_canonical));
    }
    CHECK(rows[10].ratio < rows[2].ratio / 2);
    // M=3 decays more slowly: halving from n=2 needs n=11.
    const auto slow = sweep_reverse_counterexample(3, 2, RadiusSchedule::power_half(), 11);
    for (int n = 3; n <= 11; ++n) CHECK(slow[n].ratio < slow[n - 1].ratio);
    CHECK(slow[10].ratio > slow[2].ratio / 2);
    CHECK(slow[11].ratio < slow[2].ratio / 2);
}

TEST_CASE("indexed decay with constant levels reduces to the fixed base") {
    IndexedDecayParams params;
    params.base = 5;
    params.n_max = 8;
    const CantorSpec level(5, {0, 1, 2});
    const auto res = sweep_indexed_decay(params, [&](int, std::mt19937_64&) { return level; });
    for (const auto& row : res.rows) {
        CHECK(row.rho == doctest::Approx(std::pow(5.0, row.n / 2.0)));
        CHECK(row.lambda0 == doctest::Approx(lambda0_closed_form(level, row.n, row.rho)).epsilon(1e-13));
    }
}

TEST_CASE("indexed decay recursion and fit") {
    IndexedDecayParams params;
    const auto a = sweep_indexed_decay(params);
    const auto b = sweep_indexed_decay(params);
    CHECK(a.levels == b.levels);
    CHECK(a.beta == b.beta);
    CHECK(a.seed == 42);
    CHECK(a.beta > 0);
    REQUIRE(a.levels.depth() == 20);
    // Adding level n multiplies lambda0 by that level's k=0 relative area.
    const double rho = 30.0;
    for (int n = 1; n <= 20; ++n) {
        const auto& level = a.levels.levels()[static_cast<std::size_t>(n - 1)];
        const double T = rho / a.levels.prefix(n - 1).base_product();
        const double step = relative_area_k0(level.base(), level.alphabet(), T);
        CHECK(log_lambda0_indexed(a.levels.prefix(n), rho) ==
              doctest::Approx(log_lambda0_indexed(a.levels.prefix(n - 1), rho) + std::log(step)).epsilon(1e-12));
    }
    for (const auto& level : a.levels.levels()) {
        CHECK(level.is_canonical());
        CHECK(level.ratio() <= 2.0 / 3.0);
        CHECK(level.base() >= 3);
        CHECK(level.base() <= 5);  // floor(3^{1.5})
    }
    IndexedDecayParams bad;
    bad.n_max = 4;
    CHECK_THROWS_AS(sweep_indexed_decay(bad, [](int, std::mt19937_64&) { return CantorSpec(4, {0, 1, 2}); }),
                    ValidationError);
    CHECK_THROWS_AS(sweep_indexed_decay(bad, [](int, std::mt19937_64&) { return CantorSpec(3, {1}); }),
                    ValidationError);
}

TEST_CASE("least squares line") {
    const auto fit = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.slope_stderr == doctest::Approx(0.0));
}

TEST_CASE("doubling construction") {
    const auto levels = doubling_levels(4, 2, 5);
    const std::int64_t bases[] = {4, 4, 16, 256, 65536};
    for (int j = 0; j < 5; ++j) {
        CHECK(levels.levels()[static_cast<std::size_t>(j)].base() == bases[j]);
        CHECK(levels.levels()[static_cast<std::size_t>(j)].size() == bases[j] / 2);
        CHECK(levels.levels()[static_cast<std::size_t>(j)].is_canonical());
    }
    const auto three = doubling_levels(3, 2, 3);
    CHECK(three.levels()[1].size() == 2);
    CHECK(three.levels()[2].base() == 9);
    CHECK(three.levels()[2].size() == 6);
    CHECK_THROWS_AS(doubling_levels(4, 2, 7), ValidationError);
    CHECK_THROWS_AS(doubling_levels(4, 4, 3), ValidationError);
}

TEST_CASE("lower bound product converges") {
    const double p10 = lower_bound_product(0.5, 2.0, 10);
    const double p20 = lower_bound_product(0.5, 2.0, 20);
    CHECK(std::abs(p10 - p20) < 1e-12);
    CHECK(lower_bound_product(0.5, 2.0) == p20);
    long double direct = 1;
    for (int m = 2; m <= 10; ++m) direct *= 1 - std::exp(-0.5L * std::pow(2.0L, m));
    CHECK(p10 == doctest::Approx(static_cast<double>(direct)).epsilon(1e-15));
}

TEST_CASE("indexed counterexample stays away from zero") {
    const auto res = sweep_indexed_counterexample(4, 2, 1.0, 5);
    REQUIRE(res.rows.size() == 6);
    CHECK(res.theta == 0.5);
    CHECK(res.min_ratio_to_first > 0.5);
    for (const auto& r : res.rows) CHECK(r.lambda0 > 0);
}

TEST_CASE("positive measure example") {
    const auto one = positive_measure_demo(IndexedCantorSpec({CantorSpec(4, {0, 1, 2})}), 2.0);
    CHECK(one.rows.back().measure == doctest::Approx(2.0 * 3.0 / 4.0));

    const auto res = positive_measure_demo(positive_measure_levels(12), 5.0);
    for (const auto& r : res.rows) CHECK(r.lambda0 >= r.lower_bound - 1e-12);
    // prod_{j>n} (1 - 2^{-j}) >= 1 - 2^{-n}, so depth 12 is within 2^{-12} of
    // the limit (relative) and depth 20 within 1e-6.
    const auto longer = positive_measure_demo(positive_measure_levels(24), 5.0);
    const auto twenty = positive_measure_demo(positive_measure_levels(20), 5.0);
    const double m12 = res.measure_limit_estimate / 5.0, m24 = longer.measure_limit_estimate / 5.0;
    CHECK(m12 - m24 > 0);
    CHECK(m12 - m24 <= std::ldexp(m12, -12));
    CHECK(twenty.measure_limit_estimate / 5.0 - m24 < 1e-6);
    // Small depths against enumeration.
    const auto levels = positive_measure_levels(3);
    const auto set = oracle::intervals({{2, {0}}, {4, {0, 1, 2}}, {8, {0, 1, 2, 3, 4, 5, 6}}}, 5.0L);
    CHECK(lambda0_indexed(levels, 5.0) == doctest::Approx(static_cast<double>(oracle::lambda0(set))).epsilon(1e-13));
}
