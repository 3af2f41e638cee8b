#include <doctest.h>

#include <cmath>
#include <random>

#include "ctfl/errors.hpp"
#include "ctfl/localization.hpp"
#include "ctfl/special_fn.hpp"
#include "support/oracles.hpp"

using namespace ctfl;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("eigenvalues of a three-letter iterate match references") {
    // 50-digit mpmath sums over the 81 intervals of (5, {0,2,3}), n=4, rho=25.
    const auto p = LocalizationProblem::fixed(CantorSpec(5, {0, 2, 3}), 4, 25.0);
    CHECK(rel(eigenvalue(p, 0).value, 0.28978851628728536262) < 1e-13);
    CHECK(rel(eigenvalue(p, 13).value, 0.1776215932255531065) < 1e-13);
    CHECK(rel(eigenvalue(p, 40).value, 2.4618971113662826095e-6) < 1e-11);

    const auto table = eigenvalue_table(p, 40);
    REQUIRE(table.size() == 41);
    CHECK(rel(table[0].value, 0.28978851628728536262) < 1e-13);
    CHECK(rel(table[13].value, 0.1776215932255531065) < 1e-13);
    CHECK(rel(table[40].value, 2.4618971113662826095e-6) < 1e-11);
}

TEST_CASE("first iterate of the mid-third set") {
    const double want = (1 - std::exp(-1.0)) * (1 + std::exp(-2.0));
    CHECK(rel(lambda0_closed_form(CantorSpec(3, {0, 2}), 1, 3.0), want) < 1e-15);
    const auto p = LocalizationProblem::fixed(CantorSpec(3, {0, 2}), 1, 3.0);
    CHECK(rel(eigenvalue(p, 0).value, want) < 1e-15);
}

TEST_CASE("ball case reduces to the regularized gamma") {
    const auto p = LocalizationProblem::fixed(CantorSpec(4, {1}), 0, 7.5);
    for (int k : {0, 1, 7, 30}) CHECK(rel(eigenvalue(p, k).value, regularized_lower_gamma(k, 7.5)) < 1e-14);
    CHECK(ball_bound(p.measure()) == doctest::Approx(1 - std::exp(-7.5)));
}

TEST_CASE("eigenvalues against per-interval quadrature oracle") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 25; ++i) {
        const int m = std::uniform_int_distribution<int>(2, 5)(rng);
        std::vector<std::int64_t> letters;
        for (int a = 0; a < m; ++a)
            if (rng() % 2) letters.push_back(a);
        if (letters.empty() || static_cast<int>(letters.size()) == m) continue;
        const int n = std::uniform_int_distribution<int>(0, 3)(rng);
        const double rho = std::uniform_real_distribution<double>(0.5, 80.0)(rng);
        const int k = std::uniform_int_distribution<int>(0, 100)(rng);
        const auto p = LocalizationProblem::fixed(CantorSpec(m, letters), n, rho);
        const double want = static_cast<double>(oracle::eigenvalue(oracle::intervals(m, letters, n, rho), k));
        if (want < 1e-250) continue;
        const auto got = eigenvalue(p, k);
        CAPTURE(m);
        CAPTURE(n);
        CAPTURE(rho);
        CAPTURE(k);
        CHECK(rel(got.value, want) <= 1e-11);
        CHECK(std::abs(got.value - want) <= got.err + 1e-15 * want);
        const auto table = eigenvalue_table(p, k);
        CHECK(std::abs(table.back().value - want) <= table.back().err + 1e-14 * want);
    }
}

TEST_CASE("lambda0 closed forms agree") {
    for (int m : {3, 4, 7}) {
        for (int size = 1; size < m; ++size) {
            const CantorSpec canon(m, Alphabet::canonical(size));
            for (int n : {0, 1, 4}) {
                for (double rho : {0.5, 3.0, 40.0}) {
                    const double closed = lambda0_closed_form(canon, n, rho);
                    const double want =
                        static_cast<double>(oracle::lambda0(oracle::intervals(m, oracle::canonical(size), n, rho)));
                    CHECK(rel(closed, want) < 1e-13);
                    CHECK(rel(lambda0_canonical_geometric(m, size, n, rho), closed) < 1e-13);
                    CHECK(rel(lambda0_indexed(IndexedCantorSpec::repeated(canon, n), rho), closed) < 1e-13);
                    CHECK(std::abs(log_lambda0_indexed(IndexedCantorSpec::repeated(canon, n), rho) -
                                   std::log(closed)) < 1e-13);
                }
            }
        }
    }
}

TEST_CASE("indexed lambda0 against enumeration") {
    const IndexedCantorSpec spec({CantorSpec(3, {0, 2}), CantorSpec(5, {1, 2, 4}), CantorSpec(2, {1})});
    const auto set = oracle::intervals({{3, {0, 2}}, {5, {1, 2, 4}}, {2, {1}}}, 12.0L);
    CHECK(rel(lambda0_indexed(spec, 12.0), static_cast<double>(oracle::lambda0(set))) < 1e-13);
    const auto p = LocalizationProblem::indexed(spec, 12.0);
    CHECK(rel(eigenvalue(p, 0).value, lambda0_indexed(spec, 12.0)) < 1e-13);
}

TEST_CASE("norm of canonical sets is the first eigenvalue") {
    const CantorSpec canon(5, {0, 1, 2});
    const auto p = LocalizationProblem::fixed(canon, 4, 25.0);
    const auto r = operator_norm(p);
    CHECK(r.argmax_k == 0);
    CHECK(std::abs(r.value - lambda0_closed_form(canon, 4, 25.0)) <= r.err + 1e-15);
}

TEST_CASE("norm certificate bounds everything past the truncation") {
    const CantorSpec rev(4, {2, 3});
    const auto p = LocalizationProblem::fixed(rev, 3, 64.0);
    const auto r = operator_norm(p);
    CHECK(r.k_truncation > 64);
    CHECK(r.tail_bound == doctest::Approx(regularized_lower_gamma(r.k_truncation + 1, 64.0)).epsilon(1e-12));
    CHECK(r.tail_bound < std::max(1e-12, 1e-9 * r.value));
    const auto wide = eigenvalue_table(p, 3 * r.k_truncation);
    for (const auto& e : wide) {
        CHECK(e.value <= r.value + r.err);
        if (e.k > r.k_truncation) CHECK(e.value <= r.tail_bound);
    }
    CHECK(wide[static_cast<std::size_t>(r.argmax_k)].value == doctest::Approx(r.value).epsilon(1e-14));
}

TEST_CASE("inner start skips the low indices of reverse canonical sets") {
    const CantorSpec rev(3, {1, 2});
    const auto p = LocalizationProblem::fixed(rev, 5, 81.0);
    NormOptions inner;
    inner.start_at_inner_index = true;
    const auto a = operator_norm(p);
    const auto b = operator_norm(p, inner);
    CHECK(b.k_start == static_cast<int>(std::floor(inner_rho(rev, 5, 81.0))));
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-14));
    CHECK_THROWS_AS(inner_rho(CantorSpec(3, {0, 2}), 2, 9.0), ValidationError);
}

TEST_CASE("empty set at rho = 0") {
    const auto p = LocalizationProblem::fixed(CantorSpec(3, {0, 2}), 2, 0.0);
    CHECK(p.intervals().empty());
    CHECK(eigenvalue(p, 0).value == 0.0);
    CHECK(operator_norm(p).value == 0.0);
}

TEST_CASE("relative areas") {
    const CantorSpec canon(7, {0, 1, 2});
    // s-independence at k = 0
    for (double s : {0.0, 3.0, 50.0})
        CHECK(relative_area(canon, 0, s, 4.0) == doctest::Approx(relative_area_k0(3.0 / 7.0, 4.0)).epsilon(1e-13));
    CHECK(relative_area_k0(7, canon.alphabet(), 4.0) == doctest::Approx(relative_area_k0(3.0 / 7.0, 4.0)));
    CHECK(relative_area_k0(7, Alphabet::canonical(3), 0.0) == doctest::Approx(3.0 / 7.0));
    CHECK(limit_relative_area(0.4, 1.0, 5.0) == 0.4);
    // The T -> 0 limit of the canonical k=0 area is theta.
    CHECK(relative_area_k0(0.4, 1e-9) == doctest::Approx(0.4).epsilon(1e-8));

    // Far left tail: only the top letter's share survives, about (3/7)^{k+1}.
    const double tiny = relative_area(canon, 500, 0.0, 1.0);
    const double want = static_cast<double>(oracle::log_segment_mass(500, 0.0L, 3.0L / 7.0L) -
                                            oracle::log_segment_mass(500, 0.0L, 1.0L));
    CHECK(std::abs(std::log(tiny) - want) <= 1e-10);
    CHECK_THROWS_AS(relative_area(canon, 0, 0.0, 0.0), DomainError);
}

TEST_CASE("limit area is approached from above") {
    const CantorSpec spec(3, {0, 1});
    const double limit = limit_relative_area(2.0 / 3.0, 2.0, 1.0);
    const double at = relative_area(spec, 4096, 2.0 * 4096, 1.0);
    CHECK(at >= limit);
    CHECK(at - limit <= 1e-3);
}

TEST_CASE("inner radius tends to the full geometric series") {
    CHECK(std::abs(inner_rho(CantorSpec(3, {1, 2}), 40, 10.0) - 5.0) <= 1e-9);
}
