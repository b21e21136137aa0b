#include <doctest.h>

#include <stdexcept>

#include "lgtau/genfun.hpp"

using namespace lgtau;

namespace {

const HurwitzTable &table4()
{
    static const HurwitzTable t = hurwitz_table(4, 0);
    return t;
}

} // namespace

TEST_CASE("arithmetic respects the truncation")
{
    GradedSeries x(3, 2);
    x.add_term(x.monomial(1, 0, {{1, 1}}), 1); // q t1
    const auto x2 = x * x;
    CHECK(x2.coeff(x.monomial(2, 0, {{1, 2}})) == 1);
    const auto x4 = x2 * x2;
    CHECK(x4.is_zero());
    CHECK((x - x).is_zero());
    CHECK((mpq_class(3) * x).coeff(x.monomial(1, 0, {{1, 1}})) == 3);
    CHECK_THROWS_AS(x + GradedSeries(4, 2), std::invalid_argument);
    x.add_term(x.monomial(5, 0), 7);
    CHECK(x.terms().size() == 1);
}

TEST_CASE("exp of q t1 reproduces the exponential series")
{
    GradedSeries x(5, 1);
    x.add_term(x.monomial(1, 0, {{1, 1}}), 1);
    const auto e = series_exp(x);
    mpq_class fact = 1;
    for (int n = 0; n <= 5; ++n) {
        if (n > 0)
            fact *= n;
        CHECK(e.coeff(e.monomial(n, 0, {{1, n}})) == 1 / fact);
    }
    CHECK_THROWS_AS(series_exp(GradedSeries::constant(5, 1, 1)), std::invalid_argument);
}

TEST_CASE("derivatives on monomials")
{
    GradedSeries s(4, 3);
    s.add_term(s.monomial(3, 2, {{1, 2}, {3, 1}}, {{2, 1}}), mpq_class(1, 5));
    CHECK(diff_t(s, 1).coeff(s.monomial(3, 2, {{1, 1}, {3, 1}}, {{2, 1}})) == mpq_class(2, 5));
    CHECK(diff_t(s, 3).coeff(s.monomial(3, 2, {{1, 2}}, {{2, 1}})) == mpq_class(1, 5));
    CHECK(diff_t(s, 2).is_zero());
    CHECK(diff_tbar(s, 2).coeff(s.monomial(3, 2, {{1, 2}, {3, 1}})) == mpq_class(1, 5));
    CHECK(diff_beta(s).coeff(s.monomial(3, 1, {{1, 2}, {3, 1}}, {{2, 1}})) == mpq_class(2, 5));
    CHECK(q_dq(s).coeff(s.monomial(3, 2, {{1, 2}, {3, 1}}, {{2, 1}})) == mpq_class(3, 5));
    CHECK(d0(s).coeff(s.monomial(3, 3, {{1, 2}, {3, 1}}, {{2, 1}})) == mpq_class(3, 5));
    CHECK(s.shift_q(1).coeff(s.monomial(4, 2, {{1, 2}, {3, 1}}, {{2, 1}})) == mpq_class(1, 5));
    CHECK(s.shift_q(2).is_zero());
}

TEST_CASE("F0H coefficients are read off the Hurwitz table")
{
    const auto F = build_F0H(4, table4());
    // q^2 beta^0 (2 t2)(2 tbar2) H_{2,0}((2),(2)) = q^2 * 4 * 1/2.
    CHECK(F.coeff(F.monomial(2, 0, {{2, 1}}, {{2, 1}})) == 2);
    // q t1 tbar1 with H_{1,0} = 1.
    CHECK(F.coeff(F.monomial(1, 0, {{1, 1}}, {{1, 1}})) == 1);
    for (const auto &e : table4().entries) {
        const auto &q = e.query;
        std::map<int, int> a, b;
        mpq_class w = e.value.value;
        for (int p : q.mu.parts()) {
            ++a[p];
            w *= p;
        }
        for (int p : q.mubar.parts()) {
            ++b[p];
            w *= p;
        }
        const int l = q.mu.length() + q.mubar.length() - 2;
        w /= mpq_class(static_cast<unsigned long>(factorial(l)));
        CHECK(F.coeff(F.monomial(q.d, l, a, b)) == w);
    }
}

TEST_CASE("bridge coefficients for d <= 4")
{
    const auto F = build_F0H(4, table4());
    for (int d = 1; d <= 4; ++d) {
        mpq_class expected(1, static_cast<unsigned long>(factorial(d)));
        for (int i = 0; i < d - 3; ++i)
            expected *= d;
        for (int i = d - 3; i < 0; ++i)
            expected /= d;
        CHECK(F.coeff(F.monomial(d, 2 * d - 2, {{1, d}}, {{1, d}})) == expected);
    }
}

TEST_CASE("Euler and cut-and-join hold on the genus-zero series")
{
    const auto F = build_F0(4, table4());
    CHECK(check_euler(F.series).empty());
    CHECK(check_cutjoin(F.series).empty());
    CHECK(check_cutjoin_full(F).empty());
}

TEST_CASE("a single corrupted coefficient is detected")
{
    auto F = build_F0(4, table4());
    F.series.add_term(F.series.monomial(3, 4, {{1, 3}}, {{2, 1}, {1, 1}}), mpq_class(1, 7));
    const bool detected = !check_euler(F.series).empty() || !check_cutjoin(F.series).empty();
    CHECK(detected);

    auto G = build_F0(4, table4());
    G.series.add_term(G.series.monomial(2, 2, {{1, 2}}, {{1, 2}}), mpq_class(1, 3));
    const auto v = check_cutjoin(G.series);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().lhs != v.front().rhs);
    CHECK_FALSE(v.front().to_string().empty());

    auto H = build_F0(4, table4());
    H.cubic = mpq_class(1, 5);
    CHECK_FALSE(check_cutjoin_full(H).empty());
}

TEST_CASE("Hirota equations hold and detect corruption")
{
    const auto table = hurwitz_table(3, 0);
    const auto F = build_F0(3, table, 4);
    CHECK(check_hirota(F, 4, 4).empty());
    CHECK_THROWS_AS(check_hirota(build_F0(3, table, 3), 4, 4), std::invalid_argument);

    auto G = F;
    G.series.add_term(G.series.monomial(2, 2, {{1, 2}}, {{1, 2}}), mpq_class(1, 2));
    CHECK_FALSE(check_hirota(G, 4, 4).empty());
}

TEST_CASE("json round trip")
{
    const auto F = build_F0H(4, table4());
    const auto j = to_json(F);
    CHECK(series_from_json(j, 4, F.max_index()) == F);
}
