#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "lgtau/errors.hpp"
#include "lgtau/hurwitz.hpp"

using namespace lgtau;

namespace {

using Img = std::vector<int>;

std::vector<int> sorted_orbits(const Img &p)
{
    std::vector<int> out;
    std::vector<bool> seen(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        int len = 0;
        for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(p[j])) {
            seen[j] = true;
            ++len;
        }
        if (len)
            out.push_back(len);
    }
    std::sort(out.rbegin(), out.rend());
    return out;
}

int find_root(std::vector<int> &uf, int x)
{
    while (uf[static_cast<std::size_t>(x)] != x)
        x = uf[static_cast<std::size_t>(x)] = uf[static_cast<std::size_t>(uf[static_cast<std::size_t>(x)])];
    return x;
}

// Direct count over every alpha in S_d and every l-tuple of transpositions,
// with its own composition, cycle type and union-find connectivity.
mpq_class brute_force(int d, int l, const std::vector<int> &mu, const std::vector<int> &mubar)
{
    std::vector<std::pair<int, int>> trans;
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
            trans.emplace_back(a, b);
    if (trans.empty() && l > 0)
        return 0;
    Img alpha(static_cast<std::size_t>(d));
    std::iota(alpha.begin(), alpha.end(), 0);
    long count = 0;
    do {
        if (sorted_orbits(alpha) != mu)
            continue;
        std::vector<std::size_t> idx(static_cast<std::size_t>(l), 0);
        while (true) {
            Img cur = alpha;
            std::vector<int> uf(static_cast<std::size_t>(d));
            std::iota(uf.begin(), uf.end(), 0);
            for (int i = 0; i < d; ++i)
                uf[static_cast<std::size_t>(find_root(uf, i))] = find_root(uf, alpha[static_cast<std::size_t>(i)]);
            for (std::size_t s = 0; s < idx.size(); ++s) {
                const auto [a, b] = trans[idx[s]];
                for (auto &x : cur)
                    x = x == a ? b : (x == b ? a : x);
                uf[static_cast<std::size_t>(find_root(uf, a))] = find_root(uf, b);
            }
            bool connected = true;
            for (int i = 1; i < d; ++i)
                connected = connected && find_root(uf, i) == find_root(uf, 0);
            if (connected && sorted_orbits(cur) == mubar)
                ++count;
            std::size_t s = 0;
            while (s < idx.size() && ++idx[s] == trans.size())
                idx[s++] = 0;
            if (s == idx.size())
                break;
        }
    } while (std::next_permutation(alpha.begin(), alpha.end()));
    mpq_class r(count, static_cast<unsigned long>(factorial(d)));
    r.canonicalize();
    return r;
}

mpq_class closed_form_a(int d)
{
    mpz_class num = 1;
    for (int i = 2; i <= 2 * d - 2; ++i)
        num *= i;
    mpq_class r(num, mpz_class(static_cast<unsigned long>(factorial(d))));
    if (d >= 3) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(d - 3));
        r *= p;
    } else {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(3 - d));
        r /= p;
    }
    r.canonicalize();
    return r;
}

} // namespace

TEST_CASE("genus from Riemann-Hurwitz")
{
    CHECK(genus_of({3, 4, Partition::ones(3), Partition::ones(3)}) == 0);
    CHECK(genus_of({3, 6, Partition::ones(3), Partition::ones(3)}) == 1);
    CHECK_FALSE(genus_of({3, 3, Partition::ones(3), Partition::ones(3)}).has_value());
    CHECK_FALSE(genus_of({3, 0, Partition::ones(3), Partition::ones(3)}).has_value());
    CHECK(genus_of({2, 0, Partition({2}), Partition({2})}) == 0);
}

TEST_CASE("query validation")
{
    CHECK_THROWS_AS(double_hurwitz({3, 2, Partition({2}), Partition::ones(3)}), std::invalid_argument);
    CHECK_THROWS_AS(double_hurwitz({3, -1, Partition({3}), Partition({3})}), std::invalid_argument);
}

TEST_CASE("library agrees with the brute-force oracle")
{
    for (int d = 1; d <= 4; ++d)
        for (const auto &mu : partitions_of(d))
            for (const auto &mubar : partitions_of(d))
                for (int l = 0; l <= (d == 4 ? 4 : 5); ++l) {
                    const HurwitzQuery q{d, l, mu, mubar};
                    const auto expected = brute_force(d, l, mu.parts(), mubar.parts());
                    CAPTURE(d);
                    CAPTURE(l);
                    CAPTURE(mu.to_string());
                    CAPTURE(mubar.to_string());
                    CHECK(double_hurwitz(q).value == expected);
                }
}

TEST_CASE("both enumeration modes agree")
{
    HurwitzOptions full;
    full.mode = Enumeration::full;
    for (int d = 2; d <= 4; ++d)
        for (const auto &mu : partitions_of(d))
            for (const auto &mubar : partitions_of(d)) {
                const HurwitzQuery q{d, mu.length() + mubar.length() - 2, mu, mubar};
                CHECK(double_hurwitz(q).value == double_hurwitz(q, full).value);
            }
}

TEST_CASE("closed forms")
{
    for (int d = 1; d <= 4; ++d) {
        const HurwitzQuery q{d, 2 * d - 2, Partition::ones(d), Partition::ones(d)};
        CHECK(double_hurwitz(q).value == closed_form_a(d));
    }
    CHECK(closed_form_a(4) == 120);
    CHECK(closed_form_a(5) == 8400);
    for (int k = 1; k <= 6; ++k)
        CHECK(double_hurwitz({k, 0, Partition({k}), Partition({k})}).value == mpq_class(1, k));
    // One-part numbers: a d-cycle has d^{d-2} minimal transposition factorizations.
    CHECK(double_hurwitz({3, 2, Partition({3}), Partition::ones(3)}).value == 1);
    CHECK(double_hurwitz({4, 3, Partition({4}), Partition::ones(4)}).value == 4);
}

TEST_CASE("symmetry under exchanging mu and mubar")
{
    const auto table = hurwitz_table(4, 0);
    for (const auto &e : table.entries) {
        const auto *swapped = table.find(e.query.mubar, e.query.mu);
        REQUIRE(swapped != nullptr);
        CHECK(swapped->value.value == e.value.value);
    }
}

TEST_CASE("table layout")
{
    const auto table = hurwitz_table(4, 0);
    CHECK(table.entries.size() == 39);
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        const auto &q = table.entries[i].query;
        CHECK(table.entries[i].value.value > 0);
        CHECK(genus_of(q) == 0);
        if (i == 0)
            continue;
        const auto &p = table.entries[i - 1].query;
        const bool ordered = p.d < q.d || (p.d == q.d && (p.mu > q.mu || (p.mu == q.mu && p.mubar > q.mubar)));
        CHECK(ordered);
    }
    CHECK(table.find(Partition({3}), Partition({2, 1})) != nullptr);
    CHECK(table.find(Partition({1, 1, 1}), Partition({1, 1, 1}))->value.value == 4);

    const auto j = to_json(table);
    REQUIRE(j.is_array());
    CHECK(j.size() == table.entries.size());
    CHECK(j[0].contains("value_num"));
    CHECK(j[0].contains("value_den"));
}

TEST_CASE("budget is enforced before enumeration")
{
    HurwitzOptions tiny;
    tiny.budget = 10;
    try {
        double_hurwitz({3, 4, Partition::ones(3), Partition::ones(3)}, tiny);
        FAIL("expected ResourceLimitError");
    } catch (const ResourceLimitError &e) {
        CHECK(e.required() == doctest::Approx(81.0));
    }
    CHECK(enumeration_cost(4, 3) == doctest::Approx(216.0));
    CHECK_THROWS_AS(hurwitz_table(3, 0, tiny), ResourceLimitError);
}
