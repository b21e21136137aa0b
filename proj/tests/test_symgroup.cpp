#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "lgtau/symgroup.hpp"

using namespace lgtau;

namespace {

// p(n) by the standard recursion on the largest allowed part.
long count_partitions(int n, int max_part)
{
    if (n == 0)
        return 1;
    long c = 0;
    for (int k = std::min(n, max_part); k >= 1; --k)
        c += count_partitions(n - k, k);
    return c;
}

// Cycle type computed by marking orbits, independent of the library.
std::vector<int> orbit_lengths(const std::vector<int> &img)
{
    std::vector<int> out;
    std::vector<bool> seen(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (seen[i])
            continue;
        int len = 0;
        for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(img[j])) {
            seen[j] = true;
            ++len;
        }
        out.push_back(len);
    }
    std::sort(out.rbegin(), out.rend());
    return out;
}

} // namespace

TEST_CASE("partition construction sorts and validates")
{
    const Partition p({1, 3, 2, 1});
    CHECK(p.parts() == std::vector<int>{3, 2, 1, 1});
    CHECK(p.size() == 7);
    CHECK(p.length() == 4);
    CHECK(p.multiplicity(1) == 2);
    CHECK(p.multiplicity(5) == 0);
    CHECK(p.defect() == 3);
    CHECK_THROWS_AS(Partition(std::vector<int>{}), std::invalid_argument);
    CHECK_THROWS_AS(Partition({2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Partition({-1}), std::invalid_argument);
    CHECK(Partition::ones(3) == Partition({1, 1, 1}));
}

TEST_CASE("partition counts match the recursion")
{
    for (int d = 1; d <= 12; ++d)
        CHECK(static_cast<long>(partitions_of(d).size()) == count_partitions(d, d));
    CHECK_THROWS_AS(partitions_of(0), std::invalid_argument);
}

TEST_CASE("partitions are distinct, of the right size and strictly descending")
{
    for (int d = 1; d <= 9; ++d) {
        const auto ps = partitions_of(d);
        CHECK(ps.front() == Partition({d}));
        CHECK(ps.back() == Partition::ones(d));
        for (std::size_t i = 0; i < ps.size(); ++i) {
            CHECK(ps[i].size() == d);
            if (i > 0)
                CHECK(ps[i - 1] > ps[i]);
        }
    }
    CHECK(partitions_of(4) == std::vector<Partition>{Partition({4}), Partition({3, 1}), Partition({2, 2}),
                                                     Partition({2, 1, 1}), Partition({1, 1, 1, 1})});
}

TEST_CASE("permutation validation")
{
    CHECK_NOTHROW(Permutation({2, 0, 1}));
    CHECK_THROWS_AS(Permutation({0, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Permutation({0, 3, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Permutation({-1, 0}), std::invalid_argument);
}

TEST_CASE("composition applies the right factor first")
{
    // (1 2) and (2 3) in 1-based notation.
    const auto a = Permutation::transposition(3, 0, 1);
    const auto b = Permutation::transposition(3, 1, 2);
    const auto ab = compose(a, b);
    // b first: 1 -> 1 -> 2, 2 -> 3 -> 3, 3 -> 2 -> 1.
    CHECK(ab(0) == 1);
    CHECK(ab(1) == 2);
    CHECK(ab(2) == 0);
    CHECK(cycle_type(ab) == Partition({3}));
    CHECK(compose(a, a) == Permutation::identity(3));
    CHECK_THROWS_AS(compose(a, Permutation::identity(4)), std::invalid_argument);
}

TEST_CASE("composition is associative and inverse is two-sided on S_4")
{
    std::vector<int> img{0, 1, 2, 3};
    std::vector<Permutation> all;
    do
        all.emplace_back(img);
    while (std::next_permutation(img.begin(), img.end()));
    REQUIRE(all.size() == 24);
    for (std::size_t i = 0; i < all.size(); i += 5)
        for (std::size_t j = 0; j < all.size(); j += 3) {
            CHECK(compose(all[i], all[i].inverse()) == Permutation::identity(4));
            for (std::size_t k = 0; k < all.size(); k += 7)
                CHECK(compose(compose(all[i], all[j]), all[k]) == compose(all[i], compose(all[j], all[k])));
        }
}

TEST_CASE("cycle types agree with an orbit count and class sizes sum to d!")
{
    for (int d = 1; d <= 6; ++d) {
        std::vector<int> img(static_cast<std::size_t>(d));
        std::iota(img.begin(), img.end(), 0);
        std::map<std::vector<int>, std::uint64_t> counts;
        do {
            const auto ct = cycle_type(Permutation(img));
            CHECK(ct.parts() == orbit_lengths(img));
            ++counts[ct.parts()];
        } while (std::next_permutation(img.begin(), img.end()));
        std::uint64_t total = 0;
        for (const auto &mu : partitions_of(d)) {
            CHECK(class_size(mu) == counts[mu.parts()]);
            CHECK(class_size(mu) * centralizer_order(mu) == factorial(d));
            total += class_size(mu);
        }
        CHECK(total == factorial(d));
    }
}

TEST_CASE("representative has the requested cycle type")
{
    for (int d = 1; d <= 7; ++d)
        for (const auto &mu : partitions_of(d))
            CHECK(cycle_type(representative(mu)) == mu);
}

TEST_CASE("transpositions")
{
    CHECK(transpositions(1).empty());
    for (int d = 2; d <= 6; ++d) {
        const auto ts = transpositions(d);
        CHECK(static_cast<int>(ts.size()) == d * (d - 1) / 2);
        std::set<std::vector<int>> distinct;
        for (const auto &t : ts) {
            CHECK(cycle_type(t) == Partition([d] {
                      std::vector<int> v(static_cast<std::size_t>(d - 1), 1);
                      v[0] = 2;
                      return v;
                  }()));
            distinct.insert(t.images());
        }
        CHECK(distinct.size() == ts.size());
    }
}

TEST_CASE("transitivity")
{
    const auto t01 = Permutation::transposition(4, 0, 1);
    const auto t23 = Permutation::transposition(4, 2, 3);
    const auto t12 = Permutation::transposition(4, 1, 2);
    const std::vector<Permutation> split{t01, t23};
    const std::vector<Permutation> joined{t01, t23, t12};
    CHECK_FALSE(is_transitive(split, 4));
    CHECK(is_transitive(joined, 4));
    CHECK(is_transitive(std::vector<Permutation>{}, 1));
    CHECK_FALSE(is_transitive(std::vector<Permutation>{}, 2));
    const int c[] = {0, 1, 2, 3};
    CHECK(is_transitive(std::vector<Permutation>{Permutation::cycle(4, c)}, 4));
}

TEST_CASE("text output is 1-based")
{
    const auto p = Permutation({1, 2, 0});
    CHECK(p.to_string().find('3') != std::string::npos);
    CHECK(p.to_string().find('0') == std::string::npos);
    CHECK(Partition({2, 1}).to_string().find('2') != std::string::npos);
}

TEST_CASE("factorial range")
{
    CHECK(factorial(0) == 1);
    CHECK(factorial(20) == 2432902008176640000ULL);
    CHECK_THROWS(factorial(21));
    CHECK_THROWS(factorial(-1));
}
