#include "lgtau/hurwitz.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lgtau/errors.hpp"
#include "lgtau/json_util.hpp"

namespace lgtau {

void HurwitzQuery::validate() const
{
    if (d < 1)
        throw std::invalid_argument("HurwitzQuery: d must be positive");
    if (l < 0)
        throw std::invalid_argument("HurwitzQuery: l must be nonnegative");
    if (mu.size() != d || mubar.size() != d)
        throw std::invalid_argument("HurwitzQuery: partitions must have size d");
}

std::optional<int> genus_of(const HurwitzQuery &q)
{
    const int twice = q.l - q.mu.length() - q.mubar.length() + 2;
    if (twice < 0 || twice % 2 != 0)
        return std::nullopt;
    return twice / 2;
}

double enumeration_cost(int d, int l)
{
    const double pairs = 0.5 * d * (d - 1);
    return std::pow(pairs, l);
}

namespace {

// Depth-first enumeration of transposition tuples applied on top of a fixed
// starting permutation alpha.
class FactorizationCounter {
public:
    FactorizationCounter(const Permutation &alpha, int l, const Partition &target)
        : d_(alpha.degree()), l_(l), alpha_(alpha), target_(target),
          perm_(alpha.images()), inv_(alpha.inverse().images())
    {
        for (int a = 0; a < d_; ++a)
            for (int b = a + 1; b < d_; ++b)
                pairs_.emplace_back(a, b);
        chosen_.reserve(static_cast<std::size_t>(l));
        cycles_ = cycle_type(alpha).length();
    }

    std::uint64_t run()
    {
        count_ = 0;
        descend(0);
        return count_;
    }

private:
    bool same_cycle(int a, int b) const
    {
        for (int x = perm_[static_cast<std::size_t>(a)];; x = perm_[static_cast<std::size_t>(x)]) {
            if (x == b)
                return true;
            if (x == a)
                return false;
        }
    }

    // Left-multiplies the current product by (a b): swaps the values a and b.
    void apply(int a, int b)
    {
        const int ia = inv_[static_cast<std::size_t>(a)];
        const int ib = inv_[static_cast<std::size_t>(b)];
        perm_[static_cast<std::size_t>(ia)] = b;
        perm_[static_cast<std::size_t>(ib)] = a;
        inv_[static_cast<std::size_t>(a)] = ib;
        inv_[static_cast<std::size_t>(b)] = ia;
    }

    void descend(int depth)
    {
        const int remaining = l_ - depth;
        if (std::abs(cycles_ - target_.length()) > remaining)
            return;
        if (remaining == 0) {
            if (leaf_matches())
                ++count_;
            return;
        }
        for (const auto &[a, b] : pairs_) {
            const int delta = same_cycle(a, b) ? +1 : -1;
            apply(a, b);
            cycles_ += delta;
            chosen_.emplace_back(a, b);
            descend(depth + 1);
            chosen_.pop_back();
            cycles_ -= delta;
            apply(a, b);
        }
    }

    bool leaf_matches()
    {
        if (!has_target_type())
            return false;
        // Orbits of <alpha, tau_i> are the connected components of the graph
        // with edges i -- alpha(i) and a -- b for each tau = (a b).
        std::vector<int> parent(static_cast<std::size_t>(d_));
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[static_cast<std::size_t>(x)] != x)
                x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            return x;
        };
        int components = d_;
        auto unite = [&](int x, int y) {
            x = find(x);
            y = find(y);
            if (x != y) {
                parent[static_cast<std::size_t>(x)] = y;
                --components;
            }
        };
        for (int i = 0; i < d_; ++i)
            unite(i, alpha_(i));
        for (const auto &[a, b] : chosen_)
            unite(a, b);
        return components == 1;
    }

    bool has_target_type()
    {
        lengths_.clear();
        seen_.assign(static_cast<std::size_t>(d_), 0);
        for (int i = 0; i < d_; ++i) {
            if (seen_[static_cast<std::size_t>(i)])
                continue;
            int len = 0;
            for (int j = i; !seen_[static_cast<std::size_t>(j)]; j = perm_[static_cast<std::size_t>(j)]) {
                seen_[static_cast<std::size_t>(j)] = 1;
                ++len;
            }
            lengths_.push_back(len);
        }
        std::sort(lengths_.begin(), lengths_.end(), std::greater<>());
        return lengths_ == target_.parts();
    }

    int d_;
    int l_;
    Permutation alpha_;
    std::vector<int> lengths_;
    std::vector<char> seen_;
    Partition target_;
    std::vector<int> perm_;
    std::vector<int> inv_;
    std::vector<std::pair<int, int>> pairs_;
    std::vector<std::pair<int, int>> chosen_;
    int cycles_ = 0;
    std::uint64_t count_ = 0;
};

} // namespace

HurwitzValue double_hurwitz(const HurwitzQuery &q, const HurwitzOptions &opts)
{
    q.validate();
    HurwitzValue out;
    out.genus = genus_of(q);
    out.value = 0;
    if (!out.genus)
        return out;

    const double cost = enumeration_cost(q.d, q.l);
    if (cost > opts.budget) {
        throw ResourceLimitError("double_hurwitz: enumeration needs " + std::to_string(static_cast<long double>(cost)) +
                                     " transposition tuples, budget is " +
                                     std::to_string(static_cast<long double>(opts.budget)),
                                 cost);
    }

    if (opts.mode == Enumeration::fixed_representative) {
        FactorizationCounter counter(representative(q.mu), q.l, q.mubar);
        const std::uint64_t n = counter.run();
        // class_size(mu) * n / d! = n / z_mu
        out.value = mpq_class(mpz_class(std::to_string(n)), mpz_class(std::to_string(centralizer_order(q.mu))));
    } else {
        std::vector<int> im(static_cast<std::size_t>(q.d));
        std::iota(im.begin(), im.end(), 0);
        std::uint64_t total = 0;
        do {
            Permutation alpha(im);
            if (cycle_type(alpha) != q.mu)
                continue;
            total += FactorizationCounter(alpha, q.l, q.mubar).run();
        } while (std::next_permutation(im.begin(), im.end()));
        out.value = mpq_class(mpz_class(std::to_string(total)), mpz_class(std::to_string(factorial(q.d))));
    }
    out.value.canonicalize();
    return out;
}

const HurwitzEntry *HurwitzTable::find(const Partition &mu, const Partition &mubar) const
{
    for (const auto &e : entries) {
        if (e.query.mu == mu && e.query.mubar == mubar)
            return &e;
    }
    return nullptr;
}

HurwitzTable hurwitz_table(int d_max, int genus, const HurwitzOptions &opts)
{
    if (d_max < 1)
        throw std::invalid_argument("hurwitz_table: d_max must be positive");
    if (genus < 0)
        throw std::invalid_argument("hurwitz_table: genus must be nonnegative");
    HurwitzTable table;
    table.d_max = d_max;
    table.genus = genus;
    for (int d = 1; d <= d_max; ++d) {
        const auto parts = partitions_of(d);
        for (const auto &mu : parts) {
            for (const auto &mubar : parts) {
                HurwitzQuery q{d, mu.length() + mubar.length() - 2 + 2 * genus, mu, mubar};
                if (q.l < 0)
                    continue;
                auto v = double_hurwitz(q, opts);
                if (v.value != 0)
                    table.entries.push_back({std::move(q), std::move(v)});
            }
        }
    }
    return table;
}

nlohmann::json to_json(const HurwitzTable &table)
{
    auto rows = nlohmann::json::array();
    for (const auto &e : table.entries) {
        nlohmann::json r;
        r["d"] = e.query.d;
        r["l"] = e.query.l;
        r["mu"] = e.query.mu.parts();
        r["mubar"] = e.query.mubar.parts();
        r["genus"] = e.value.genus ? nlohmann::json(*e.value.genus) : nlohmann::json(nullptr);
        r["value_num"] = integer_to_json(e.value.value.get_num());
        r["value_den"] = integer_to_json(e.value.value.get_den());
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace lgtau
