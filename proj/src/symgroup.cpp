#include "lgtau/symgroup.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace lgtau {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts))
{
    if (parts_.empty())
        throw std::invalid_argument("Partition: empty list of parts");
    for (int p : parts_) {
        if (p < 1)
            throw std::invalid_argument("Partition: parts must be positive");
    }
    std::sort(parts_.begin(), parts_.end(), std::greater<>());
    size_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

Partition Partition::ones(int d)
{
    if (d < 1)
        throw std::invalid_argument("Partition::ones: d must be positive");
    return Partition(std::vector<int>(static_cast<std::size_t>(d), 1));
}

int Partition::multiplicity(int i) const noexcept
{
    return static_cast<int>(std::count(parts_.begin(), parts_.end(), i));
}

std::string Partition::to_string() const
{
    std::string s = "(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(parts_[i]);
    }
    return s + ")";
}

Permutation::Permutation(std::vector<int> images) : images_(std::move(images))
{
    std::vector<char> seen(images_.size(), 0);
    for (int x : images_) {
        if (x < 0 || static_cast<std::size_t>(x) >= images_.size() || seen[static_cast<std::size_t>(x)])
            throw std::invalid_argument("Permutation: images are not a bijection");
        seen[static_cast<std::size_t>(x)] = 1;
    }
}

Permutation Permutation::identity(int d)
{
    std::vector<int> im(static_cast<std::size_t>(d));
    std::iota(im.begin(), im.end(), 0);
    return Permutation(std::move(im));
}

Permutation Permutation::transposition(int d, int a, int b)
{
    if (a == b || a < 0 || b < 0 || a >= d || b >= d)
        throw std::invalid_argument("Permutation::transposition: bad points");
    auto p = identity(d);
    std::swap(p.images_[static_cast<std::size_t>(a)], p.images_[static_cast<std::size_t>(b)]);
    return p;
}

Permutation Permutation::cycle(int d, std::span<const int> points)
{
    std::vector<int> im(static_cast<std::size_t>(d));
    std::iota(im.begin(), im.end(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        int from = points[i];
        int to = points[(i + 1) % points.size()];
        if (from < 0 || from >= d)
            throw std::invalid_argument("Permutation::cycle: point out of range");
        im[static_cast<std::size_t>(from)] = to;
    }
    return Permutation(std::move(im));
}

Permutation Permutation::inverse() const
{
    std::vector<int> inv(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i)
        inv[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
    return Permutation(std::move(inv));
}

std::string Permutation::to_string() const
{
    std::string s = "[";
    for (std::size_t i = 0; i < images_.size(); ++i) {
        if (i)
            s += " ";
        s += std::to_string(images_[i] + 1);
    }
    return s + "]";
}

std::vector<Partition> partitions_of(int d)
{
    if (d < 1)
        throw std::invalid_argument("partitions_of: d must be positive");
    std::vector<Partition> out;
    std::vector<int> cur;
    // Parts chosen largest first, each bounded by the previous one; visiting
    // larger parts first yields lexicographically descending order.
    std::function<void(int, int)> rec = [&](int remaining, int maxpart) {
        if (remaining == 0) {
            out.emplace_back(cur);
            return;
        }
        for (int p = std::min(remaining, maxpart); p >= 1; --p) {
            cur.push_back(p);
            rec(remaining - p, p);
            cur.pop_back();
        }
    };
    rec(d, d);
    return out;
}

Partition cycle_type(const Permutation &p)
{
    const int d = p.degree();
    if (d == 0)
        throw std::invalid_argument("cycle_type: empty permutation");
    std::vector<char> seen(static_cast<std::size_t>(d), 0);
    std::vector<int> lens;
    for (int i = 0; i < d; ++i) {
        if (seen[static_cast<std::size_t>(i)])
            continue;
        int len = 0;
        for (int j = i; !seen[static_cast<std::size_t>(j)]; j = p(j)) {
            seen[static_cast<std::size_t>(j)] = 1;
            ++len;
        }
        lens.push_back(len);
    }
    return Partition(std::move(lens));
}

Permutation compose(const Permutation &p, const Permutation &q)
{
    if (p.degree() != q.degree())
        throw std::invalid_argument("compose: degree mismatch");
    std::vector<int> im(static_cast<std::size_t>(p.degree()));
    for (int i = 0; i < p.degree(); ++i)
        im[static_cast<std::size_t>(i)] = p(q(i));
    return Permutation(std::move(im));
}

std::vector<Permutation> transpositions(int d)
{
    std::vector<Permutation> out;
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
            out.push_back(Permutation::transposition(d, a, b));
    return out;
}

bool is_transitive(std::span<const Permutation> generators, int d)
{
    if (d < 1)
        throw std::invalid_argument("is_transitive: d must be positive");
    for (const auto &g : generators) {
        if (g.degree() != d)
            throw std::invalid_argument("is_transitive: generator degree mismatch");
    }
    std::vector<char> seen(static_cast<std::size_t>(d), 0);
    std::vector<int> queue{0};
    seen[0] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int x = queue[head];
        for (const auto &g : generators) {
            const int y = g(x);
            if (!seen[static_cast<std::size_t>(y)]) {
                seen[static_cast<std::size_t>(y)] = 1;
                queue.push_back(y);
            }
        }
    }
    return static_cast<int>(queue.size()) == d;
}

std::uint64_t factorial(int n)
{
    if (n < 0 || n > 20)
        throw std::invalid_argument("factorial: argument outside [0, 20]");
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i)
        f *= static_cast<std::uint64_t>(i);
    return f;
}

std::uint64_t centralizer_order(const Partition &mu)
{
    std::uint64_t z = 1;
    for (int i = 1; i <= mu.size(); ++i) {
        const int m = mu.multiplicity(i);
        for (int k = 0; k < m; ++k)
            z *= static_cast<std::uint64_t>(i);
        z *= factorial(m);
    }
    return z;
}

std::uint64_t class_size(const Partition &mu)
{
    return factorial(mu.size()) / centralizer_order(mu);
}

Permutation representative(const Partition &mu)
{
    std::vector<int> im(static_cast<std::size_t>(mu.size()));
    int start = 0;
    for (int len : mu.parts()) {
        for (int k = 0; k < len; ++k)
            im[static_cast<std::size_t>(start + k)] = start + (k + 1) % len;
        start += len;
    }
    return Permutation(std::move(im));
}

} // namespace lgtau
