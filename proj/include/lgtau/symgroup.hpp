#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lgtau {

/// Integer partition with parts stored in nonincreasing order.
class Partition {
public:
    Partition() = default;

    /// Sorts the parts; throws std::invalid_argument on a non-positive part
    /// or an empty list.
    explicit Partition(std::vector<int> parts);

    /// (1^d)
    static Partition ones(int d);

    const std::vector<int> &parts() const noexcept { return parts_; }
    int size() const noexcept { return size_; }
    int length() const noexcept { return static_cast<int>(parts_.size()); }

    /// Number of parts equal to i.
    int multiplicity(int i) const noexcept;

    /// Σ (μ_i − 1), the minimal number of transpositions producing this type.
    int defect() const noexcept { return size_ - length(); }

    std::string to_string() const;

    friend bool operator==(const Partition &, const Partition &) = default;
    friend std::strong_ordering operator<=>(const Partition &a, const Partition &b)
    {
        return a.parts_ <=> b.parts_;
    }

private:
    std::vector<int> parts_;
    int size_ = 0;
};

/// Permutation of {0..d-1} in one-line form: images()[i] is the image of i.
/// Textual I/O is 1-based.
class Permutation {
public:
    Permutation() = default;

    /// Throws std::invalid_argument unless images is a bijection of {0..d-1}.
    explicit Permutation(std::vector<int> images);

    static Permutation identity(int d);
    /// Transposition of the 0-based points a and b.
    static Permutation transposition(int d, int a, int b);
    /// Cycle given as 0-based points; c[0] -> c[1] -> ... -> c[0].
    static Permutation cycle(int d, std::span<const int> points);

    int degree() const noexcept { return static_cast<int>(images_.size()); }
    int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }
    const std::vector<int> &images() const noexcept { return images_; }

    Permutation inverse() const;
    std::string to_string() const;

    friend bool operator==(const Permutation &, const Permutation &) = default;

private:
    std::vector<int> images_;
};

/// All partitions of d, lexicographically descending: (d), (d-1,1), ..., (1^d).
std::vector<Partition> partitions_of(int d);

Partition cycle_type(const Permutation &p);

/// The product "apply q first, then p": result(i) = p(q(i)).
Permutation compose(const Permutation &p, const Permutation &q);

/// All d(d-1)/2 transpositions in lexicographic order of (a, b), a < b.
/// Empty for d < 2.
std::vector<Permutation> transpositions(int d);

/// True iff the orbit of point 0 under the group generated by `generators`
/// is the whole of {0..d-1}. With no generators, transitive only for d = 1.
bool is_transitive(std::span<const Permutation> generators, int d);

/// Number of permutations of S_d with cycle type mu: d! / ∏ i^{m_i} m_i!.
std::uint64_t class_size(const Partition &mu);

/// ∏ i^{m_i} m_i!, the order of the centralizer of a permutation of type mu.
std::uint64_t centralizer_order(const Partition &mu);

std::uint64_t factorial(int n);

/// A fixed permutation of cycle type mu: consecutive blocks 0..mu_1-1, ...
Permutation representative(const Partition &mu);

} // namespace lgtau
