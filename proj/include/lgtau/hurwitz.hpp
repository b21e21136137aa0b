#pragma once

// Double Hurwitz numbers by exhaustive enumeration of transposition
// factorizations.
//
// Normalization: H_{d,l}(mu, mubar) = N / d!, where N counts tuples
// (alpha, tau_1, ..., tau_l) with alpha of cycle type mu, every tau_i a
// transposition, tau_l ∘ ... ∘ tau_1 ∘ alpha of cycle type mubar and the
// group <alpha, tau_1, ..., tau_l> transitive (connected cover). With this
// weight H_{k,0}((k),(k)) = 1/k and H_{d,2d-2}(1^d,1^d) = (2d-2)!/d! d^{d-3}.

#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "lgtau/symgroup.hpp"

namespace lgtau {

struct HurwitzQuery {
    int d = 1;
    int l = 0;
    Partition mu;
    Partition mubar;

    /// Throws std::invalid_argument if |mu| != d, |mubar| != d or l < 0.
    void validate() const;
};

struct HurwitzValue {
    mpq_class value;
    /// Genus from Riemann–Hurwitz; empty when the data is non-geometric.
    std::optional<int> genus;
};

enum class Enumeration {
    /// alpha fixed to one representative of its class, count scaled by the
    /// class size.
    fixed_representative,
    /// alpha runs over the whole conjugacy class.
    full,
};

struct HurwitzOptions {
    /// Cap on (d(d-1)/2)^l.
    double budget = 1e9;
    Enumeration mode = Enumeration::fixed_representative;
};

/// g = (l - ℓ(mu) - ℓ(mubar) + 2) / 2 when that is a nonnegative integer.
std::optional<int> genus_of(const HurwitzQuery &q);

/// (d(d-1)/2)^l, the number of transposition tuples to enumerate.
double enumeration_cost(int d, int l);

/// Throws ResourceLimitError when enumeration_cost exceeds opts.budget.
HurwitzValue double_hurwitz(const HurwitzQuery &q, const HurwitzOptions &opts = {});

struct HurwitzEntry {
    HurwitzQuery query;
    HurwitzValue value;
};

struct HurwitzTable {
    int d_max = 0;
    int genus = 0;
    /// Nonzero entries only, ordered by d, then mu, then mubar (each in the
    /// canonical partition order).
    std::vector<HurwitzEntry> entries;

    /// Entry for (mu, mubar), or nullptr if absent (zero).
    const HurwitzEntry *find(const Partition &mu, const Partition &mubar) const;
};

HurwitzTable hurwitz_table(int d_max, int genus, const HurwitzOptions &opts = {});

/// Records {d, l, mu, mubar, genus, value_num, value_den}.
nlohmann::json to_json(const HurwitzTable &table);

} // namespace lgtau
