#pragma once

// Exact truncated series in q, beta, t_1..t_n, tbar_1..tbar_n with rational
// coefficients, and the genus-zero Hurwitz generating function built on it.
//
// Conventions for the tau-function at r0 = 1:
//
//   F0 = beta t0^3 / 6 + F0H(beta, q = e^{beta t0}, t, tbar).
//
// The variable q stands for e^{beta t0}; its degree is the covering degree d.
// Hence d/dt0 acts on the series part as beta q d/dq (multiplication of each
// term by beta * qdeg), and the cubic term is carried separately.
//
// Hirota prefactor: in the second Hirota equation the factor
// exp(d0^2 F0) contains d0^2 (beta t0^3 / 6) = beta t0, and e^{beta t0} = q.
// The check therefore multiplies by q (a shift of the q-grading by one)
// instead of carrying t0 explicitly.

#include <compare>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "lgtau/hurwitz.hpp"

namespace lgtau {

struct Monomial {
    int qdeg = 0;
    int bdeg = 0;
    /// a[k-1] is the exponent of t_k.
    std::vector<int> a;
    /// b[k-1] is the exponent of tbar_k.
    std::vector<int> b;

    /// Σ k a_k
    int weight_t() const;
    /// Σ k b_k
    int weight_tbar() const;

    std::string to_string() const;

    friend bool operator==(const Monomial &, const Monomial &) = default;
    friend auto operator<=>(const Monomial &, const Monomial &) = default;
};

class GradedSeries {
public:
    using Terms = std::map<Monomial, mpq_class>;

    GradedSeries() = default;
    /// Series truncated at q-degree `truncation`, tracking t-indices 1..max_index.
    GradedSeries(int truncation, int max_index);

    int truncation() const noexcept { return truncation_; }
    int max_index() const noexcept { return max_index_; }
    const Terms &terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    /// Adds c to the coefficient of m. Terms beyond the truncation are dropped.
    void add_term(const Monomial &m, const mpq_class &c);
    mpq_class coeff(const Monomial &m) const;

    /// Monomial with the right exponent-vector length for this series. The
    /// maps give index -> exponent, e.g. {{1, 2}} for t_1^2.
    Monomial monomial(int qdeg, int bdeg, const std::map<int, int> &t = {},
                      const std::map<int, int> &tbar = {}) const;

    static GradedSeries constant(int truncation, int max_index, const mpq_class &c);

    GradedSeries &operator+=(const GradedSeries &o);
    GradedSeries &operator-=(const GradedSeries &o);
    friend GradedSeries operator+(GradedSeries a, const GradedSeries &b) { return a += b; }
    friend GradedSeries operator-(GradedSeries a, const GradedSeries &b) { return a -= b; }
    friend GradedSeries operator*(const GradedSeries &a, const GradedSeries &b);
    friend GradedSeries operator*(const mpq_class &c, const GradedSeries &s);
    GradedSeries operator-() const;

    friend bool operator==(const GradedSeries &, const GradedSeries &) = default;

    /// Multiplies by q^n (truncating).
    GradedSeries shift_q(int n) const;
    /// Multiplies by beta^n.
    GradedSeries shift_beta(int n) const;

    std::string to_string() const;

private:
    void check_compatible(const GradedSeries &o, const char *op) const;

    int truncation_ = 0;
    int max_index_ = 0;
    Terms terms_;
};

GradedSeries series_add(const GradedSeries &a, const GradedSeries &b);
GradedSeries series_mul(const GradedSeries &a, const GradedSeries &b);
GradedSeries series_scale(const GradedSeries &s, const mpq_class &c);

/// Σ s^n / n!; requires every term of s to have qdeg >= 1.
GradedSeries series_exp(const GradedSeries &s);

GradedSeries diff_t(const GradedSeries &s, int k);
GradedSeries diff_tbar(const GradedSeries &s, int k);
GradedSeries diff_beta(const GradedSeries &s);
/// d/dt0 on a function of q = e^{beta t0}: multiplies each term by beta*qdeg.
GradedSeries d0(const GradedSeries &s);
/// q d/dq
GradedSeries q_dq(const GradedSeries &s);

/// F0 = cubic * beta t0^3 + series(q = e^{beta t0}) at r0 = 1.
struct TauSeries {
    GradedSeries series;
    mpq_class cubic{1, 6};
};

/// F0H = Σ q^d beta^l H_{d,l}(mu,mubar)/l! ∏ mu_i t_{mu_i} ∏ mubar_i tbar_{mubar_i},
/// l = ℓ(mu) + ℓ(mubar) - 2. max_index defaults to the truncation.
GradedSeries build_F0H(int truncation, const HurwitzTable &table, int max_index = -1);

TauSeries build_F0(int truncation, const HurwitzTable &table, int max_index = -1);

struct Violation {
    std::string identity;
    /// Powers of 1/z1 and 1/z2 (or 1/zbar2) for Hirota checks; zero otherwise.
    int z1_power = 0;
    int z2_power = 0;
    Monomial monomial;
    mpq_class lhs;
    mpq_class rhs;

    std::string to_string() const;
};

/// q d/dq s = Σ k t_k d/dt_k s, coefficient by coefficient.
std::vector<Violation> check_euler(const GradedSeries &s);

/// d/dbeta s = 1/2 Σ_{k,l} [k l t_k t_l d/dt_{k+l} s + (k+l) t_{k+l} (d/dt_k s)(d/dt_l s)].
std::vector<Violation> check_cutjoin(const GradedSeries &s);

/// The beta-flow of the full F0 at r0 = 1:
///   dF0/dbeta = t0^3/6 + t0 Σ k t_k dF0/dt_k + 1/2 Σ_{k,l} [...].
/// With q = e^{beta t0}, d/dbeta at fixed t0 picks up t0 q d/dq from q, so the
/// identity splits by powers of t0 into: t0^3 (cubic == 1/6), t0^1 (Euler)
/// and t0^0 (cut-and-join on the series).
std::vector<Violation> check_cutjoin_full(const TauSeries &F0);

/// Both dispersionless Hirota equations, with D(z) truncated at order K1 in
/// 1/z1 and K2 in 1/z2 (resp. 1/zbar2). Every coefficient with 1/z-powers in
/// [0, K1] x [0, K2] and q-degree <= truncation is compared. Throws
/// std::invalid_argument if K1 or K2 exceed the series' max_index.
std::vector<Violation> check_hirota(const TauSeries &F0, int K1, int K2);

/// [{qdeg, bdeg, a, b, num, den}] in canonical order.
nlohmann::json to_json(const GradedSeries &s);
GradedSeries series_from_json(const nlohmann::json &j, int truncation, int max_index);

} // namespace lgtau
