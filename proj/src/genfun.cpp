#include "lgtau/genfun.hpp"

#include <stdexcept>

#include "lgtau/json_util.hpp"

namespace lgtau {

int Monomial::weight_t() const
{
    int w = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
        w += static_cast<int>(k + 1) * a[k];
    return w;
}

int Monomial::weight_tbar() const
{
    int w = 0;
    for (std::size_t k = 0; k < b.size(); ++k)
        w += static_cast<int>(k + 1) * b[k];
    return w;
}

std::string Monomial::to_string() const
{
    std::string s;
    auto put = [&](const std::string &name, int e) {
        if (e == 0)
            return;
        if (!s.empty())
            s += "*";
        s += name;
        if (e != 1)
            s += "^" + std::to_string(e);
    };
    put("q", qdeg);
    put("beta", bdeg);
    for (std::size_t k = 0; k < a.size(); ++k)
        put("t" + std::to_string(k + 1), a[k]);
    for (std::size_t k = 0; k < b.size(); ++k)
        put("tb" + std::to_string(k + 1), b[k]);
    return s.empty() ? "1" : s;
}

GradedSeries::GradedSeries(int truncation, int max_index) : truncation_(truncation), max_index_(max_index)
{
    if (truncation < 0 || max_index < 0)
        throw std::invalid_argument("GradedSeries: negative truncation or index range");
}

void GradedSeries::add_term(const Monomial &m, const mpq_class &c)
{
    if (m.qdeg > truncation_ || c == 0)
        return;
    if (m.a.size() != static_cast<std::size_t>(max_index_) || m.b.size() != static_cast<std::size_t>(max_index_))
        throw std::invalid_argument("GradedSeries::add_term: exponent vector length mismatch");
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0)
            terms_.erase(it);
    }
}

mpq_class GradedSeries::coeff(const Monomial &m) const
{
    auto it = terms_.find(m);
    return it == terms_.end() ? mpq_class(0) : it->second;
}

Monomial GradedSeries::monomial(int qdeg, int bdeg, const std::map<int, int> &t, const std::map<int, int> &tbar) const
{
    Monomial m{qdeg, bdeg, std::vector<int>(static_cast<std::size_t>(max_index_), 0),
               std::vector<int>(static_cast<std::size_t>(max_index_), 0)};
    for (auto [k, e] : t) {
        if (k < 1 || k > max_index_)
            throw std::invalid_argument("GradedSeries::monomial: t index out of range");
        m.a[static_cast<std::size_t>(k - 1)] = e;
    }
    for (auto [k, e] : tbar) {
        if (k < 1 || k > max_index_)
            throw std::invalid_argument("GradedSeries::monomial: tbar index out of range");
        m.b[static_cast<std::size_t>(k - 1)] = e;
    }
    return m;
}

GradedSeries GradedSeries::constant(int truncation, int max_index, const mpq_class &c)
{
    GradedSeries s(truncation, max_index);
    s.add_term(s.monomial(0, 0), c);
    return s;
}

void GradedSeries::check_compatible(const GradedSeries &o, const char *op) const
{
    if (truncation_ != o.truncation_ || max_index_ != o.max_index_)
        throw std::invalid_argument(std::string(op) + ": truncation or index range mismatch");
}

GradedSeries &GradedSeries::operator+=(const GradedSeries &o)
{
    check_compatible(o, "series_add");
    for (const auto &[m, c] : o.terms_)
        add_term(m, c);
    return *this;
}

GradedSeries &GradedSeries::operator-=(const GradedSeries &o)
{
    check_compatible(o, "series_sub");
    for (const auto &[m, c] : o.terms_)
        add_term(m, -c);
    return *this;
}

GradedSeries operator*(const GradedSeries &x, const GradedSeries &y)
{
    x.check_compatible(y, "series_mul");
    GradedSeries out(x.truncation_, x.max_index_);
    for (const auto &[mx, cx] : x.terms_) {
        for (const auto &[my, cy] : y.terms_) {
            if (mx.qdeg + my.qdeg > out.truncation_)
                continue;
            Monomial m = mx;
            m.qdeg += my.qdeg;
            m.bdeg += my.bdeg;
            for (std::size_t k = 0; k < m.a.size(); ++k) {
                m.a[k] += my.a[k];
                m.b[k] += my.b[k];
            }
            out.add_term(m, cx * cy);
        }
    }
    return out;
}

GradedSeries operator*(const mpq_class &c, const GradedSeries &s)
{
    GradedSeries out(s.truncation_, s.max_index_);
    for (const auto &[m, v] : s.terms_)
        out.add_term(m, c * v);
    return out;
}

GradedSeries GradedSeries::operator-() const
{
    return mpq_class(-1) * *this;
}

GradedSeries GradedSeries::shift_q(int n) const
{
    GradedSeries out(truncation_, max_index_);
    for (const auto &[key, c] : terms_) {
        Monomial m = key;
        m.qdeg += n;
        out.add_term(m, c);
    }
    return out;
}

GradedSeries GradedSeries::shift_beta(int n) const
{
    GradedSeries out(truncation_, max_index_);
    for (const auto &[key, c] : terms_) {
        Monomial m = key;
        m.bdeg += n;
        out.add_term(m, c);
    }
    return out;
}

std::string GradedSeries::to_string() const
{
    if (terms_.empty())
        return "0";
    std::string s;
    for (const auto &[m, c] : terms_) {
        if (!s.empty())
            s += " + ";
        s += "(" + c.get_str() + ")*" + m.to_string();
    }
    return s;
}

GradedSeries series_add(const GradedSeries &a, const GradedSeries &b) { return a + b; }
GradedSeries series_mul(const GradedSeries &a, const GradedSeries &b) { return a * b; }
GradedSeries series_scale(const GradedSeries &s, const mpq_class &c) { return c * s; }

GradedSeries series_exp(const GradedSeries &s)
{
    for (const auto &[m, c] : s.terms()) {
        if (m.qdeg < 1)
            throw std::invalid_argument("series_exp: argument has a term of q-degree 0: " + m.to_string());
    }
    GradedSeries result = GradedSeries::constant(s.truncation(), s.max_index(), 1);
    GradedSeries power = result;
    // s is nilpotent of order truncation + 1 in the q-grading.
    for (int n = 1; n <= s.truncation(); ++n) {
        power = mpq_class(1, n) * (power * s);
        if (power.is_zero())
            break;
        result += power;
    }
    return result;
}

namespace {

GradedSeries diff_vector(const GradedSeries &s, int k, bool bar)
{
    GradedSeries out(s.truncation(), s.max_index());
    if (k < 1)
        throw std::invalid_argument("diff: index must be >= 1");
    if (k > s.max_index())
        return out;
    const auto idx = static_cast<std::size_t>(k - 1);
    for (const auto &[key, c] : s.terms()) {
        Monomial m = key;
        auto &e = bar ? m.b[idx] : m.a[idx];
        if (e == 0)
            continue;
        const int mult = e;
        --e;
        out.add_term(m, c * mult);
    }
    return out;
}

} // namespace

GradedSeries diff_t(const GradedSeries &s, int k) { return diff_vector(s, k, false); }
GradedSeries diff_tbar(const GradedSeries &s, int k) { return diff_vector(s, k, true); }

GradedSeries diff_beta(const GradedSeries &s)
{
    GradedSeries out(s.truncation(), s.max_index());
    for (const auto &[key, c] : s.terms()) {
        Monomial m = key;
        if (m.bdeg == 0)
            continue;
        const int mult = m.bdeg;
        --m.bdeg;
        out.add_term(m, c * mult);
    }
    return out;
}

GradedSeries q_dq(const GradedSeries &s)
{
    GradedSeries out(s.truncation(), s.max_index());
    for (const auto &[m, c] : s.terms())
        out.add_term(m, c * m.qdeg);
    return out;
}

GradedSeries d0(const GradedSeries &s)
{
    return q_dq(s).shift_beta(1);
}

GradedSeries build_F0H(int truncation, const HurwitzTable &table, int max_index)
{
    if (max_index < 0)
        max_index = truncation;
    if (max_index < truncation)
        throw std::invalid_argument("build_F0H: max_index below truncation would drop terms");
    if (table.genus != 0 || table.d_max < truncation)
        throw std::invalid_argument("build_F0H: need a complete genus-0 table up to degree " +
                                    std::to_string(truncation));
    GradedSeries s(truncation, max_index);
    for (const auto &e : table.entries) {
        const auto &q = e.query;
        if (q.d > truncation)
            continue;
        Monomial m = s.monomial(q.d, q.l);
        mpq_class c = e.value.value / mpq_class(mpz_class(std::to_string(factorial(q.l))));
        for (int p : q.mu.parts()) {
            ++m.a[static_cast<std::size_t>(p - 1)];
            c *= p;
        }
        for (int p : q.mubar.parts()) {
            ++m.b[static_cast<std::size_t>(p - 1)];
            c *= p;
        }
        s.add_term(m, c);
    }
    return s;
}

TauSeries build_F0(int truncation, const HurwitzTable &table, int max_index)
{
    return TauSeries{build_F0H(truncation, table, max_index), mpq_class(1, 6)};
}

std::string Violation::to_string() const
{
    std::string s = identity;
    if (z1_power || z2_power)
        s += " [z^-" + std::to_string(z1_power) + ",z^-" + std::to_string(z2_power) + "]";
    return s + " " + monomial.to_string() + ": lhs=" + lhs.get_str() + " rhs=" + rhs.get_str();
}

namespace {

void collect(const std::string &name, const GradedSeries &lhs, const GradedSeries &rhs, int i, int j,
             std::vector<Violation> &out)
{
    const GradedSeries diff = lhs - rhs;
    for (const auto &[m, c] : diff.terms())
        out.push_back({name, i, j, m, lhs.coeff(m), rhs.coeff(m)});
}

GradedSeries cutjoin_rhs(const GradedSeries &s)
{
    const int n = s.max_index();
    GradedSeries rhs(s.truncation(), n);
    std::vector<GradedSeries> ds;
    for (int k = 1; k <= n; ++k)
        ds.push_back(diff_t(s, k));
    auto t_var = [&](int k) {
        GradedSeries v(s.truncation(), n);
        v.add_term(v.monomial(0, 0, {{k, 1}}), 1);
        return v;
    };
    for (int k = 1; k <= n; ++k) {
        for (int l = 1; k + l <= n; ++l) {
            const auto &dkl = ds[static_cast<std::size_t>(k + l - 1)];
            rhs += mpq_class(k * l) * (t_var(k) * t_var(l) * dkl);
            rhs += mpq_class(k + l) * (t_var(k + l) * ds[static_cast<std::size_t>(k - 1)] * ds[static_cast<std::size_t>(l - 1)]);
        }
    }
    return mpq_class(1, 2) * rhs;
}

GradedSeries euler_rhs(const GradedSeries &s)
{
    GradedSeries rhs(s.truncation(), s.max_index());
    for (const auto &[m, c] : s.terms())
        rhs.add_term(m, c * m.weight_t());
    return rhs;
}

// Truncated bivariate power series in x1 = 1/z1, x2 = 1/z2 with GradedSeries
// coefficients.
class ZGrid {
public:
    ZGrid(int k1, int k2, const GradedSeries &proto)
        : k1_(k1), k2_(k2),
          cells_(static_cast<std::size_t>((k1 + 1) * (k2 + 1)), GradedSeries(proto.truncation(), proto.max_index()))
    {
    }

    GradedSeries &at(int i, int j) { return cells_[static_cast<std::size_t>(i * (k2_ + 1) + j)]; }
    const GradedSeries &at(int i, int j) const { return cells_[static_cast<std::size_t>(i * (k2_ + 1) + j)]; }
    int k1() const { return k1_; }
    int k2() const { return k2_; }

    bool is_zero() const
    {
        for (const auto &c : cells_)
            if (!c.is_zero())
                return false;
        return true;
    }

    ZGrid operator*(const ZGrid &o) const
    {
        ZGrid out(k1_, k2_, cells_.front());
        for (int i = 0; i <= k1_; ++i)
            for (int j = 0; j <= k2_; ++j) {
                if (at(i, j).is_zero())
                    continue;
                for (int i2 = 0; i + i2 <= k1_; ++i2)
                    for (int j2 = 0; j + j2 <= k2_; ++j2) {
                        if (o.at(i2, j2).is_zero())
                            continue;
                        out.at(i + i2, j + j2) += at(i, j) * o.at(i2, j2);
                    }
            }
        return out;
    }

    ZGrid scaled(const mpq_class &c) const
    {
        ZGrid out = *this;
        for (auto &cell : out.cells_)
            cell = c * cell;
        return out;
    }

    ZGrid &operator+=(const ZGrid &o)
    {
        for (std::size_t n = 0; n < cells_.size(); ++n)
            cells_[n] += o.cells_[n];
        return *this;
    }

    // Every coefficient of the argument must have q-degree >= 1, which makes
    // it nilpotent under the truncation.
    ZGrid exp() const
    {
        ZGrid result(k1_, k2_, cells_.front());
        result.at(0, 0) = GradedSeries::constant(cells_.front().truncation(), cells_.front().max_index(), 1);
        ZGrid power = result;
        for (int n = 1; n <= cells_.front().truncation(); ++n) {
            power = (power * *this).scaled(mpq_class(1, n));
            if (power.is_zero())
                break;
            result += power;
        }
        return result;
    }

private:
    int k1_;
    int k2_;
    std::vector<GradedSeries> cells_;
};

} // namespace

std::vector<Violation> check_euler(const GradedSeries &s)
{
    std::vector<Violation> out;
    collect("euler", q_dq(s), euler_rhs(s), 0, 0, out);
    return out;
}

std::vector<Violation> check_cutjoin(const GradedSeries &s)
{
    std::vector<Violation> out;
    collect("cutjoin", diff_beta(s), cutjoin_rhs(s), 0, 0, out);
    return out;
}

std::vector<Violation> check_cutjoin_full(const TauSeries &F0)
{
    const auto &s = F0.series;
    std::vector<Violation> out;
    if (F0.cubic != mpq_class(1, 6)) {
        Violation v{"cutjoin_full:t0^3", 0, 0, s.monomial(0, 0), F0.cubic, mpq_class(1, 6)};
        out.push_back(std::move(v));
    }
    collect("cutjoin_full:t0^1", q_dq(s), euler_rhs(s), 0, 0, out);
    collect("cutjoin_full:t0^0", diff_beta(s), cutjoin_rhs(s), 0, 0, out);
    return out;
}

std::vector<Violation> check_hirota(const TauSeries &F0, int K1, int K2)
{
    const auto &s = F0.series;
    if (K1 < 1 || K2 < 1 || K1 > s.max_index() || K2 > s.max_index())
        throw std::invalid_argument("check_hirota: z-orders must lie in [1, " + std::to_string(s.max_index()) + "]");
    std::vector<Violation> out;
    const GradedSeries zero(s.truncation(), s.max_index());

    // First equation, multiplied through by x1 x2:
    //   (x2 - x1) exp(Σ x1^k x2^l /(k l) d_k d_l F0)
    //     = x2 exp(-Σ x1^k/k d0 d_k F0) - x1 exp(-Σ x2^l/l d0 d_l F0)
    {
        ZGrid expo(K1, K2, zero);
        for (int k = 1; k <= K1; ++k)
            for (int l = 1; l <= K2; ++l)
                expo.at(k, l) = mpq_class(1, k * l) * diff_t(diff_t(s, k), l);
        const ZGrid E = expo.exp();

        ZGrid a1(K1, K2, zero), a2(K1, K2, zero);
        for (int k = 1; k <= K1; ++k)
            a1.at(k, 0) = mpq_class(-1, k) * d0(diff_t(s, k));
        for (int l = 1; l <= K2; ++l)
            a2.at(0, l) = mpq_class(-1, l) * d0(diff_t(s, l));
        const ZGrid A1 = a1.exp();
        const ZGrid A2 = a2.exp();

        for (int i = 0; i <= K1; ++i)
            for (int j = 0; j <= K2; ++j) {
                GradedSeries lhs = zero, rhs = zero;
                if (j >= 1)
                    lhs += E.at(i, j - 1);
                if (i >= 1)
                    lhs -= E.at(i - 1, j);
                if (j == 1)
                    rhs += A1.at(i, 0);
                if (i == 1)
                    rhs -= A2.at(0, j);
                collect("hirota1", lhs, rhs, i, j, out);
            }
    }

    // Second equation, multiplied through by x1 y with y = 1/zbar2:
    //   1 - exp(-Σ x1^k y^l/(k l) d_k dbar_l F0)
    //     = x1 y q exp(d0^2 F0 + Σ x1^k/k d0 d_k F0 + Σ y^l/l d0 dbar_l F0)
    // where exp(d0^2 (beta t0^3/6)) = e^{beta t0} = q.
    {
        ZGrid g(K1, K2, zero);
        for (int k = 1; k <= K1; ++k)
            for (int l = 1; l <= K2; ++l)
                g.at(k, l) = mpq_class(-1, k * l) * diff_tbar(diff_t(s, k), l);
        const ZGrid G = g.exp();

        ZGrid h(K1, K2, zero);
        h.at(0, 0) = d0(d0(s));
        for (int k = 1; k <= K1; ++k)
            h.at(k, 0) = mpq_class(1, k) * d0(diff_t(s, k));
        for (int l = 1; l <= K2; ++l)
            h.at(0, l) = mpq_class(1, l) * d0(diff_tbar(s, l));
        const ZGrid H = h.exp();

        for (int i = 0; i <= K1; ++i)
            for (int j = 0; j <= K2; ++j) {
                GradedSeries lhs = -G.at(i, j);
                if (i == 0 && j == 0)
                    lhs += GradedSeries::constant(s.truncation(), s.max_index(), 1);
                GradedSeries rhs = zero;
                if (i >= 1 && j >= 1)
                    rhs = H.at(i - 1, j - 1).shift_q(1);
                collect("hirota2", lhs, rhs, i, j, out);
            }
    }
    return out;
}

nlohmann::json to_json(const GradedSeries &s)
{
    auto arr = nlohmann::json::array();
    for (const auto &[m, c] : s.terms()) {
        arr.push_back({{"qdeg", m.qdeg},
                       {"bdeg", m.bdeg},
                       {"a", m.a},
                       {"b", m.b},
                       {"num", integer_to_json(c.get_num())},
                       {"den", integer_to_json(c.get_den())}});
    }
    return arr;
}

GradedSeries series_from_json(const nlohmann::json &j, int truncation, int max_index)
{
    GradedSeries s(truncation, max_index);
    for (const auto &r : j) {
        Monomial m{r.at("qdeg").get<int>(), r.at("bdeg").get<int>(), r.at("a").get<std::vector<int>>(),
                   r.at("b").get<std::vector<int>>()};
        m.a.resize(static_cast<std::size_t>(max_index), 0);
        m.b.resize(static_cast<std::size_t>(max_index), 0);
        mpq_class c(integer_from_json(r.at("num")), integer_from_json(r.at("den")));
        c.canonicalize();
        s.add_term(m, c);
    }
    return s;
}

} // namespace lgtau
