#include "lgtau/trochoid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lgtau/errors.hpp"

namespace lgtau::trochoid {

void Params::validate() const
{
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::invalid_argument("trochoid: kappa must lie in (0, 1)");
    if (!(R > 0.0) || !(r0 > 0.0))
        throw std::invalid_argument("trochoid: R and r0 must be positive");
}

std::complex<double> Params::t1() const
{
    return (R * kappa / r0) * std::polar(1.0, -Y0 / R);
}

Params Params::from_t1(double R, double r0, std::complex<double> t1)
{
    return Params{R, r0, r0 * std::abs(t1) / R, -R * std::arg(t1)};
}

double critical_time(const Params &p)
{
    return 2.0 * p.R * std::log(1.0 / p.kappa) - p.R;
}

double tree_series(double y, int terms)
{
    // k^{k-1}/k! y^k, accumulated through the ratio of consecutive terms.
    double term = y;
    double sum = 0.0;
    for (int k = 1; k <= terms; ++k) {
        sum += term;
        const double kk = k;
        term *= y * std::pow((kk + 1.0) / kk, kk - 1.0);
    }
    return sum;
}

double lambda_of_t(const Params &p, double t0)
{
    p.validate();
    // delta = (t_c - t0)/R; the equation for u = lambda^2 reads
    // log u - u = -1 - delta.
    const double delta = (critical_time(p) - t0) / p.R;
    if (delta < 0.0) {
        if (delta > -1e-15)
            return 1.0;
        throw SingularityError("lambda_of_t: t0 = " + std::to_string(t0) + " is past the critical time " +
                               std::to_string(critical_time(p)));
    }
    const double x2 = p.kappa * p.kappa * std::exp(t0 / p.R);
    if (x2 < 1e-4)
        return std::sqrt(tree_series(x2, 20));

    std::vector<double> trace;
    if (delta < 0.05) {
        // s = 1 - u solves -log(1 - s) - s = delta; the function is convex and
        // increasing, and s = sqrt(2 delta) lies to the right of the root, so
        // Newton iterates decrease monotonically.
        double s = std::sqrt(2.0 * delta);
        for (int it = 0; it < 100; ++it) {
            if (s == 0.0)
                return 1.0;
            const double f = -std::log1p(-s) - s - delta;
            const double fp = s / (1.0 - s);
            const double step = f / fp;
            trace.push_back(f);
            s -= step;
            if (std::abs(step) <= 2e-15 * s || s <= 0.0 || (it > 50 && std::abs(f) < 1e-15 * delta)) {
                s = std::max(s, 0.0);
                return std::sqrt(1.0 - s);
            }
        }
    } else {
        // Newton on phi(u) = log u - u - log x2 (concave, increasing on (0,1)),
        // started below the root at u = x2; iterates increase monotonically.
        const double c = std::log(x2);
        double u = x2;
        for (int it = 0; it < 100; ++it) {
            const double f = std::log(u) - u - c;
            const double fp = 1.0 / u - 1.0;
            const double step = f / fp;
            trace.push_back(f);
            u -= step;
            if (std::abs(step) <= 2e-15 * u || (it > 50 && std::abs(f) < 1e-14))
                return std::sqrt(std::min(u, 1.0));
        }
    }
    throw ConvergenceError("lambda_of_t: Newton iteration did not converge", trace);
}

double time_of_lambda(const Params &p, double lambda)
{
    p.validate();
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("time_of_lambda: lambda must lie in (0, 1]");
    const double u = lambda * lambda;
    return p.R * (std::log(u) - u - 2.0 * std::log(p.kappa));
}

Point contour(const Params &p, double t0, double sigma)
{
    const double lam = lambda_of_t(p, t0);
    return {p.R * (t0 / (2.0 * p.R) + 0.5 * lam * lam + lam * std::cos(sigma)),
            p.Y0 + p.R * (sigma - lam * std::sin(sigma))};
}

Moments moments(const Params &p, double t0)
{
    const double lam = lambda_of_t(p, t0);
    const double l2 = lam * lam;
    const auto t1 = p.t1();
    Moments m;
    m.lambda = lam;
    m.t1 = t1;
    m.v0 = 2.0 * t0 * std::log(p.r0) + t0 * t0 / (2.0 * p.R) + 0.5 * p.R * l2 * (2.0 - l2);
    m.v1 = (p.R * p.R / 2.0) * l2 * (2.0 - l2) / t1;
    m.v2 = (p.R * p.R * p.R / 3.0) * l2 * l2 * (3.0 - 2.0 * l2) / (t1 * t1);
    return m;
}

double tau(const Params &p, double t0)
{
    const double lam = lambda_of_t(p, t0);
    const double l2 = lam * lam;
    return t0 * t0 * t0 / (6.0 * p.R) + t0 * t0 * std::log(p.r0) +
           (p.R * p.R / 12.0) * l2 * (2.0 * l2 * l2 - 9.0 * l2 + 12.0);
}

MapCoefficients map_coefficients(const Params &p, double t0)
{
    const double lam = lambda_of_t(p, t0);
    return {std::complex<double>(0.5 * (t0 + p.R * lam * lam), p.Y0), std::complex<double>(p.R * lam, 0.0)};
}

LambdaPartials lambda_partials(const Params &p, double t0)
{
    const double lam = lambda_of_t(p, t0);
    const double gap = 1.0 - lam * lam;
    if (gap <= 0.0)
        throw SingularityError("lambda_partials: derivatives diverge at lambda = 1");
    return {lam / (2.0 * p.R * gap), lam / (2.0 * p.t1() * gap), -lam * (t0 + 2.0 * p.R) / (2.0 * p.R * p.R * gap)};
}

namespace {

// Fourth-order central second difference.
template <typename F>
double second_difference(F &&f, double h)
{
    return (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h);
}

} // namespace

double check_first_toda(const Params &p, double t0, double h)
{
    return check_first_toda(p, t0, h, [](const Params &q, double t) { return tau(q, t); });
}

double check_first_toda(const Params &p, double t0, double h, const TauFunction &tau_fn)
{
    p.validate();
    const auto t1 = p.t1();
    const double ht = h * std::abs(t1);
    const double h0 = h * p.R;

    // The stencil reaches |t1| (1 + 2h) and t0 + 2 h0; lambda grows with both.
    const Params widest = Params::from_t1(p.R, p.r0, t1 * (1.0 + 2.0 * h));
    if (widest.kappa >= 1.0 || t0 + 2.0 * h0 > critical_time(widest) ||
        lambda_of_t(widest, t0 + 2.0 * h0) > 1.0 - 10.0 * h)
        throw std::invalid_argument("check_first_toda: stencil reaches the critical point");

    auto at_t1 = [&](std::complex<double> dt1) { return tau_fn(Params::from_t1(p.R, p.r0, t1 + dt1), t0); };
    const double dxx = second_difference([&](double s) { return at_t1({s, 0.0}); }, ht);
    const double dyy = second_difference([&](double s) { return at_t1({0.0, s}); }, ht);
    const double lhs = 0.25 * (dxx + dyy);

    const double d00 = second_difference([&](double s) { return tau_fn(p, t0 + s); }, h0);
    const double rhs = std::exp(d00);
    return std::abs(lhs - rhs) / std::abs(rhs);
}

std::vector<mpq_class> tau_taylor_coefficients(int n)
{
    if (n < 1)
        throw std::invalid_argument("tau_taylor_coefficients: n must be positive");
    const auto len = static_cast<std::size_t>(n + 1);
    // L(y) = Σ k^{k-1}/k! y^k, the series of -W0(-y).
    std::vector<mpq_class> L(len, 0);
    for (int k = 1; k <= n; ++k) {
        mpz_class num, fact = 1;
        mpz_ui_pow_ui(num.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(k - 1));
        for (int i = 2; i <= k; ++i)
            fact *= i;
        L[static_cast<std::size_t>(k)] = mpq_class(num, fact);
        L[static_cast<std::size_t>(k)].canonicalize();
    }
    auto mul = [&](const std::vector<mpq_class> &a, const std::vector<mpq_class> &b) {
        std::vector<mpq_class> c(len, 0);
        for (std::size_t i = 0; i < len; ++i)
            for (std::size_t j = 0; i + j < len; ++j)
                c[i + j] += a[i] * b[j];
        return c;
    };
    const auto L2 = mul(L, L);
    const auto L3 = mul(L2, L);
    std::vector<mpq_class> c(static_cast<std::size_t>(n));
    for (int d = 1; d <= n; ++d) {
        const auto i = static_cast<std::size_t>(d);
        c[i - 1] = (2 * L3[i] - 9 * L2[i] + 12 * L[i]) / 12;
    }
    return c;
}

} // namespace lgtau::trochoid
