#pragma once

// Exact channel solution with only t0 and t1 nonzero. The interface is the
// trochoid
//
//   X/R = t0/(2R) + lambda^2/2 + lambda cos(sigma),
//   (Y - Y0)/R = sigma - lambda sin(sigma),
//
// with lambda^2 = kappa^2 exp(lambda^2 + t0/R), i.e. lambda^2 = -W0(-x^2),
// x^2 = kappa^2 e^{t0/R}. At lambda = 1 (t0 = t_c) it becomes a cusped cycloid.

#include <complex>
#include <functional>
#include <vector>

#include <gmpxx.h>

namespace lgtau::trochoid {

struct Params {
    double R = 1.0;
    double r0 = 1.0;
    double kappa = 0.3;
    double Y0 = 0.0;

    /// Throws std::invalid_argument unless 0 < kappa < 1, R > 0, r0 > 0.
    void validate() const;

    /// t1 = (R kappa / r0) e^{-i Y0 / R}
    std::complex<double> t1() const;

    /// Parameters reproducing the given t1: kappa = r0 |t1| / R, Y0 = -R arg t1.
    static Params from_t1(double R, double r0, std::complex<double> t1);
};

/// t_c = 2 R log(1/kappa) - R.
double critical_time(const Params &p);

/// Principal root lambda in [0, 1] of lambda^2 = kappa^2 e^{lambda^2 + t0/R},
/// relative accuracy ~1e-14. Throws SingularityError for t0 > t_c.
double lambda_of_t(const Params &p, double t0);

/// t0 at which lambda takes the given value in (0, 1].
double time_of_lambda(const Params &p, double lambda);

/// Σ_{k>=1} k^{k-1}/k! y^k truncated after `terms` terms (tree function).
double tree_series(double y, int terms);

struct Point {
    double X;
    double Y;
};

Point contour(const Params &p, double t0, double sigma);

struct Moments {
    std::complex<double> t1;
    double v0;
    std::complex<double> v1;
    std::complex<double> v2;
    double lambda;
};

Moments moments(const Params &p, double t0);

/// F0 = t0^3/(6R) + t0^2 log r0 + (R^2/12) lambda^2 (2 lambda^4 - 9 lambda^2 + 12).
double tau(const Params &p, double t0);

/// Map coefficients u0, u1 of Z(W) = RW + u0 + u1 e^{-W} for the trochoid.
struct MapCoefficients {
    std::complex<double> u0;
    std::complex<double> u1;
};
MapCoefficients map_coefficients(const Params &p, double t0);

struct LambdaPartials {
    double d_t0;
    /// Holomorphic derivative with respect to t1.
    std::complex<double> d_t1;
    double d_R;
};

/// Throws SingularityError at lambda = 1.
LambdaPartials lambda_partials(const Params &p, double t0);

using TauFunction = std::function<double(const Params &, double)>;

/// Relative residual of d^2F0/dt1 dtbar1 = exp(d^2F0/dt0^2), both sides by
/// central finite differences of `tau_fn` with step h (relative to |t1| and R).
/// t1 is varied through (kappa, Y0). Throws std::invalid_argument when the
/// stencil does not keep lambda <= 1 - 10 h.
double check_first_toda(const Params &p, double t0, double h);
double check_first_toda(const Params &p, double t0, double h, const TauFunction &tau_fn);

/// Exact coefficients c_d, d = 1..n, of the expansion at t0 = 0:
///   F0 - t0^2 log r0 = Σ_d c_d beta^{2d-2} r0^{2d} (t1 tbar1)^d,
/// obtained by substituting the tree-function series for lambda^2 into the
/// closed-form tau.
std::vector<mpq_class> tau_taylor_coefficients(int n);

} // namespace lgtau::trochoid
