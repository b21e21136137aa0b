#include "lgtau/lgsolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "lgtau/errors.hpp"

namespace lgtau::lg {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

bool is_power_of_two(int m)
{
    return m > 0 && (m & (m - 1)) == 0;
}

// Uniform sigma grid with the Fourier factors e^{-i m sigma_j}, m = 0..N.
struct Grid {
    int M;
    int N;
    std::vector<double> sigma;
    std::vector<cplx> basis;

    Grid(int M_, int N_) : M(M_), N(N_), sigma(static_cast<std::size_t>(M_)),
                           basis(static_cast<std::size_t>(M_) * static_cast<std::size_t>(N_ + 1))
    {
        for (int j = 0; j < M; ++j) {
            const double s = 2.0 * kPi * j / M;
            sigma[static_cast<std::size_t>(j)] = s;
            for (int m = 0; m <= N; ++m)
                basis[idx(j, m)] = std::polar(1.0, -m * s);
        }
    }

    std::size_t idx(int j, int m) const
    {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(N + 1) + static_cast<std::size_t>(m);
    }
    cplx E(int j, int m) const { return basis[idx(j, m)]; }
};

// Z(i sigma_j) and dZ/dsigma = i Z'(W).
struct Boundary {
    std::vector<cplx> Z;
    std::vector<cplx> Zs;
};

Boundary boundary(const ChannelMap &map, const Grid &g)
{
    Boundary b{std::vector<cplx>(static_cast<std::size_t>(g.M)), std::vector<cplx>(static_cast<std::size_t>(g.M))};
    for (int j = 0; j < g.M; ++j) {
        cplx z{0.0, map.R * g.sigma[static_cast<std::size_t>(j)]};
        cplx zs{0.0, map.R};
        for (int m = 0; m <= g.N; ++m) {
            const cplx term = map.u[static_cast<std::size_t>(m)] * g.E(j, m);
            z += term;
            zs += cplx(0.0, -m) * term;
        }
        b.Z[static_cast<std::size_t>(j)] = z;
        b.Zs[static_cast<std::size_t>(j)] = zs;
    }
    return b;
}

void require_map(const ChannelMap &map, const char *where)
{
    if (!(map.R > 0.0) || !(map.r0 > 0.0) || map.u.empty())
        throw std::invalid_argument(std::string(where) + ": map needs R > 0, r0 > 0 and at least u_0");
}

MomentSet moments_on_grid(const ChannelMap &map, int K, int M)
{
    const int N = map.order();
    const Grid g(M, N);
    const Boundary b = boundary(map, g);
    const double R = map.R;

    MomentSet m;
    m.t.assign(static_cast<std::size_t>(K + 1), cplx{});
    m.v.assign(static_cast<std::size_t>(K + 1), cplx{});
    double area = 0.0, second = 0.0;
    std::vector<cplx> tsum(static_cast<std::size_t>(K + 1)), vsum(static_cast<std::size_t>(K + 1));
    for (int j = 0; j < M; ++j) {
        const auto J = static_cast<std::size_t>(j);
        const double X = b.Z[J].real();
        const double dY = b.Zs[J].imag();
        area += X * dY;
        second += X * X * dY;
        const cplx f = X * b.Zs[J];
        const cplx em = std::exp(-b.Z[J] / R);
        const cplx ep = std::exp(b.Z[J] / R);
        cplx pm = 1.0, pp = 1.0;
        for (int k = 1; k <= K; ++k) {
            pm *= em;
            pp *= ep;
            tsum[static_cast<std::size_t>(k)] += pm * f;
            vsum[static_cast<std::size_t>(k)] += pp * f;
        }
    }
    m.t0 = 2.0 * area / (M * R);
    for (int k = 1; k <= K; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        m.t[kk] = std::pow(map.r0, -k) * 2.0 / (kI * static_cast<double>(M) * static_cast<double>(k) * R) * tsum[kk];
        m.v[kk] = std::pow(map.r0, k) * 2.0 / (kI * static_cast<double>(M) * R) * vsum[kk];
    }
    const double lr = std::log(map.r0);
    cplx pair = 0.0;
    for (int k = 1; k <= std::min(K, N); ++k)
        pair += static_cast<double>(k) * m.t[static_cast<std::size_t>(k)] * m.v[static_cast<std::size_t>(k)];
    m.v0 = (0.5 * m.t0 * m.t0 + 2.0 * R * m.t0 * lr + pair.real()) / R;
    m.v0_quadrature = 2.0 * m.t0 * lr + 2.0 * second / (M * R * R);
    return m;
}

double scaled_change(cplx a, cplx b)
{
    return std::abs(a - b) / std::max(1.0, std::abs(a));
}

// Residual [t0 - T0, Re/Im (t_k - T_k)] and, optionally, its Jacobian with
// respect to [Re u0, Re u1, Im u1, ..., Re uN, Im uN].
void assemble(const ChannelMap &map, const Targets &T, const Grid &g, Eigen::VectorXd &r, Eigen::MatrixXd *J)
{
    const int N = g.N;
    const int n = 2 * N + 1;
    const double R = map.R;
    const Boundary b = boundary(map, g);
    r.setZero(n);
    if (J)
        J->setZero(n, n);

    std::vector<cplx> coef(static_cast<std::size_t>(N + 1));
    for (int k = 1; k <= N; ++k)
        coef[static_cast<std::size_t>(k)] =
            std::pow(map.r0, -k) * 2.0 / (kI * static_cast<double>(g.M) * static_cast<double>(k) * R);
    const double c0 = 2.0 / (g.M * R);

    std::vector<cplx> tk(static_cast<std::size_t>(N + 1));
    std::vector<cplx> Ek(static_cast<std::size_t>(N + 1));
    std::vector<cplx> P(static_cast<std::size_t>(n)), Ps(static_cast<std::size_t>(n));
    double t0 = 0.0;
    for (int j = 0; j < g.M; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const double X = b.Z[jj].real();
        const cplx Zs = b.Zs[jj];
        t0 += c0 * X * Zs.imag();
        const cplx em = std::exp(-b.Z[jj] / R);
        cplx p = 1.0;
        for (int k = 1; k <= N; ++k) {
            p *= em;
            Ek[static_cast<std::size_t>(k)] = p;
            tk[static_cast<std::size_t>(k)] += coef[static_cast<std::size_t>(k)] * p * X * Zs;
        }
        if (!J)
            continue;
        P[0] = 1.0;
        Ps[0] = 0.0;
        for (int m = 1; m <= N; ++m) {
            const cplx e = g.E(j, m);
            P[static_cast<std::size_t>(2 * m - 1)] = e;
            Ps[static_cast<std::size_t>(2 * m - 1)] = cplx(0.0, -m) * e;
            P[static_cast<std::size_t>(2 * m)] = kI * e;
            Ps[static_cast<std::size_t>(2 * m)] = static_cast<double>(m) * e;
        }
        for (int c = 0; c < n; ++c) {
            const auto cc = static_cast<std::size_t>(c);
            (*J)(0, c) += c0 * (P[cc].real() * Zs.imag() + X * Ps[cc].imag());
            for (int k = 1; k <= N; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                const cplx d = coef[kk] * Ek[kk] *
                               (-(static_cast<double>(k) / R) * P[cc] * X * Zs + P[cc].real() * Zs + X * Ps[cc]);
                (*J)(2 * k - 1, c) += d.real();
                (*J)(2 * k, c) += d.imag();
            }
        }
    }
    r(0) = t0 - T.t0;
    for (int k = 1; k <= N; ++k) {
        const cplx d = tk[static_cast<std::size_t>(k)] - T.t[static_cast<std::size_t>(k)];
        r(2 * k - 1) = d.real();
        r(2 * k) = d.imag();
    }
}

void apply_step(ChannelMap &map, const Eigen::VectorXd &delta, double alpha)
{
    map.u[0] += alpha * delta(0);
    for (int m = 1; m <= map.order(); ++m)
        map.u[static_cast<std::size_t>(m)] += alpha * cplx(delta(2 * m - 1), delta(2 * m));
}

double target_scale(const Targets &T)
{
    double s = std::max(1.0, std::abs(T.t0));
    for (const auto &t : T.t)
        s = std::max(s, std::abs(t));
    return s;
}

} // namespace

ChannelMap ChannelMap::straight(double R, double r0, int N, double t0, double gauge_im_u0)
{
    if (N < 0)
        throw std::invalid_argument("ChannelMap::straight: N must be non-negative");
    ChannelMap m{R, r0, std::vector<cplx>(static_cast<std::size_t>(N + 1))};
    m.u[0] = cplx(0.5 * t0, gauge_im_u0);
    return m;
}

cplx eval_map(const ChannelMap &map, cplx W)
{
    const cplx e = std::exp(-W);
    cplx p = 1.0, z = map.R * W;
    for (const auto &u : map.u) {
        z += u * p;
        p *= e;
    }
    return z;
}

cplx eval_map_derivative(const ChannelMap &map, cplx W)
{
    const cplx e = std::exp(-W);
    cplx p = e, z = map.R;
    for (int k = 1; k <= map.order(); ++k) {
        z -= static_cast<double>(k) * map.u[static_cast<std::size_t>(k)] * p;
        p *= e;
    }
    return z;
}

ContourSample sample_contour(const ChannelMap &map, int M)
{
    require_map(map, "sample_contour");
    if (M < 1)
        throw std::invalid_argument("sample_contour: M must be positive");
    const Grid g(M, map.order());
    const Boundary b = boundary(map, g);
    ContourSample s{g.sigma, b.Z, std::vector<cplx>(static_cast<std::size_t>(M))};
    for (int j = 0; j < M; ++j)
        s.dZ[static_cast<std::size_t>(j)] = -kI * b.Zs[static_cast<std::size_t>(j)];
    return s;
}

void SolveConfig::validate(int N) const
{
    if (!is_power_of_two(M))
        throw std::invalid_argument("SolveConfig: M must be a power of two");
    if (M < 4 * N + 4)
        throw std::invalid_argument("SolveConfig: M must be at least 4N + 4");
    if (!(newton_tol > 0.0))
        throw std::invalid_argument("SolveConfig: newton_tol must be positive");
    if (max_iter < 1)
        throw std::invalid_argument("SolveConfig: max_iter must be positive");
    if (!(dt0 > 0.0) || !(fd_step > 0.0) || !(tau_tol > 0.0) || !(quad_tol > 0.0) || !(cusp_threshold > 0.0))
        throw std::invalid_argument("SolveConfig: dt0, fd_step and tolerances must be positive");
}

MomentSet moments_from_map(const ChannelMap &map, int K, const SolveConfig &cfg)
{
    require_map(map, "moments_from_map");
    if (K < 0)
        throw std::invalid_argument("moments_from_map: K must be non-negative");
    MomentSet m = moments_on_grid(map, K, cfg.M);
    if (cfg.quad_self_test) {
        const MomentSet fine = moments_on_grid(map, K, 2 * cfg.M);
        double worst = std::max(scaled_change(m.t0, fine.t0), scaled_change(m.v0, fine.v0));
        worst = std::max(worst, scaled_change(m.v0_quadrature, fine.v0_quadrature));
        for (int k = 1; k <= K; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            worst = std::max({worst, scaled_change(m.t[kk], fine.t[kk]), scaled_change(m.v[kk], fine.v[kk])});
        }
        if (worst > cfg.quad_tol) {
            std::ostringstream os;
            os << "moments_from_map: doubling M to " << 2 * cfg.M << " changes a moment by " << worst;
            throw ResolutionError(os.str());
        }
    }
    return m;
}

Targets Targets::from_moments(const MomentSet &m, int N)
{
    if (m.max_t_index() < N)
        throw std::invalid_argument("Targets::from_moments: moment set has fewer than N entries");
    Targets T;
    T.t0 = m.t0;
    T.t.assign(m.t.begin(), m.t.begin() + N + 1);
    T.t[0] = 0.0;
    return T;
}

double min_abs_derivative(const ChannelMap &map, int M)
{
    const Grid g(M, map.order());
    const Boundary b = boundary(map, g);
    double mn = INFINITY;
    for (const auto &z : b.Zs)
        mn = std::min(mn, std::abs(z));
    return mn;
}

bool locally_univalent(const ChannelMap &map, int M)
{
    // Z'(W) = R - Σ k u_k zeta^k with zeta = e^{-W}; zeros in the half-strip
    // are zeros of this polynomial in |zeta| < 1, and each one contributes -1
    // to the winding of Z'(i sigma) as sigma increases.
    const Grid g(M, map.order());
    const Boundary b = boundary(map, g);
    double turn = 0.0;
    for (int j = 0; j < M; ++j) {
        const cplx a = b.Zs[static_cast<std::size_t>(j)];
        const cplx c = b.Zs[static_cast<std::size_t>((j + 1) % M)];
        if (!(std::abs(a) > 0.0) || !std::isfinite(a.real()) || !std::isfinite(a.imag()))
            return false;
        const double d = std::arg(c / a);
        if (std::abs(d) > kPi / 2)
            return false; // grid too coarse to resolve the winding
        turn += d;
    }
    return std::lround(turn / (2.0 * kPi)) == 0;
}

SolveResult solve_for_moments(const Targets &targets, const ChannelMap &seed, const SolveConfig &cfg)
{
    require_map(seed, "solve_for_moments");
    const int N = seed.order();
    cfg.validate(N);
    if (static_cast<int>(targets.t.size()) != N + 1)
        throw std::invalid_argument("solve_for_moments: targets must have t_1..t_N matching the seed order");

    SolveResult res;
    res.map = seed;
    res.map.u[0].imag(cfg.gauge_im_u0);
    if (!locally_univalent(res.map, cfg.M))
        throw GeometryError("solve_for_moments: seed map is not locally univalent");

    const Grid g(cfg.M, N);
    const double tol = cfg.newton_tol * target_scale(targets);
    Eigen::VectorXd r, rt;
    Eigen::MatrixXd J, Jt;
    assemble(res.map, targets, g, r, &J);
    double norm = r.lpNorm<Eigen::Infinity>();
    res.history.push_back(norm);

    for (int it = 0; it < cfg.max_iter; ++it) {
        if (norm <= tol) {
            res.iterations = it;
            res.residual = norm;
            return res;
        }
        const Eigen::VectorXd delta = J.fullPivLu().solve(-r);
        if (!delta.allFinite())
            throw ConvergenceError("solve_for_moments: singular Jacobian", res.history);

        double alpha = 1.0;
        int geometry_rejects = 0, tries = 0;
        bool accepted = false;
        for (; tries < 30; ++tries, alpha *= 0.5) {
            ChannelMap trial = res.map;
            apply_step(trial, delta, alpha);
            if (!locally_univalent(trial, cfg.M)) {
                ++geometry_rejects;
                continue;
            }
            assemble(trial, targets, g, rt, &Jt);
            const double nt = rt.lpNorm<Eigen::Infinity>();
            if (std::isfinite(nt) && (nt < norm || nt <= tol)) {
                res.map = std::move(trial);
                r = rt;
                J = Jt;
                norm = nt;
                accepted = true;
                break;
            }
        }
        res.history.push_back(norm);
        if (!accepted) {
            if (geometry_rejects == tries)
                throw GeometryError("solve_for_moments: every damped Newton step loses local univalence");
            throw ConvergenceError("solve_for_moments: line search failed", res.history);
        }
    }
    if (norm <= tol) {
        res.iterations = cfg.max_iter;
        res.residual = norm;
        return res;
    }
    throw ConvergenceError("solve_for_moments: max_iter exceeded", res.history);
}

SolveResult solve_cold(const Targets &targets, double R, double r0, const SolveConfig &cfg)
{
    const int N = static_cast<int>(targets.t.size()) - 1;
    if (N < 0)
        throw std::invalid_argument("solve_cold: empty targets");
    auto attempt = [&](int stages) {
        ChannelMap map = ChannelMap::straight(R, r0, N, targets.t0, cfg.gauge_im_u0);
        SolveResult res;
        for (int s = 0; s <= stages; ++s) {
            Targets T = targets;
            for (auto &t : T.t)
                t *= static_cast<double>(s) / stages;
            res = solve_for_moments(T, map, cfg);
            map = res.map;
        }
        return res;
    };
    try {
        return attempt(4);
    } catch (const ConvergenceError &) {
    } catch (const GeometryError &) {
    }
    return attempt(32);
}

TauValue tau_from_moments(const ChannelMap &map, const MomentSet &m, const SolveConfig &cfg)
{
    const int N = map.order();
    if (m.max_v_index() < 2 * N || m.max_t_index() < N)
        throw std::invalid_argument("tau_from_moments: need t_k for k <= N and v_k for k <= 2N");
    const double R = map.R;
    const double lr = std::log(map.r0);
    auto t = [&](int k) { return m.t[static_cast<std::size_t>(k)]; };
    auto v = [&](int k) { return m.v[static_cast<std::size_t>(k)]; };

    cplx single = 0.0, dbl = 0.0;
    for (int k = 1; k <= N; ++k)
        single += t(k) * v(k);
    for (int k = 1; k <= N; ++k)
        for (int l = 1; l <= N; ++l) {
            dbl += static_cast<double>(k * l) * t(k) * t(l) * v(k + l);
            if (k + l <= N)
                dbl += static_cast<double>(k + l) * t(k + l) * v(k) * v(l);
        }

    TauValue tv;
    const double t0 = m.t0;
    tv.F0 = t0 * t0 * t0 / (6.0 * R) + t0 * t0 * lr + single.real() - dbl.real() / (4.0 * R);
    cplx ksingle = 0.0;
    for (int k = 1; k <= N; ++k)
        ksingle += static_cast<double>(k) * t(k) * v(k);
    tv.max_imag = std::max(std::abs(ksingle.imag()), std::abs(dbl.imag()) / (4.0 * R));
    tv.pairing_imag = single.imag();

    // Area integral of X^2 over the region between X = 0 and the interface,
    // reduced to the contour integral of X^3/3 dY.
    const Grid g(cfg.M, N);
    const Boundary b = boundary(map, g);
    double cube = 0.0;
    for (int j = 0; j < cfg.M; ++j) {
        const double X = b.Z[static_cast<std::size_t>(j)].real();
        cube += X * X * X * b.Zs[static_cast<std::size_t>(j)].imag();
    }
    cube *= 2.0 * kPi / cfg.M;
    const double twoF = -(2.0 / (kPi * R * R)) * cube / 3.0 + t0 * m.v0_quadrature + 2.0 * single.real();
    tv.F0_crosscheck = 0.5 * twoF;
    tv.discrepancy = std::abs(tv.F0 - tv.F0_crosscheck) / std::max(std::abs(tv.F0), 1e-8 * R * R);
    return tv;
}

TauValue tau_from_map(const ChannelMap &map, const SolveConfig &cfg)
{
    require_map(map, "tau_from_map");
    const MomentSet m = moments_from_map(map, 2 * map.order(), cfg);
    TauValue tv = tau_from_moments(map, m, cfg);
    if (tv.discrepancy > cfg.tau_tol) {
        std::ostringstream os;
        os << "tau_from_map: the two tau routes differ by relative " << tv.discrepancy << " (F0 = " << tv.F0
           << ", cross-check = " << tv.F0_crosscheck << ")";
        throw ConsistencyError(os.str());
    }
    return tv;
}

namespace {

TrajectoryStep make_step(const ChannelMap &map, double t0, const SolveConfig &cfg)
{
    TrajectoryStep s;
    s.t0 = t0;
    s.map = map;
    s.M = cfg.M;
    s.moments = moments_on_grid(map, 2 * map.order(), cfg.M);
    s.tau = tau_from_moments(map, s.moments, cfg);
    s.min_abs_zprime = min_abs_derivative(map, cfg.M);
    if (s.tau.discrepancy > cfg.tau_tol)
        s.flags.emplace_back("tau_inconsistent");
    return s;
}

constexpr int kMaxGrid = 1 << 16;

// Newton solve whose result is re-checked on the doubled grid; M is doubled
// until the targets are still met there. The trapezoidal error decays like
// rho^M with rho the distance-to-singularity factor of the map, so M must
// grow as the interface approaches a cusp.
ChannelMap solve_resolved(const Targets &T, ChannelMap seed, SolveConfig &c)
{
    const int N = seed.order();
    const double scale = target_scale(T);
    for (;;) {
        ChannelMap map = solve_for_moments(T, seed, c).map;
        const MomentSet fine = moments_on_grid(map, N, 2 * c.M);
        double err = std::abs(fine.t0 - T.t0);
        for (int k = 1; k <= N; ++k)
            err = std::max(err, std::abs(fine.t[static_cast<std::size_t>(k)] - T.t[static_cast<std::size_t>(k)]));
        if (err <= std::max(c.quad_tol, 10.0 * c.newton_tol) * scale)
            return map;
        if (2 * c.M > kMaxGrid)
            throw ResolutionError("evolve: quadrature unresolved at the largest grid");
        c.M *= 2;
        seed = std::move(map);
    }
}

} // namespace

Trajectory evolve(const std::vector<cplx> &targets_tk, double t0_start, double t0_end, double R, double r0,
                  const SolveConfig &cfg)
{
    const int N = static_cast<int>(targets_tk.size()) - 1;
    if (N < 0)
        throw std::invalid_argument("evolve: targets must contain the unused entry t[0]");
    cfg.validate(N);
    if (!(t0_end >= t0_start))
        throw std::invalid_argument("evolve: t0_end must not precede t0_start");

    Trajectory traj;
    Targets T{t0_start, targets_tk};
    T.t[0] = 0.0;
    SolveConfig cur_cfg = cfg;
    {
        const SolveResult first = solve_cold(T, R, r0, cfg);
        const ChannelMap map = solve_resolved(T, first.map, cur_cfg);
        traj.steps.push_back(make_step(map, t0_start, cur_cfg));
    }

    auto cusp_reached = [&](const TrajectoryStep &s) { return s.min_abs_zprime < cfg.cusp_threshold * R; };
    if (cusp_reached(traj.steps.back())) {
        traj.singular = true;
        traj.cusp_time = t0_start;
        traj.steps.back().flags.emplace_back("singular");
        return traj;
    }

    const double span = t0_end - t0_start;
    const auto n_grid = static_cast<long>(std::floor(span / cfg.dt0 + 1e-9));
    std::vector<double> goals;
    for (long n = 1; n <= n_grid; ++n)
        goals.push_back(t0_start + static_cast<double>(n) * cfg.dt0);
    if (goals.empty() ? span > 0.0 : t0_end - goals.back() > 1e-12 * std::max(1.0, std::abs(t0_end)))
        goals.push_back(t0_end);

    const double min_step = cfg.dt0 * std::ldexp(1.0, -40);
    double h = cfg.dt0;
    std::size_t gi = 0;
    while (gi < goals.size()) {
        const TrajectoryStep &cur = traj.steps.back();
        const double goal = goals[gi];
        double t_try = cur.t0 + h;
        const bool on_grid = t_try >= goal - 1e-12 * cfg.dt0;
        if (on_grid)
            t_try = goal;

        std::vector<ChannelMap> seeds;
        if (traj.steps.size() >= 2) {
            const TrajectoryStep &prev = traj.steps[traj.steps.size() - 2];
            ChannelMap pred = cur.map;
            const double w = (t_try - cur.t0) / (cur.t0 - prev.t0);
            for (std::size_t k = 0; k < pred.u.size(); ++k)
                pred.u[k] += w * (cur.map.u[k] - prev.map.u[k]);
            seeds.push_back(std::move(pred));
        }
        seeds.push_back(cur.map);

        Targets Tn = T;
        Tn.t0 = t_try;
        bool ok = false;
        ChannelMap next;
        SolveConfig trial_cfg = cur_cfg;
        std::string last_error;
        for (const auto &seed : seeds) {
            trial_cfg = cur_cfg;
            try {
                next = solve_resolved(Tn, seed, trial_cfg);
                ok = true;
                break;
            } catch (const ConvergenceError &e) {
                last_error = e.what();
            } catch (const GeometryError &e) {
                last_error = e.what();
            } catch (const ResolutionError &e) {
                last_error = e.what();
            }
        }

        if (!ok) {
            h *= 0.5;
            if (h < min_step) {
                // Step collapse: a cusp if the interface was already pinching.
                if (cur.min_abs_zprime < 0.05 * R) {
                    traj.singular = true;
                    traj.cusp_time = cur.t0;
                    traj.steps.back().flags.emplace_back("singular");
                } else {
                    traj.failed = true;
                    traj.failure = "Newton failure at t0 = " + std::to_string(t_try) + ": " + last_error;
                }
                return traj;
            }
            continue;
        }

        cur_cfg = trial_cfg;
        TrajectoryStep step = make_step(next, t_try, cur_cfg);
        if (!on_grid)
            step.flags.emplace_back("refined");
        const bool cusp = cusp_reached(step);
        if (cusp)
            step.flags.emplace_back("singular");
        traj.steps.push_back(std::move(step));
        if (cusp) {
            traj.singular = true;
            traj.cusp_time = t_try;
            return traj;
        }
        if (on_grid) {
            ++gi;
            h = cfg.dt0;
        }
    }
    return traj;
}

const CheckEntry *GradientReport::find(const std::string &name) const
{
    for (const auto &e : entries)
        if (e.name == name)
            return &e;
    return nullptr;
}

namespace {

struct Problem {
    Targets T;
    double R;
    double r0;
};

// F0 and its quadrature moments after re-solving from `seed`.
struct Solved {
    double F0;
    MomentSet m;
    ChannelMap map;
};

Solved solve_point(const Problem &p, const ChannelMap &seed, const SolveConfig &cfg)
{
    ChannelMap s = seed;
    s.R = p.R;
    s.r0 = p.r0;
    const SolveResult res = solve_for_moments(p.T, s, cfg);
    const MomentSet m = moments_on_grid(res.map, 2 * res.map.order(), cfg.M);
    return {tau_from_moments(res.map, m, cfg).F0, m, res.map};
}

// Central difference with Richardson extrapolation from steps h and 2h. The
// two raw estimates must agree to 1e-2 of the derivative scale.
template <typename F>
cplx fd_derivative(F &&f, double h, double scale, const char *what)
{
    const cplx d1 = (f(h) - f(-h)) / (2.0 * h);
    const cplx d2 = (f(2.0 * h) - f(-2.0 * h)) / (4.0 * h);
    if (std::abs(d1 - d2) > 1e-2 * std::max(std::abs(d1), scale)) {
        std::ostringstream os;
        os << "check_gradients: finite-difference step " << h << " too large for " << what
           << " (estimates " << std::abs(d1) << " and " << std::abs(d2) << ")";
        throw ResolutionError(os.str());
    }
    return (4.0 * d1 - d2) / 3.0;
}

double rel(double a, double b, double floor)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

} // namespace

GradientReport check_gradients(const Targets &targets, double R, double r0, const SolveConfig &cfg, int k_max)
{
    const int N = static_cast<int>(targets.t.size()) - 1;
    if (N < 1)
        throw std::invalid_argument("check_gradients: need N >= 1");
    if (k_max < 0 || k_max > N)
        k_max = N;
    const Problem base{targets, R, r0};
    const SolveResult b0 = solve_cold(targets, R, r0, cfg);
    const Solved b = solve_point(base, b0.map, cfg);
    const double t0 = targets.t0;
    const double lr = std::log(r0);

    double fscale = std::max(std::abs(b.F0), 1e-6 * R * R);
    double tscale = 0.01 * R;
    for (int k = 1; k <= N; ++k)
        tscale = std::max(tscale, std::abs(targets.t[static_cast<std::size_t>(k)]));
    const double h0 = cfg.fd_step * R;
    const double hk = cfg.fd_step * tscale;
    const double dscale = 1e-6 * fscale / tscale;

    auto F_t0 = [&](double s) {
        Problem p = base;
        p.T.t0 += s;
        return cplx(solve_point(p, b.map, cfg).F0);
    };
    auto F_tk = [&](int k, cplx dir) {
        return [&, k, dir](double s) {
            Problem p = base;
            p.T.t[static_cast<std::size_t>(k)] += s * dir;
            return cplx(solve_point(p, b.map, cfg).F0);
        };
    };
    auto F_R = [&](double s) {
        Problem p = base;
        p.R += s;
        return cplx(solve_point(p, b.map, cfg).F0);
    };

    GradientReport rep;
    auto add = [&](std::string name, double lhs, double rhs, double floor) {
        rep.entries.push_back({std::move(name), lhs, rhs, rel(lhs, rhs, floor)});
        rep.max_residual = std::max(rep.max_residual, rep.entries.back().residual);
    };

    const double dF_dt0 = fd_derivative(F_t0, h0, fscale / R, "t0").real();
    add("v0", dF_dt0, b.m.v0, dscale * tscale / R);

    std::vector<cplx> dF(static_cast<std::size_t>(N + 1));
    double vscale = 0.0;
    for (int k = 1; k <= k_max; ++k)
        vscale = std::max(vscale, std::abs(b.m.v[static_cast<std::size_t>(k)]));
    for (int k = 1; k <= N; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const bool needed = k <= k_max || std::abs(targets.t[kk]) > 0.0;
        if (!needed)
            continue;
        const cplx dx = fd_derivative(F_tk(k, 1.0), hk, fscale / tscale, "t_k");
        const cplx dy = fd_derivative(F_tk(k, kI), hk, fscale / tscale, "t_k");
        // Wirtinger derivative of the real function F0.
        dF[kk] = 0.5 * (dx.real() - kI * dy.real());
        if (k <= k_max) {
            const double floor = std::max(1e-6 * vscale, dscale);
            rep.entries.push_back({"v" + std::to_string(k) + ".re", dF[kk].real(), b.m.v[kk].real(), 0.0});
            rep.entries.back().residual = std::abs(dF[kk] - b.m.v[kk]) / std::max(std::abs(b.m.v[kk]), floor);
            rep.max_residual = std::max(rep.max_residual, rep.entries.back().residual);
            rep.entries.push_back({"v" + std::to_string(k) + ".im", dF[kk].imag(), b.m.v[kk].imag(),
                                   rep.entries.back().residual});
        }
    }

    // dF0/dt0 = t0^2/2R + 2 t0 log r0 + (1/R) Σ k t_k dF0/dt_k
    cplx kt = 0.0, tt = 0.0;
    for (int k = 1; k <= N; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        kt += static_cast<double>(k) * targets.t[kk] * dF[kk];
        tt += targets.t[kk] * dF[kk];
    }
    add("v02", dF_dt0, t0 * t0 / (2.0 * R) + 2.0 * t0 * lr + kt.real() / R, dscale * tscale / R);

    const double dF_dR = fd_derivative(F_R, cfg.fd_step * R, fscale / R, "R").real();
    add("tau3", 2.0 * b.F0, R * dF_dR + t0 * dF_dt0 + 2.0 * tt.real(), 1e-6 * fscale);

    cplx ktv = 0.0, dbl = 0.0;
    auto t = [&](int k) { return b.m.t[static_cast<std::size_t>(k)]; };
    auto v = [&](int k) { return b.m.v[static_cast<std::size_t>(k)]; };
    for (int k = 1; k <= N; ++k) {
        ktv += static_cast<double>(k) * t(k) * v(k);
        for (int l = 1; l <= N; ++l) {
            dbl += static_cast<double>(k * l) * t(k) * t(l) * v(k + l);
            if (k + l <= N)
                dbl += static_cast<double>(k + l) * t(k + l) * v(k) * v(l);
        }
    }
    add("tau4", -R * R * dF_dR, t0 * t0 * t0 / 6.0 + t0 * ktv.real() + 0.5 * dbl.real(), 1e-6 * fscale * R);
    return rep;
}

DarcyReport check_darcy(const Trajectory &traj, const SolveConfig &cfg, double t0_min, double t0_max)
{
    std::vector<const TrajectoryStep *> steps;
    for (const auto &s : traj.steps)
        steps.push_back(&s);
    if (steps.size() < 3)
        throw std::invalid_argument("check_darcy: trajectory needs at least 3 steps");

    const int M = cfg.M;
    auto measure = [&](std::size_t stride, int &used) {
        double worst = 0.0;
        used = 0;
        std::vector<std::vector<cplx>> Z(steps.size());
        auto contour = [&](std::size_t i) -> const std::vector<cplx> & {
            if (Z[i].empty())
                Z[i] = sample_contour(steps[i]->map, M).Z;
            return Z[i];
        };
        for (std::size_t i = stride; i + stride < steps.size(); i += stride) {
            const TrajectoryStep &s = *steps[i];
            if (s.t0 < t0_min || s.t0 > t0_max)
                continue;
            const double h1 = s.t0 - steps[i - stride]->t0;
            const double h2 = steps[i + stride]->t0 - s.t0;
            const auto &Zm = contour(i - stride);
            const auto &Zp = contour(i + stride);
            const ContourSample c = sample_contour(s.map, M);
            for (int j = 0; j < M; ++j) {
                const auto jj = static_cast<std::size_t>(j);
                // Second-order derivative on a possibly nonuniform stencil.
                const cplx dZdt = (h1 * h1 * Zp[jj] - h2 * h2 * Zm[jj] + (h2 * h2 - h1 * h1) * c.Z[jj]) /
                                  (h1 * h2 * (h1 + h2));
                const cplx Zs = kI * c.dZ[jj];
                const double Vn = -std::imag(std::conj(Zs) * dZdt) / std::abs(Zs);
                const double Vth = 0.5 * s.map.R / std::abs(c.dZ[jj]);
                worst = std::max(worst, std::abs(Vn - Vth) / Vth);
            }
            ++used;
        }
        return worst;
    };

    DarcyReport rep;
    rep.max_rel_deviation = measure(1, rep.steps_used);
    if (rep.steps_used == 0)
        throw std::invalid_argument("check_darcy: no interior steps inside the requested window");
    int coarse_used = 0;
    rep.coarse_rel_deviation = measure(2, coarse_used);
    if (coarse_used > 0 && rep.max_rel_deviation > 1e-8 && rep.coarse_rel_deviation < 2.0 * rep.max_rel_deviation) {
        std::ostringstream os;
        os << "check_darcy: deviation " << rep.max_rel_deviation << " does not shrink under refinement (coarse "
           << rep.coarse_rel_deviation << ")";
        throw ResolutionError(os.str());
    }
    return rep;
}

ReconstructionReport check_map_reconstruction(const ChannelMap &map, const SolveConfig &cfg,
                                              const std::vector<double> &xis)
{
    require_map(map, "check_map_reconstruction");
    const int N = map.order();
    const int K = 2 * N;
    const MomentSet m = moments_on_grid(map, N, cfg.M);
    const Targets T = Targets::from_moments(m, N);
    const double R = map.R;
    const double h = cfg.fd_step * R;

    std::vector<MomentSet> ms;
    for (const double s : {-2.0, -1.0, 1.0, 2.0}) {
        Targets Ts = T;
        Ts.t0 += s * h;
        const SolveResult res = solve_for_moments(Ts, map, cfg);
        ms.push_back(moments_on_grid(res.map, K, cfg.M));
    }
    // Fourth-order central first derivative in t0.
    auto d = [&](auto get) { return (get(ms[0]) - 8.0 * get(ms[1]) + 8.0 * get(ms[2]) - get(ms[3])) / (12.0 * h); };
    ReconstructionReport rep;
    rep.d2F0_dt0 = d([](const MomentSet &x) { return x.v0; });
    std::vector<cplx> dv(static_cast<std::size_t>(K + 1));
    for (int k = 1; k <= K; ++k)
        dv[static_cast<std::size_t>(k)] = d([k](const MomentSet &x) { return x.v[static_cast<std::size_t>(k)]; });

    // The formula fixes the imaginary constant of W; compare with the
    // preimage in the gauge Im u0 = 0.
    const cplx shift{0.0, map.u[0].imag() / R};
    const double lr = std::log(map.r0);
    auto deviation = [&](cplx W, double &tail) {
        const cplx Z = eval_map(map, W);
        const cplx e = std::exp(-Z / R);
        cplx Wr = Z / R + lr - 0.5 * rep.d2F0_dt0;
        cplx p = 1.0, rest = 0.0;
        for (int k = 1; k <= K; ++k) {
            p *= e;
            const cplx term = std::pow(map.r0, -k) / k * p * dv[static_cast<std::size_t>(k)];
            if (k <= N)
                Wr -= term;
            else
                rest += term;
        }
        tail = std::abs(rest);
        return std::abs(Wr - (W + shift));
    };

    const Grid g(cfg.M, 0);
    for (const double xi : xis)
        for (const double s : g.sigma) {
            double tail = 0.0;
            rep.max_dev_interior = std::max(rep.max_dev_interior, deviation(cplx(xi, s), tail));
            rep.tail_estimate = std::max(rep.tail_estimate, tail);
        }
    for (const double s : g.sigma) {
        double tail = 0.0;
        rep.max_dev_boundary = std::max(rep.max_dev_boundary, deviation(cplx(0.0, s), tail));
    }
    return rep;
}

nlohmann::json step_to_json(const TrajectoryStep &step)
{
    nlohmann::json j;
    j["t0"] = step.t0;
    auto &ure = j["u_re"] = nlohmann::json::array();
    auto &uim = j["u_im"] = nlohmann::json::array();
    for (const auto &u : step.map.u) {
        ure.push_back(u.real());
        uim.push_back(u.imag());
    }
    const int N = step.map.order();
    auto pairs = [](const std::vector<cplx> &x, int upto) {
        auto a = nlohmann::json::array();
        for (int k = 1; k <= upto && k < static_cast<int>(x.size()); ++k)
            a.push_back({x[static_cast<std::size_t>(k)].real(), x[static_cast<std::size_t>(k)].imag()});
        return a;
    };
    j["t_k"] = pairs(step.moments.t, N);
    j["v_k"] = pairs(step.moments.v, 2 * N);
    j["v0"] = step.moments.v0;
    j["F0"] = step.tau.F0;
    j["F0_crosscheck"] = step.tau.F0_crosscheck;
    j["min_abs_Zprime"] = step.min_abs_zprime;
    j["flags"] = step.flags;
    return j;
}

std::string contour_csv(const std::vector<TrajectoryStep> &steps, int M, bool header)
{
    std::string out;
    if (header)
        out += "t0,sigma,X,Y\n";
    char buf[128];
    for (const auto &s : steps) {
        const ContourSample c = sample_contour(s.map, M);
        for (int j = 0; j < M; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.t0, c.sigma[jj], c.Z[jj].real(),
                          c.Z[jj].imag());
            out += buf;
        }
    }
    return out;
}

} // namespace lgtau::lg
