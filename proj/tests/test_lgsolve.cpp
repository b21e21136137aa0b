#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "lgtau/errors.hpp"
#include "lgtau/lgsolve.hpp"
#include "lgtau/trochoid.hpp"

using namespace lgtau;
using lg::cplx;

namespace {

lg::SolveConfig small_config()
{
    lg::SolveConfig cfg;
    cfg.M = 128;
    return cfg;
}

lg::Targets trochoid_targets(const trochoid::Params &p, double t0, int N)
{
    lg::Targets T;
    T.t0 = t0;
    T.t.assign(static_cast<std::size_t>(N + 1), 0.0);
    T.t[1] = p.t1();
    return T;
}

lg::Targets general_targets(int N)
{
    lg::Targets T;
    T.t0 = 0.2;
    T.t.assign(static_cast<std::size_t>(N + 1), 0.0);
    T.t[1] = 0.3;
    T.t[2] = {0.01, -0.005};
    T.t[3] = {0.0, 0.003};
    return T;
}

} // namespace

TEST_CASE("configuration validation")
{
    lg::SolveConfig cfg;
    CHECK_NOTHROW(cfg.validate(12));
    cfg.M = 500;
    CHECK_THROWS_AS(cfg.validate(12), std::invalid_argument);
    cfg.M = 32;
    CHECK_THROWS_AS(cfg.validate(12), std::invalid_argument);
    cfg = {};
    cfg.dt0 = 0.0;
    CHECK_THROWS_AS(cfg.validate(12), std::invalid_argument);
}

TEST_CASE("map derivative matches a finite difference")
{
    lg::ChannelMap m{1.3, 1.0, {{0.2, 0.1}, {0.3, -0.1}, {0.02, 0.01}}};
    const cplx W(0.4, 1.1), h(1e-6, 0.0);
    const cplx fd = (lg::eval_map(m, W + h) - lg::eval_map(m, W - h)) / (2.0 * h);
    CHECK(std::abs(fd - lg::eval_map_derivative(m, W)) < 1e-8);
    const auto s = lg::sample_contour(m, 16);
    CHECK(s.Z.size() == 16);
    CHECK(std::abs(s.Z[3] - lg::eval_map(m, cplx(0.0, s.sigma[3]))) < 1e-15);
}

TEST_CASE("straight section moments are exact")
{
    const double R = 1.5, r0 = 1.2, t0 = 0.7;
    const auto map = lg::ChannelMap::straight(R, r0, 4, t0);
    const auto cfg = small_config();
    const auto m = lg::moments_from_map(map, 8, cfg);
    CHECK(m.t0 == doctest::Approx(t0).epsilon(1e-14));
    for (int k = 1; k <= 8; ++k) {
        CHECK(std::abs(m.t[static_cast<std::size_t>(k)]) < 1e-14);
        CHECK(std::abs(m.v[static_cast<std::size_t>(k)]) < 1e-14);
    }
    const double v0 = t0 * t0 / (2 * R) + 2 * t0 * std::log(r0);
    CHECK(m.v0 == doctest::Approx(v0).epsilon(1e-13));
    CHECK(m.v0_quadrature == doctest::Approx(v0).epsilon(1e-12));
    const auto tau = lg::tau_from_map(map, cfg);
    CHECK(tau.F0 == doctest::Approx(t0 * t0 * t0 / (6 * R) + t0 * t0 * std::log(r0)).epsilon(1e-13));
    CHECK(tau.discrepancy < 1e-12);
}

TEST_CASE("trochoid targets recover the exact map")
{
    const trochoid::Params p{1.0, 1.0, 0.3, 0.0};
    const double t0 = trochoid::time_of_lambda(p, 0.4);
    const auto cfg = small_config();
    const auto res = lg::solve_cold(trochoid_targets(p, t0, 6), p.R, p.r0, cfg);
    const auto exact = trochoid::map_coefficients(p, t0);
    CHECK(std::abs(res.map.u[0] - exact.u0) < 1e-12);
    CHECK(std::abs(res.map.u[1] - exact.u1) < 1e-12);
    for (int k = 2; k <= 6; ++k)
        CHECK(std::abs(res.map.u[static_cast<std::size_t>(k)]) < 1e-12);
    CHECK(res.residual < 1e-12);
    CHECK_FALSE(res.history.empty());

    const auto tau = lg::tau_from_map(res.map, cfg);
    CHECK(std::abs(tau.F0 - trochoid::tau(p, t0)) < 1e-11 * std::abs(trochoid::tau(p, t0)));

    const auto m = lg::moments_from_map(res.map, 2, cfg);
    const auto om = trochoid::moments(p, t0);
    CHECK(std::abs(m.v[1] - om.v1) < 1e-12);
    CHECK(std::abs(m.v[2] - om.v2) < 1e-12);
    CHECK(m.v0 == doctest::Approx(om.v0).epsilon(1e-12));
}

TEST_CASE("general targets: the solution reproduces its moments")
{
    const int N = 6;
    const auto cfg = small_config();
    const auto T = general_targets(N);
    const auto res = lg::solve_cold(T, 1.0, 1.0, cfg);
    const auto m = lg::moments_from_map(res.map, 2 * N, cfg);
    CHECK(m.t0 == doctest::Approx(T.t0).epsilon(1e-12));
    for (int k = 1; k <= N; ++k)
        CHECK(std::abs(m.t[static_cast<std::size_t>(k)] - T.t[static_cast<std::size_t>(k)]) < 1e-12);
    CHECK(res.map.u[0].imag() == 0.0);
    CHECK(lg::locally_univalent(res.map, cfg.M));

    const auto tau = lg::tau_from_map(res.map, cfg);
    CHECK(tau.discrepancy < 1e-6);
    CHECK(tau.max_imag < 1e-12);
    // Only the real part of Σ t_k v_k is constrained.
    CHECK(std::abs(tau.pairing_imag) > 1e-6);
    CHECK(m.v0 == doctest::Approx(m.v0_quadrature).epsilon(1e-10));
}

TEST_CASE("gauge shifts the map along the channel")
{
    const int N = 6;
    auto cfg = small_config();
    const auto T = general_targets(N);
    const auto a = lg::solve_cold(T, 1.0, 1.0, cfg);
    cfg.gauge_im_u0 = 0.5;
    const auto b = lg::solve_cold(T, 1.0, 1.0, cfg);
    CHECK(b.map.u[0].imag() == 0.5);
    // W -> W + i s/R leaves the interface and the moments unchanged.
    const auto ma = lg::moments_from_map(a.map, N, cfg);
    const auto mb = lg::moments_from_map(b.map, N, cfg);
    for (int k = 1; k <= N; ++k)
        CHECK(std::abs(ma.t[static_cast<std::size_t>(k)] - mb.t[static_cast<std::size_t>(k)]) < 1e-12);
    CHECK(lg::tau_from_map(a.map, cfg).F0 == doctest::Approx(lg::tau_from_map(b.map, cfg).F0).epsilon(1e-12));
}

TEST_CASE("failure modes")
{
    auto cfg = small_config();
    const int N = 6;
    SUBCASE("non-univalent seed")
    {
        auto seed = lg::ChannelMap::straight(1.0, 1.0, N, 0.5);
        seed.u[1] = 2.0;
        CHECK_THROWS_AS(lg::solve_for_moments(general_targets(N), seed, cfg), GeometryError);
    }
    SUBCASE("iteration cap")
    {
        cfg.max_iter = 1;
        const auto seed = lg::ChannelMap::straight(1.0, 1.0, N, 0.2);
        try {
            lg::solve_for_moments(general_targets(N), seed, cfg);
            FAIL("expected ConvergenceError");
        } catch (const ConvergenceError &e) {
            CHECK_FALSE(e.history().empty());
        }
    }
    SUBCASE("target past the singularity")
    {
        const trochoid::Params p{1.0, 1.0, 0.3, 0.0};
        const auto T = trochoid_targets(p, trochoid::critical_time(p) + 0.2, N);
        CHECK_THROWS(lg::solve_cold(T, 1.0, 1.0, cfg));
    }
    SUBCASE("quadrature self-test")
    {
        const trochoid::Params p{1.0, 1.0, 0.3, 0.0};
        const auto map_near_cusp = [&] {
            const auto c = trochoid::map_coefficients(p, trochoid::time_of_lambda(p, 0.97));
            lg::ChannelMap m = lg::ChannelMap::straight(1.0, 1.0, N, 0.0);
            m.u[0] = c.u0;
            m.u[1] = c.u1;
            return m;
        }();
        cfg.M = 32;
        cfg.quad_self_test = true;
        CHECK_THROWS_AS(lg::moments_from_map(map_near_cusp, 2 * N, cfg), ResolutionError);
        cfg.M = 1024;
        CHECK_NOTHROW(lg::moments_from_map(map_near_cusp, 2 * N, cfg));
    }
}

TEST_CASE("uniform translation obeys Darcy's law")
{
    auto cfg = small_config();
    cfg.dt0 = 0.05;
    const std::vector<cplx> t(7, 0.0);
    const auto traj = lg::evolve(t, 0.0, 1.0, 1.0, 1.0, cfg);
    REQUIRE_FALSE(traj.failed);
    CHECK_FALSE(traj.singular);
    CHECK(traj.steps.size() == 21);
    for (const auto &s : traj.steps)
        CHECK(s.map.u[0].real() == doctest::Approx(s.t0 / 2).epsilon(1e-12));
    const auto d = lg::check_darcy(traj, cfg);
    CHECK(d.max_rel_deviation < 1e-10);
}

TEST_CASE("short trochoid trajectory conserves the moments")
{
    const trochoid::Params p{1.0, 1.0, 0.3, 0.0};
    auto cfg = small_config();
    cfg.dt0 = 0.01;
    std::vector<cplx> t(7, 0.0);
    t[1] = p.t1();
    const auto traj = lg::evolve(t, 0.0, 0.3, p.R, p.r0, cfg);
    REQUIRE_FALSE(traj.failed);
    for (const auto &s : traj.steps) {
        for (int k = 1; k <= 6; ++k)
            CHECK(std::abs(s.moments.t[static_cast<std::size_t>(k)] - t[static_cast<std::size_t>(k)]) < 1e-11);
        CHECK(s.map.u[0].imag() == 0.0);
        CHECK(std::abs(s.map.u[1] - trochoid::map_coefficients(p, s.t0).u1) < 1e-10);
    }
    const auto j = lg::step_to_json(traj.steps.back());
    for (const char *key : {"t0", "u_re", "u_im", "t_k", "v_k", "F0", "F0_crosscheck", "min_abs_Zprime", "flags"})
        CHECK(j.contains(key));
    const std::string csv = lg::contour_csv({traj.steps.front()}, 8);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("evolution stops at the cusp")
{
    const trochoid::Params p{1.0, 1.0, 0.6, 0.0};
    const double tc = trochoid::critical_time(p);
    auto cfg = small_config();
    cfg.M = 256;
    cfg.dt0 = 1e-2;
    std::vector<cplx> t(7, 0.0);
    t[1] = p.t1();
    const auto traj = lg::evolve(t, 0.0, tc + 0.2, p.R, p.r0, cfg);
    CHECK(traj.singular);
    CHECK(std::abs(traj.cusp_time - tc) <= 2 * cfg.dt0);
}

TEST_CASE("gradients of the tau function")
{
    auto cfg = small_config();
    const auto T = general_targets(6);
    const auto report = lg::check_gradients(T, 1.0, 1.0, cfg, 2);
    CHECK(report.max_residual < 1e-5);
    for (const char *name : {"v0", "v1.re", "v1.im", "v2.re", "v2.im", "v02"})
        CHECK(report.find(name) != nullptr);
    CHECK(report.find("nope") == nullptr);
}

TEST_CASE("map reconstruction from tau derivatives")
{
    const trochoid::Params p{1.0, 1.0, 0.3, 0.0};
    auto cfg = small_config();
    const double t0 = trochoid::time_of_lambda(p, 0.4);
    const auto res = lg::solve_cold(trochoid_targets(p, t0, 6), p.R, p.r0, cfg);
    const auto r = lg::check_map_reconstruction(res.map, cfg);
    CHECK(r.max_dev_interior < 1e-4);
    CHECK(r.tail_estimate < 1e-4);
    // d^2F0/dt0^2 = dv0/dt0 from the closed-form v0.
    const double h = 1e-4;
    const double exact = (trochoid::moments(p, t0 + h).v0 - trochoid::moments(p, t0 - h).v0) / (2 * h);
    CHECK(r.d2F0_dt0 == doctest::Approx(exact).epsilon(1e-6));
}
