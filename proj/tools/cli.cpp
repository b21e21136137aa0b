#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lgtau/config.hpp"
#include "lgtau/errors.hpp"
#include "lgtau/genfun.hpp"
#include "lgtau/hurwitz.hpp"
#include "lgtau/lgsolve.hpp"
#include "lgtau/manifest.hpp"
#include "lgtau/trochoid.hpp"

namespace lgtau::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using cplx = std::complex<double>;

namespace {

struct Globals {
    std::string config_path;
    std::string out_dir = "lgtau_out";
    double budget = 1e9;
    bool long_mode = false;
};

// Collects outputs and writes them together with the manifest.
class Writer {
public:
    Writer(const Globals &g, std::string command, std::string args)
        : dir_(g.out_dir)
    {
        manifest_.command = std::move(command);
        manifest_.input_hashes["arguments"] = fnv1a64_hex(args);
    }

    void config(const json &snapshot, const std::string &text)
    {
        manifest_.config = snapshot;
        manifest_.input_hashes["config"] = fnv1a64_hex(text);
    }

    void file(const std::string &name, const std::string &content)
    {
        fs::create_directories(dir_);
        std::ofstream os(dir_ / name, std::ios::binary);
        os << content;
        if (!os)
            throw std::runtime_error("cannot write " + (dir_ / name).string());
        manifest_.outputs.push_back(name);
    }

    void json_file(const std::string &name, const json &j) { file(name, j.dump(2) + "\n"); }

    void finish()
    {
        fs::create_directories(dir_);
        std::ofstream os(dir_ / (manifest_.command + "_manifest.json"), std::ios::binary);
        os << to_json(manifest_).dump(2) << "\n";
    }

private:
    fs::path dir_;
    RunManifest manifest_;
};

json cjson(cplx z)
{
    return json::array({z.real(), z.imag()});
}

double rel_dev(double value, double oracle)
{
    return std::abs(value - oracle) / std::max(std::abs(oracle), 1e-300);
}

json oracle_entry(double value, double oracle)
{
    return {{"value", value}, {"oracle", oracle}, {"rel_deviation", rel_dev(value, oracle)}};
}

json oracle_entry(cplx value, cplx oracle)
{
    return {{"value", cjson(value)},
            {"oracle", cjson(oracle)},
            {"rel_deviation", std::abs(value - oracle) / std::max(std::abs(oracle), 1e-300)}};
}

struct LoadedConfig {
    RunConfig cfg;
    std::string text;
};

LoadedConfig load(const Globals &g)
{
    if (g.config_path.empty())
        throw std::invalid_argument("this command needs --config PATH");
    std::ifstream in(g.config_path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cannot open config " + g.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    LoadedConfig lc{parse_config_string(ss.str()), ss.str()};
    lc.cfg.validate();
    return lc;
}

// Trochoid parameters when the configuration has t_1 as its only nonzero target.
std::optional<trochoid::Params> trochoid_of(const RunConfig &c)
{
    int nonzero = 0;
    for (const auto &[k, v] : c.targets)
        if (v != cplx{})
            ++nonzero;
    const auto it = c.targets.find(1);
    if (nonzero != 1 || it == c.targets.end() || it->second == cplx{})
        return std::nullopt;
    auto p = trochoid::Params::from_t1(c.R, c.r0, it->second);
    if (!(p.kappa < 1.0))
        return std::nullopt;
    return p;
}

bool zero_targets(const RunConfig &c)
{
    for (const auto &[k, v] : c.targets)
        if (v != cplx{})
            return false;
    return true;
}

double straight_tau(const RunConfig &c, double t0)
{
    return t0 * t0 * t0 / (6.0 * c.R) + t0 * t0 * std::log(c.r0);
}

// --- hurwitz ---------------------------------------------------------------

int cmd_hurwitz(const Globals &g, int d_max, int genus, const std::string &args, std::ostream &out)
{
    if (d_max < 1)
        throw std::invalid_argument("--dmax must be at least 1");
    if (d_max >= 5 && !g.long_mode)
        throw std::invalid_argument("d_max >= 5 needs --long");
    HurwitzOptions opts;
    opts.budget = g.budget;
    const HurwitzTable table = hurwitz_table(d_max, genus, opts);
    Writer w(g, "hurwitz", args);
    w.config({{"d_max", d_max}, {"genus", genus}, {"budget", g.budget}}, args);
    json j = {{"d_max", d_max}, {"genus", genus}, {"entries", to_json(table)}};
    w.json_file("hurwitz_table.json", j);
    w.finish();
    out << "hurwitz: " << table.entries.size() << " nonzero entries for d <= " << d_max << ", genus " << genus
        << "\n";
    return ok;
}

// --- check -----------------------------------------------------------------

json violations_json(const std::vector<Violation> &vs)
{
    json a = json::array();
    for (const auto &v : vs)
        a.push_back({{"identity", v.identity},
                     {"z1_power", v.z1_power},
                     {"z2_power", v.z2_power},
                     {"monomial", v.monomial.to_string()},
                     {"lhs", v.lhs.get_str()},
                     {"rhs", v.rhs.get_str()}});
    return a;
}

int cmd_check(const Globals &g, const std::string &identity, int D, std::vector<int> orders, double kappa,
              std::vector<double> lambdas, double h, double tol, const std::string &args, std::ostream &out)
{
    Writer w(g, "check", args);
    json report = {{"identity", identity}};
    bool pass = true;

    if (identity == "toda") {
        const trochoid::Params p{1.0, 1.0, kappa, 0.0};
        p.validate();
        json rows = json::array();
        for (const double lam : lambdas) {
            const double t0 = trochoid::time_of_lambda(p, lam);
            const double r = trochoid::check_first_toda(p, t0, h);
            rows.push_back({{"lambda", lam}, {"t0", t0}, {"residual", r}});
            pass = pass && r < tol;
        }
        report["kappa"] = kappa;
        report["h"] = h;
        report["tolerance"] = tol;
        report["points"] = rows;
        w.config({{"identity", identity}, {"kappa", kappa}, {"lambdas", lambdas}, {"h", h}, {"tol", tol}}, args);
    } else {
        if (D < 1)
            throw std::invalid_argument("--D must be at least 1");
        if (D >= 5 && !g.long_mode)
            throw std::invalid_argument("D >= 5 needs --long");
        if (orders.size() != 2)
            throw std::invalid_argument("--orders takes two integers");
        HurwitzOptions opts;
        opts.budget = g.budget;
        const HurwitzTable table = hurwitz_table(D, 0, opts);
        std::vector<Violation> vs;
        if (identity == "euler") {
            vs = check_euler(build_F0H(D, table));
        } else if (identity == "cutjoin") {
            vs = check_cutjoin(build_F0H(D, table));
            const auto full = check_cutjoin_full(build_F0(D, table));
            vs.insert(vs.end(), full.begin(), full.end());
        } else if (identity == "hirota") {
            const int K = std::max(orders[0], orders[1]);
            vs = check_hirota(build_F0(D, table, std::max(D, K)), orders[0], orders[1]);
            report["orders"] = orders;
        } else {
            throw std::invalid_argument("unknown identity '" + identity + "' (euler|cutjoin|hirota|toda)");
        }
        pass = vs.empty();
        report["D"] = D;
        report["violations"] = violations_json(vs);
        w.config({{"identity", identity}, {"D", D}, {"orders", orders}, {"budget", g.budget}}, args);
    }
    report["pass"] = pass;
    w.json_file("check_" + identity + ".json", report);
    w.finish();
    out << "check " << identity << ": " << (pass ? "pass" : "VIOLATED") << "\n";
    return pass ? ok : violation;
}

// --- trochoid --------------------------------------------------------------

int cmd_trochoid(const Globals &g, trochoid::Params p, std::vector<double> grid, int samples,
                 const std::string &args, std::ostream &out)
{
    p.validate();
    if (grid.empty())
        throw std::invalid_argument("trochoid: empty t0 grid");
    if (samples < 1)
        throw std::invalid_argument("trochoid: --samples must be positive");
    const double tc = trochoid::critical_time(p);
    for (const double t : grid)
        if (t > tc)
            throw SingularityError("trochoid: grid point t0 = " + std::to_string(t) + " lies beyond t_c = " +
                                   std::to_string(tc));

    json rows = json::array();
    std::string csv = "t0,sigma,X,Y\n";
    char buf[128];
    for (const double t : grid) {
        const auto m = trochoid::moments(p, t);
        rows.push_back({{"t0", t},
                        {"lambda", m.lambda},
                        {"t1", cjson(m.t1)},
                        {"v0", m.v0},
                        {"v1", cjson(m.v1)},
                        {"v2", cjson(m.v2)},
                        {"F0", trochoid::tau(p, t)}});
        for (int j = 0; j < samples; ++j) {
            const double s = 2.0 * std::numbers::pi * j / samples;
            const auto q = trochoid::contour(p, t, s);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", t, s, q.X, q.Y);
            csv += buf;
        }
    }
    Writer w(g, "trochoid", args);
    w.config({{"R", p.R}, {"r0", p.r0}, {"kappa", p.kappa}, {"Y0", p.Y0}, {"t0", grid}, {"samples", samples}},
             args);
    w.json_file("trochoid_observables.json", {{"t_c", tc}, {"points", rows}});
    w.file("trochoid_contours.csv", csv);
    w.finish();
    out << "trochoid: " << grid.size() << " grid points, t_c = " << tc << "\n";
    return ok;
}

// --- evolve ----------------------------------------------------------------

int cmd_evolve(const Globals &g, int contour_every, const std::string &args, std::ostream &out)
{
    const LoadedConfig lc = load(g);
    const RunConfig &c = lc.cfg;
    const auto troch = trochoid_of(c);
    double t0_end = 0.0;
    if (c.t0_end)
        t0_end = *c.t0_end;
    else if (troch)
        t0_end = trochoid::critical_time(*troch) + 10.0 * c.solve.dt0;
    else
        throw std::invalid_argument("evolve: t0_end is required unless t_1 is the only target");
    const double n_steps = (t0_end - c.t0_start) / c.solve.dt0;
    if (n_steps > 20000 && !g.long_mode)
        throw ResourceLimitError("evolve: more than 20000 steps needs --long", n_steps);

    const auto tk = c.target_vector();
    const lg::Trajectory traj = lg::evolve(tk, c.t0_start, t0_end, c.R, c.r0, c.solve);

    std::string jsonl;
    std::vector<lg::TrajectoryStep> shown;
    double drift = 0.0, gauge = 0.0, disc = 0.0, imag = 0.0;
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
        const auto &s = traj.steps[i];
        jsonl += lg::step_to_json(s).dump() + "\n";
        if (contour_every > 0 && (i % static_cast<std::size_t>(contour_every) == 0 || i + 1 == traj.steps.size()))
            shown.push_back(s);
        for (int k = 1; k <= c.N; ++k)
            drift = std::max(drift, std::abs(s.moments.t[static_cast<std::size_t>(k)] - tk[static_cast<std::size_t>(k)]));
        gauge = std::max(gauge, std::abs(s.map.u[0].imag() - c.solve.gauge_im_u0));
        disc = std::max(disc, s.tau.discrepancy);
        imag = std::max(imag, s.tau.max_imag);
    }

    json summary = {{"steps", traj.steps.size()},
                    {"t0_start", c.t0_start},
                    {"t0_end", t0_end},
                    {"t0_reached", traj.steps.empty() ? c.t0_start : traj.steps.back().t0},
                    {"singular", traj.singular},
                    {"cusp_time", traj.singular ? json(traj.cusp_time) : json(nullptr)},
                    {"failed", traj.failed},
                    {"failure", traj.failure},
                    {"max_tk_drift", drift},
                    {"max_gauge_drift", gauge},
                    {"max_tau_discrepancy", disc},
                    {"max_imag", imag}};

    if (troch) {
        const double tc = trochoid::critical_time(*troch);
        double contour_dev = 0.0;
        const lg::TrajectoryStep *last = nullptr;
        for (const auto &s : traj.steps) {
            if (s.t0 > 0.9 * tc)
                continue;
            last = &s;
            const auto cs = lg::sample_contour(s.map, c.solve.M);
            for (std::size_t j = 0; j < cs.sigma.size(); ++j) {
                const auto q = trochoid::contour(*troch, s.t0, cs.sigma[j]);
                contour_dev = std::max(contour_dev, std::abs(cs.Z[j] - cplx(q.X, q.Y)));
            }
        }
        json o = {{"kappa", troch->kappa}, {"Y0", troch->Y0}, {"t_c", tc}, {"max_contour_deviation", contour_dev}};
        if (traj.singular)
            o["cusp_time"] = oracle_entry(traj.cusp_time, tc);
        if (last) {
            const auto m = trochoid::moments(*troch, last->t0);
            o["at_t0"] = last->t0;
            o["F0"] = oracle_entry(last->tau.F0, trochoid::tau(*troch, last->t0));
            o["v0"] = oracle_entry(last->moments.v0, m.v0);
            o["t1"] = oracle_entry(last->moments.t[1], m.t1);
            o["v1"] = oracle_entry(last->moments.v[1], m.v1);
            o["v2"] = oracle_entry(last->moments.v[2], m.v2);
            o["u1"] = oracle_entry(last->map.u[1].real(), troch->R * m.lambda);
        }
        summary["oracle"] = o;
    } else if (zero_targets(c) && !traj.steps.empty()) {
        double straight_dev = 0.0;
        for (const auto &s : traj.steps) {
            const auto cs = lg::sample_contour(s.map, c.solve.M);
            for (const auto &z : cs.Z)
                straight_dev = std::max(straight_dev, std::abs(z.real() - 0.5 * s.t0));
        }
        const auto &s = traj.steps.back();
        summary["oracle"] = {{"max_straightness_deviation", straight_dev},
                             {"at_t0", s.t0},
                             {"F0", oracle_entry(s.tau.F0, straight_tau(c, s.t0))}};
    }

    Writer w(g, "evolve", args);
    w.config(to_json(c), lc.text);
    w.file("trajectory.jsonl", jsonl);
    if (!shown.empty())
        w.file("contours.csv", lg::contour_csv(shown, c.solve.M));
    w.json_file("evolve_summary.json", summary);
    w.finish();
    out << "evolve: " << traj.steps.size() << " steps, max t_k drift " << drift;
    if (traj.singular)
        out << ", singularity at t0 = " << traj.cusp_time;
    if (traj.failed)
        out << ", FAILED: " << traj.failure;
    out << "\n";
    return traj.failed ? failure : ok;
}

// --- tau / gradients -------------------------------------------------------

int cmd_tau(const Globals &g, const std::string &args, std::ostream &out)
{
    const LoadedConfig lc = load(g);
    const RunConfig &c = lc.cfg;
    lg::Targets T{c.t0_start, c.target_vector()};
    const lg::SolveResult res = lg::solve_cold(T, c.R, c.r0, c.solve);
    const auto m = lg::moments_from_map(res.map, 2 * c.N, c.solve);
    const lg::TauValue tv = lg::tau_from_moments(res.map, m, c.solve);
    const bool consistent = tv.discrepancy <= c.solve.tau_tol;

    json j = {{"t0", c.t0_start},
              {"F0", tv.F0},
              {"F0_crosscheck", tv.F0_crosscheck},
              {"discrepancy", tv.discrepancy},
              {"tolerance", c.solve.tau_tol},
              {"max_imag", tv.max_imag},
              {"pairing_imag", tv.pairing_imag},
              {"consistent", consistent}};
    if (const auto troch = trochoid_of(c))
        j["oracle_F0"] = oracle_entry(tv.F0, trochoid::tau(*troch, c.t0_start));
    else if (zero_targets(c))
        j["oracle_F0"] = oracle_entry(tv.F0, straight_tau(c, c.t0_start));

    Writer w(g, "tau", args);
    w.config(to_json(c), lc.text);
    w.json_file("tau.json", j);
    w.finish();
    out << "tau: F0 = " << tv.F0 << ", cross-check " << tv.F0_crosscheck << ", relative discrepancy "
        << tv.discrepancy << "\n";
    return consistent ? ok : violation;
}

int cmd_gradients(const Globals &g, double tol, const std::string &args, std::ostream &out)
{
    const LoadedConfig lc = load(g);
    const RunConfig &c = lc.cfg;
    lg::Targets T{c.t0_start, c.target_vector()};
    const lg::GradientReport rep = lg::check_gradients(T, c.R, c.r0, c.solve, c.k_max);
    json rows = json::array();
    for (const auto &e : rep.entries)
        rows.push_back({{"name", e.name}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"residual", e.residual}});
    const bool pass = rep.max_residual <= tol;
    Writer w(g, "gradients", args);
    w.config(to_json(c), lc.text);
    w.json_file("gradients.json", {{"entries", rows}, {"max_residual", rep.max_residual}, {"tolerance", tol},
                                   {"pass", pass}});
    w.finish();
    out << "gradients: max relative residual " << rep.max_residual << (pass ? "" : " (VIOLATED)") << "\n";
    return pass ? ok : violation;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Hurwitz numbers, dispersionless Toda tau-functions and channel Laplacian growth"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "key=value run configuration");
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--budget", g.budget, "enumeration budget for Hurwitz counts")->capture_default_str();
    app.add_flag("--long", g.long_mode, "allow d >= 5 Hurwitz tables and very long evolutions");

    int d_max = 3, genus = 0;
    auto *hur = app.add_subcommand("hurwitz", "double Hurwitz table");
    hur->add_option("--dmax", d_max, "largest degree")->capture_default_str();
    hur->add_option("--genus", genus, "covering genus")->capture_default_str();

    std::string identity;
    int D = 4;
    std::vector<int> orders{4, 4};
    double kappa = 0.3, h = 1e-3, tol_toda = 1e-6;
    std::vector<double> lambdas{0.1, 0.3, 0.5};
    auto *chk = app.add_subcommand("check", "exact identity checks on the generating function");
    chk->add_option("identity", identity, "euler|cutjoin|hirota|toda")->required();
    chk->add_option("--D", D, "q-degree truncation")->capture_default_str();
    chk->add_option("--orders", orders, "Hirota z-orders K1 K2")->expected(2);
    chk->add_option("--kappa", kappa, "trochoid kappa (toda)")->capture_default_str();
    chk->add_option("--lambdas", lambdas, "trochoid lambda values (toda)");
    chk->add_option("--step", h, "relative finite-difference step (toda)")->capture_default_str();
    chk->add_option("--tol", tol_toda, "residual tolerance (toda)")->capture_default_str();

    trochoid::Params tp;
    std::vector<double> grid;
    double t_start = 0.0, t_end = 1.0;
    int points = 11, samples = 256;
    auto *tro = app.add_subcommand("trochoid", "closed-form trochoid observables and contours");
    tro->add_option("--R", tp.R)->capture_default_str();
    tro->add_option("--r0", tp.r0)->capture_default_str();
    tro->add_option("--kappa", tp.kappa)->capture_default_str();
    tro->add_option("--Y0", tp.Y0)->capture_default_str();
    tro->add_option("--t0", grid, "explicit t0 values");
    tro->add_option("--t0-start", t_start)->capture_default_str();
    tro->add_option("--t0-end", t_end)->capture_default_str();
    tro->add_option("--points", points, "uniform grid size when --t0 is absent")->capture_default_str();
    tro->add_option("--samples", samples, "contour samples per t0")->capture_default_str();

    int contour_every = 100;
    auto *evo = app.add_subcommand("evolve", "moment-conserving evolution from --config");
    evo->add_option("--contour-every", contour_every, "write every n-th contour (0: none)")->capture_default_str();

    auto *tau = app.add_subcommand("tau", "tau-function of the map solving --config targets at t0_start");

    double tol_grad = 1e-5;
    auto *grd = app.add_subcommand("gradients", "finite-difference gradient checks at --config targets");
    grd->add_option("--tol", tol_grad, "largest allowed relative residual")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err);
    }

    std::string args;
    for (int i = 1; i < argc; ++i)
        args += std::string(argv[i]) + "\n";

    try {
        if (*hur)
            return cmd_hurwitz(g, d_max, genus, args, out);
        if (*chk)
            return cmd_check(g, identity, D, orders, kappa, lambdas, h, tol_toda, args, out);
        if (*tro) {
            if (grid.empty()) {
                if (points < 1)
                    throw std::invalid_argument("--points must be positive");
                for (int i = 0; i < points; ++i)
                    grid.push_back(points == 1 ? t_start : t_start + (t_end - t_start) * i / (points - 1));
            }
            return cmd_trochoid(g, tp, grid, samples, args, out);
        }
        if (*evo)
            return cmd_evolve(g, contour_every, args, out);
        if (*tau)
            return cmd_tau(g, args, out);
        if (*grd)
            return cmd_gradients(g, tol_grad, args, out);
    } catch (const ResourceLimitError &e) {
        err << "error: " << e.what() << " (minimal budget " << e.required() << ")\n";
        return failure;
    } catch (const ConvergenceError &e) {
        err << "error: " << e.what() << " after " << e.history().size() << " residual evaluations\n";
        return failure;
    } catch (const ConsistencyError &e) {
        err << "violation: " << e.what() << "\n";
        return violation;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return failure;
    }
    return failure;
}

} // namespace lgtau::cli
