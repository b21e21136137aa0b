#include "lgtau/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lgtau {

namespace {

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string &v, int line)
{
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception &) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size())
        throw std::invalid_argument("config line " + std::to_string(line) + ": not a number: '" + v + "'");
    return x;
}

int to_int(const std::string &v, int line)
{
    const double x = to_double(v, line);
    if (x != static_cast<double>(static_cast<int>(x)))
        throw std::invalid_argument("config line " + std::to_string(line) + ": not an integer: '" + v + "'");
    return static_cast<int>(x);
}

void parse_targets(const std::string &v, int line, std::map<int, std::complex<double>> &out)
{
    std::istringstream is(v);
    std::string tok;
    while (is >> tok) {
        const auto a = tok.find(':');
        const auto b = a == std::string::npos ? a : tok.find(':', a + 1);
        if (b == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line) + ": target '" + tok +
                                        "' is not k:re:im");
        const int k = to_int(tok.substr(0, a), line);
        if (k < 1)
            throw std::invalid_argument("config line " + std::to_string(line) + ": target index must be >= 1");
        out[k] = {to_double(tok.substr(a + 1, b - a - 1), line), to_double(tok.substr(b + 1), line)};
    }
}

} // namespace

std::vector<std::complex<double>> RunConfig::target_vector() const
{
    std::vector<std::complex<double>> t(static_cast<std::size_t>(N + 1));
    for (const auto &[k, v] : targets) {
        if (k > N)
            throw std::invalid_argument("config: target t_" + std::to_string(k) + " exceeds N = " +
                                        std::to_string(N));
        t[static_cast<std::size_t>(k)] = v;
    }
    return t;
}

void RunConfig::validate() const
{
    if (!(R > 0.0) || !(r0 > 0.0))
        throw std::invalid_argument("config: R and r0 must be positive");
    if (N < 1)
        throw std::invalid_argument("config: N must be at least 1");
    solve.validate(N);
    (void)target_vector();
    if (t0_end && *t0_end < t0_start)
        throw std::invalid_argument("config: t0_end precedes t0_start");
}

RunConfig parse_config(std::istream &in)
{
    RunConfig c;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty())
            continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (key == "R")
            c.R = to_double(val, line);
        else if (key == "r0")
            c.r0 = to_double(val, line);
        else if (key == "N")
            c.N = to_int(val, line);
        else if (key == "M")
            c.solve.M = to_int(val, line);
        else if (key == "dt0")
            c.solve.dt0 = to_double(val, line);
        else if (key == "t0_start")
            c.t0_start = to_double(val, line);
        else if (key == "t0_end")
            c.t0_end = to_double(val, line);
        else if (key == "newton_tol")
            c.solve.newton_tol = to_double(val, line);
        else if (key == "max_iter")
            c.solve.max_iter = to_int(val, line);
        else if (key == "gauge_im_u0")
            c.solve.gauge_im_u0 = to_double(val, line);
        else if (key == "cusp_threshold")
            c.solve.cusp_threshold = to_double(val, line);
        else if (key == "fd_step")
            c.solve.fd_step = to_double(val, line);
        else if (key == "tau_tol")
            c.solve.tau_tol = to_double(val, line);
        else if (key == "quad_tol")
            c.solve.quad_tol = to_double(val, line);
        else if (key == "quad_self_test")
            c.solve.quad_self_test = to_int(val, line) != 0;
        else if (key == "k_max")
            c.k_max = to_int(val, line);
        else if (key == "targets" || key == "target")
            parse_targets(val, line, c.targets);
        else
            throw std::invalid_argument("config line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
    return c;
}

RunConfig parse_config_string(const std::string &text)
{
    std::istringstream is(text);
    return parse_config(is);
}

RunConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open " + path);
    return parse_config(in);
}

nlohmann::json to_json(const RunConfig &c)
{
    nlohmann::json j;
    j["R"] = c.R;
    j["r0"] = c.r0;
    j["N"] = c.N;
    j["M"] = c.solve.M;
    j["dt0"] = c.solve.dt0;
    j["t0_start"] = c.t0_start;
    j["t0_end"] = c.t0_end ? nlohmann::json(*c.t0_end) : nlohmann::json(nullptr);
    j["newton_tol"] = c.solve.newton_tol;
    j["max_iter"] = c.solve.max_iter;
    j["gauge_im_u0"] = c.solve.gauge_im_u0;
    j["cusp_threshold"] = c.solve.cusp_threshold;
    j["fd_step"] = c.solve.fd_step;
    j["tau_tol"] = c.solve.tau_tol;
    j["quad_tol"] = c.solve.quad_tol;
    j["quad_self_test"] = c.solve.quad_self_test;
    j["k_max"] = c.k_max;
    auto t = nlohmann::json::array();
    for (const auto &[k, v] : c.targets)
        t.push_back({k, v.real(), v.imag()});
    j["targets"] = t;
    return j;
}

} // namespace lgtau
