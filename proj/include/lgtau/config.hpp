#pragma once

// Plain key=value run configuration shared by the CLI and the tests.
//
//   # comment
//   R = 1
//   r0 = 1
//   N = 12
//   M = 512
//   dt0 = 1e-3
//   t0_start = 0
//   t0_end = 1.2
//   targets = 1:0.3:0 2:0.01:-0.02
//
// Recognized keys: R, r0, N, M, dt0, t0_start, t0_end, newton_tol, max_iter,
// gauge_im_u0, cusp_threshold, fd_step, tau_tol, quad_tol, quad_self_test,
// k_max, targets (k:re:im triples, may be repeated).

#include <complex>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgtau/lgsolve.hpp"

namespace lgtau {

struct RunConfig {
    double R = 1.0;
    double r0 = 1.0;
    int N = 12;
    double t0_start = 0.0;
    std::optional<double> t0_end;
    int k_max = -1;
    std::map<int, std::complex<double>> targets;
    lg::SolveConfig solve;

    /// t[0..N] with t[0] = 0. Throws std::invalid_argument for k > N.
    std::vector<std::complex<double>> target_vector() const;
    void validate() const;
};

/// Throws std::invalid_argument naming the offending line.
RunConfig parse_config(std::istream &in);
RunConfig parse_config_string(const std::string &text);
RunConfig load_config(const std::string &path);

nlohmann::json to_json(const RunConfig &cfg);

} // namespace lgtau
