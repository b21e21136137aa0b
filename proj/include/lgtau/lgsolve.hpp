#pragma once

// Numerical Laplacian growth in a periodic channel of radius R.
//
// The oil domain is the image of the half-strip Re W > 0, 0 <= Im W < 2 pi
// under the truncated map
//
//   Z(W) = R W + Σ_{k=0}^{N} u_k e^{-kW},
//
// and the interface is Z(i sigma), sigma in [0, 2 pi). Instead of integrating
// the growth equation, each state is obtained by Newton's method from the
// conserved moments t_1..t_N and the area variable t0 (which equals the
// physical time). The reparametrization W -> W + i s is fixed by pinning
// Im u_0. Contour integrals use the trapezoidal rule on a uniform sigma grid,
// which converges geometrically for these periodic analytic integrands.

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

namespace lgtau::lg {

using cplx = std::complex<double>;

struct ChannelMap {
    double R = 1.0;
    double r0 = 1.0;
    /// u[k] multiplies e^{-kW}, k = 0..N.
    std::vector<cplx> u;

    int order() const noexcept { return static_cast<int>(u.size()) - 1; }

    /// The straight section X = t0/2.
    static ChannelMap straight(double R, double r0, int N, double t0, double gauge_im_u0 = 0.0);
};

cplx eval_map(const ChannelMap &map, cplx W);
/// dZ/dW
cplx eval_map_derivative(const ChannelMap &map, cplx W);

struct ContourSample {
    std::vector<double> sigma;
    /// Z(i sigma)
    std::vector<cplx> Z;
    /// Z'(W) at W = i sigma (not d/dsigma).
    std::vector<cplx> dZ;
};

ContourSample sample_contour(const ChannelMap &map, int M);

struct SolveConfig {
    /// Quadrature points, a power of two with M >= 4N + 4.
    int M = 512;
    double newton_tol = 1e-12;
    int max_iter = 40;
    double dt0 = 1e-3;
    double gauge_im_u0 = 0.0;
    /// Cusp flag when min |Z'(i sigma)| < cusp_threshold * R.
    double cusp_threshold = 1e-3;
    /// Relative finite-difference step.
    double fd_step = 1e-4;
    /// Allowed relative discrepancy between the two tau routes.
    double tau_tol = 1e-6;
    /// Allowed change of a moment (relative to max(1, |moment|)) when M is doubled.
    double quad_tol = 1e-10;
    bool quad_self_test = false;

    void validate(int N) const;
};

/// Moments of the oil domain. Vectors are indexed by k directly; entry 0 is
/// unused and kept at zero.
struct MomentSet {
    double t0 = 0.0;
    std::vector<cplx> t;
    std::vector<cplx> v;
    /// From Rv0 = t0^2/2 + 2R t0 log r0 + Σ k t_k v_k.
    double v0 = 0.0;
    /// From the cut-off area integral, as a cross-check of v0.
    double v0_quadrature = 0.0;

    int max_t_index() const noexcept { return static_cast<int>(t.size()) - 1; }
    int max_v_index() const noexcept { return static_cast<int>(v.size()) - 1; }
};

/// t_k and v_k for k <= K by quadrature. Throws ResolutionError if
/// cfg.quad_self_test is set and doubling M moves any moment by more than
/// cfg.quad_tol.
MomentSet moments_from_map(const ChannelMap &map, int K, const SolveConfig &cfg);

/// Targets t0 and t_1..t_N; t.size() must be N + 1 (t[0] unused).
struct Targets {
    double t0 = 0.0;
    std::vector<cplx> t;

    static Targets from_moments(const MomentSet &m, int N);
};

struct SolveResult {
    ChannelMap map;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> history;
};

/// Newton's method for the map with the given moments, started from `seed`.
/// The Jacobian is assembled from the analytic u-derivatives of the
/// quadrature integrands. Throws ConvergenceError (with residual history) or
/// GeometryError when the seed or every damped step loses local univalence.
SolveResult solve_for_moments(const Targets &targets, const ChannelMap &seed, const SolveConfig &cfg);

/// Solve from the straight section, scaling t_1..t_N by 0, 1/4, 1/2, 3/4, 1.
SolveResult solve_cold(const Targets &targets, double R, double r0, const SolveConfig &cfg);

/// min over the grid of |Z'(i sigma)|.
double min_abs_derivative(const ChannelMap &map, int M);

/// True when Z' has no zero in the closed half-strip (winding number of
/// Z'(i sigma) about 0 vanishes and min |Z'| > 0).
bool locally_univalent(const ChannelMap &map, int M);

struct TauValue {
    /// t0^3/6R + t0^2 log r0 + Re Σ t_k v_k
    ///   - (1/4R) Σ_{k,l} [k l t_k t_l v_{k+l} + (k+l) t_{k+l} v_k v_l]
    double F0 = 0.0;
    /// 2F0 = -(2/(pi R^2)) ∫∫ X^2 dX dY + t0 v0 + Σ (t_k v_k + c.c.), the
    /// area integral over the region between X = 0 and the interface.
    double F0_crosscheck = 0.0;
    double discrepancy = 0.0;
    /// Largest imaginary part of Σ k t_k v_k (R v0 is real) and of the
    /// double sum, both real for an exact solution.
    double max_imag = 0.0;
    /// Imaginary part of Σ t_k v_k. It is not zero in general; only the real
    /// part enters F0.
    double pairing_imag = 0.0;
};

/// Throws ConsistencyError if the relative discrepancy exceeds cfg.tau_tol.
TauValue tau_from_map(const ChannelMap &map, const SolveConfig &cfg);
/// Same computation without the consistency check, from precomputed moments
/// (K >= 2N).
TauValue tau_from_moments(const ChannelMap &map, const MomentSet &m, const SolveConfig &cfg);

struct TrajectoryStep {
    double t0 = 0.0;
    ChannelMap map;
    MomentSet moments;
    TauValue tau;
    double min_abs_zprime = 0.0;
    /// Quadrature grid used for this step (grows near a cusp).
    int M = 0;
    std::vector<std::string> flags;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    bool singular = false;
    /// t0 at which the singularity was detected (meaningful when singular).
    double cusp_time = 0.0;
    bool failed = false;
    std::string failure;
};

/// Marches t0 from t0_start towards t0_end in steps of cfg.dt0 with the
/// targets t_1..t_N held fixed. Each step is re-checked on the doubled grid
/// and M is doubled (up to 65536) while the targets are not met there. Near
/// the finite-time singularity the step is halved until min |Z'| drops below
/// the cusp threshold or the step collapses;
/// either way the trajectory is flagged singular. Newton failures away from a
/// cusp mark the trajectory failed and return what was computed.
Trajectory evolve(const std::vector<cplx> &targets_tk, double t0_start, double t0_end, double R, double r0,
                  const SolveConfig &cfg);

struct CheckEntry {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
};

struct GradientReport {
    std::vector<CheckEntry> entries;
    double max_residual = 0.0;

    const CheckEntry *find(const std::string &name) const;
};

/// Finite-difference verification (re-solving at perturbed targets) of
/// v_k = dF0/dt_k (k = 0..k_max), the first-derivative relation
/// dF0/dt0 = t0^2/2R + 2 t0 log r0 + (1/R) Σ k t_k dF0/dt_k, the homogeneity
/// 2F0 = R dF0/dR + t0 dF0/dt0 + Σ (t_k dF0/dt_k + c.c.) and
/// -R^2 dF0/dR = t0^3/6 + t0 Σ k t_k v_k + 1/2 Σ_{k,l}[...].
/// k_max < 0 means N. Throws ResolutionError if the Richardson check finds the
/// step too large.
GradientReport check_gradients(const Targets &targets, double R, double r0, const SolveConfig &cfg, int k_max = -1);

struct DarcyReport {
    double max_rel_deviation = 0.0;
    /// Same measurement with every other trajectory step (doubled dt0).
    double coarse_rel_deviation = 0.0;
    int steps_used = 0;
};

/// Normal velocity from consecutive contours at fixed sigma versus
/// (R/2)|W'(Z)| = (R/2)/|Z'(W)|, with physical time t = t0. Steps with t0
/// outside [t0_min, t0_max] are skipped. Throws std::invalid_argument with
/// fewer than 3 usable steps and ResolutionError if the deviation does not
/// shrink like dt0^2 when the step is halved.
DarcyReport check_darcy(const Trajectory &traj, const SolveConfig &cfg, double t0_min = -1e300,
                        double t0_max = 1e300);

struct ReconstructionReport {
    /// max |W_rec - W| over interior points W = xi + i sigma, xi in xis.
    double max_dev_interior = 0.0;
    /// Same on the interface itself (xi = 0).
    double max_dev_boundary = 0.0;
    /// Size of the first omitted terms (N < k <= 2N) at the interior points.
    double tail_estimate = 0.0;
    /// dF0^2/dt0^2 used in the reconstruction.
    double d2F0_dt0 = 0.0;
};

/// Rebuilds W(Z) = Z/R + log r0 - (1/2) d^2F0/dt0^2
///   - Σ_{k<=N} (r0^{-k}/k) e^{-kZ/R} d^2F0/dt_k dt0
/// from finite differences of re-solved moments in t0, and compares it with
/// the known preimage of points Z = Z(W). The series converges only to the
/// right of the branch points of W(Z), so interior points must lie well
/// inside the domain; the tail estimate shows whether they do.
ReconstructionReport check_map_reconstruction(const ChannelMap &map, const SolveConfig &cfg,
                                              const std::vector<double> &xis = {1.0, 1.5, 2.0});

// Export

/// One JSON object per trajectory step:
/// {t0, u_re[], u_im[], t_k, v_k, F0, F0_crosscheck, min_abs_Zprime, flags}.
nlohmann::json step_to_json(const TrajectoryStep &step);
/// CSV rows "t0,sigma,X,Y" for every grid point of every given step.
std::string contour_csv(const std::vector<TrajectoryStep> &steps, int M, bool header = true);

} // namespace lgtau::lg
