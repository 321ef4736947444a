#ifndef FB_SOLVER_HPP
#define FB_SOLVER_HPP

#include "fb/errors.hpp"
#include "fb/functional.hpp"
#include "fb/grid.hpp"
#include "fb/nonlinearity.hpp"

#include <vector>

namespace fb {

/// Strictly decreasing regularization levels eps_1 > ... > eps_m > 0.
struct EpsSchedule {
    std::vector<double> levels;

    static EpsSchedule geometric(double eps1, double ratio, double eps_min);
    /// Default schedule tied to the mesh: from first_factor*h down to
    /// last_factor*h with ratio 1/2 (the transition layer needs >= 2 cells).
    static EpsSchedule for_grid(const Grid& g, double first_factor = 8.0,
                                double last_factor = 2.0, double ratio = 0.5);
};

/// Path endpoint with negative energy: u0_minus + t * u0_plus with t grown
/// geometrically until J_eps < 0. Throws ModelError when 60 doublings do not
/// reach negative energy (superlinearity violated numerically) or when
/// (u0 - 1)_+ vanishes.
Field make_endpoint(const RegularizedFunctional& F, const Field& u0);

/// Straight-line path of `size` fields from 0 to the endpoint.
std::vector<Field> initial_path(const Grid& g, const Field& endpoint, int size);

struct MountainPassOptions {
    double grad_tol = 0.0;   // <= 0 means 1e-6 * sqrt(|Omega|)
    int path_size = 32;
    int max_sweeps = 100000;
    int descent_steps = 10;  // descent iterations on the maximizer per sweep
    double stall_tol = 1e-14;
    int stall_sweeps = 50;
    bool verbose = false; // progress logging to stderr
};

struct MountainPassResult {
    Field u;
    double level = 0.0;
    double grad_norm = 0.0;
    int sweeps = 0;
};

/// Stagnation error carrying the best iterate reached.
struct MountainPassStall : SolverError {
    Field best;
    double level;
    MountainPassStall(Field b, double lvl, double grad)
        : SolverError("mountain pass stagnated", grad), best(std::move(b)), level(lvl) {}
};

/// Path-deformation mountain pass: locate the path maximizer (lowest index
/// on ties), run a few Armijo-safeguarded descent steps on that field,
/// reinsert it, then re-discretize the path by arclength in the weighted L2
/// metric. Terminates when the maximizer's gradient norm falls under
/// grad_tol. The accepted field must be nontrivial (max u > 1).
MountainPassResult mountain_pass(const RegularizedFunctional& F, std::vector<Field> path,
                                 const MountainPassOptions& opt = {});

struct NewtonOptions {
    double tol = 1e-10; // absolute tolerance on ||residual||_w
    int max_steps = 100;
    double lin_tol = 1e-3; // relative tolerance of the inner MINRES solves
    int lin_max_iter = 0;
};

struct NewtonResult {
    Field u;
    double res_norm = 0.0;
    int steps = 0;
};

/// Damped Newton on the regularized equation with the exact linearization
/// -Δ + (1/eps^2) beta'((u-1)/eps) - dg(x,(u-1)_+), Armijo on (1/2)||r||_w^2.
/// Throws SolverError when the Jacobian solve fails or no damped step
/// decreases the residual (caller falls back to a fresh mountain pass).
NewtonResult newton_continue(const RegularizedFunctional& F, const Field& warm,
                             const NewtonOptions& opt = {});

// --- Nehari machinery for the sharp functional ------------------------------

struct NehariTime {
    double t = 1.0;
    double bracket_lo = 1.0, bracket_hi = 1.0;
    double grad_plus_sq = 0.0; // a = int |grad u_plus|^2
    double pairing = 0.0;      // b(1) = int u_plus g(x, u_plus)
};

/// Unique positive root of phi'(t) = t a - int u_plus g(x, t u_plus). The
/// initial bracket comes from the t^(mu-2) comparison bounds and is refined
/// by safeguarded Newton/bisection to relative tolerance 1e-12. Pure powers
/// use the closed form (a / int u_plus^p)^(1/(p-2)). Throws ModelError on
/// bracket failure or when the positive part vanishes.
NehariTime nehari_time(const Grid& g, const NonlinearityModel& m, const Field& u);

/// u_minus + t_u * u_plus where u_plus = (u-1)_+ and u_minus = u - u_plus.
Field project_nehari(const Grid& g, const NonlinearityModel& m, const Field& u);

/// Termwise energy of the projected field:
/// int [ (1/2)|grad u_minus|^2 + (t^2/2)|grad u_plus|^2 - G(x, t u_plus) ]
/// + |{u > 1}|. Matches eval_J(project_nehari(u)) up to the discrete
/// cross-term on edges crossing the level set.
double nehari_level_formula(const Grid& g, const NonlinearityModel& m, const Field& u, double t);

struct MinimizeOptions {
    double decrease_tol = 1e-12;
    int max_iters = 200000;
};

struct MinimizeResult {
    Field u;
    double level = 0.0;
    int iterations = 0;
};

/// Projected-gradient minimization of the sharp functional J over the Nehari
/// set: descent step on the smooth part of J, then project back. Step
/// halving restarts when the positive part is lost.
MinimizeResult minimize_on_M(const Grid& g, const NonlinearityModel& m, const Field& u_init,
                             const MinimizeOptions& opt = {});

// --- Continuation ------------------------------------------------------------

struct TraceEntry {
    double eps = 0.0;
    double level = 0.0;       // J_eps(u)
    double level_sharp = 0.0; // J(u)
    double grad_norm = 0.0;
    int newton_steps = 0;
    int mp_sweeps = 0;
    double seconds = 0.0; // wall time; excluded from serialized artifacts
    Field u;
};

struct SolveTrace {
    std::vector<TraceEntry> entries;
};

struct ContinuationOptions {
    MountainPassOptions mp;
    NewtonOptions newton;
    bool verbose = false; // per-level progress logging to stderr
};

/// Full branch: mountain pass at the first eps (from the given initial
/// field), Newton polish, then warm-started Newton continuation down the
/// schedule with a mountain-pass fallback at levels where Newton fails.
SolveTrace continue_branch(const Grid& g, const NonlinearityModel& m, const EpsSchedule& sched,
                           const Field& u0, const ContinuationOptions& opt = {});

/// Initial fields: product-of-sines bump scaled to max 2 (Rect2D) or a
/// cosine profile (Radial).
Field default_initial_field(const Grid& g);

} // namespace fb

#endif
