#ifndef FB_FUNCTIONAL_HPP
#define FB_FUNCTIONAL_HPP

#include "fb/grid.hpp"
#include "fb/nonlinearity.hpp"

namespace fb {

// Transition bump: beta(s) = 30 s^2 (1-s)^2 on [0,1], zero elsewhere.
// Primitive B(s) = 10 s^3 - 15 s^4 + 6 s^5, clamped to 0 below and 1 above.
// Unit mass, max beta = 30/16 <= 2, max s*beta(s) = 3240/3125 <= 2.
struct BumpEval {
    double beta;
    double B;
};

BumpEval bump_eval(double s);
double bump_beta(double s);
double bump_B(double s);
double bump_beta_prime(double s);

/// Bundle (grid, model, eps) evaluating the sharp functional J, the
/// regularized functional J_eps and the nodewise residual of the regularized
/// Euler-Lagrange equation
///     -Δu + (1/eps) beta((u-1)/eps) - g(x,(u-1)_+) = 0.
///
/// All quadratures are the cell-volume nodal rule of the grid, and the
/// gradient term is the edge-sum Dirichlet energy, so the residual is the
/// exact gradient of eval_Jeps in the w-weighted pairing:
/// d/dt J_eps(u + t v)|_0 = <residual(u), v>_w for v vanishing on the boundary.
struct RegularizedFunctional {
    const Grid* grid = nullptr;
    NonlinearityModel model;
    double eps = 0.0;

    RegularizedFunctional(const Grid& g, NonlinearityModel m, double eps_);

    double eval_Jeps(const Field& u) const;
    double eval_J(const Field& u) const;

    /// Residual of the regularized equation; zero on Dirichlet nodes.
    Field residual(const Field& u) const;
    void residual_into(const Field& u, Field& r) const;

    /// Nodewise slope of the residual's zero-order part:
    /// (1/eps^2) beta'((u-1)/eps) - dg(x,(u-1)_+); used by Newton.
    Field jacobian_diag(const Field& u) const;

    double grad_norm(const Field& u) const; // ||residual||_w
};

/// Positive part above the obstacle, (u-1)_+, and the complementary part
/// u - (u-1)_+ used throughout the Nehari machinery.
Field plus_part(const Field& u);
Field minus_part(const Field& u);

/// Sharp functional J(u) = int [ (1/2)|grad u|^2 + chi_{u>1} - G(x,(u-1)_+) ]
/// with the strict nodewise comparison u > 1 (ties contribute nothing).
double eval_sharp_J(const Grid& g, const NonlinearityModel& m, const Field& u);

/// Gradient of the smooth part of J: -Δu - g(x,(u-1)_+) on interior nodes.
void sharp_residual_into(const Grid& g, const NonlinearityModel& m, const Field& u, Field& out);

/// Cell-volume measure of the strict superlevel set {u > 1}.
double superlevel_measure(const Grid& g, const Field& u);

/// Measure of the band {a < u < b} in cell volumes.
double band_measure(const Grid& g, const Field& u, double a, double b);

/// Measure of {|u - 1| <= tol} (the tie band standing in for {u = 1}).
double tie_band_measure(const Grid& g, const Field& u, double tol);

} // namespace fb

#endif
