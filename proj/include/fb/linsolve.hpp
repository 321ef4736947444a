#ifndef FB_LINSOLVE_HPP
#define FB_LINSOLVE_HPP

#include "fb/grid.hpp"

namespace fb {

/// Matrix-free operator c * (-Δ_h) + diag(q) + shift, restricted to interior
/// nodes (boundary components are pinned to zero). Symmetric in the
/// cell-volume inner product; positive definite when q + shift >= 0.
struct OperatorSpec {
    const Grid* grid = nullptr;
    double laplace_coeff = 1.0;
    const Field* diag = nullptr;
    double shift = 0.0;

    void apply(const Field& u, Field& out) const;
};

struct CgResult {
    bool converged = false;
    bool indefinite = false;
    int iterations = 0;
    double rel_residual = 0.0;
};

/// Conjugate gradients in the w-weighted inner product. x is both the
/// initial guess and the result. Stops when ||b - Ax||_w <= tol * ||b||_w.
CgResult cg_solve(const OperatorSpec& A, const Field& b, Field& x, double tol,
                  int max_iter = 0);

/// Throwing wrapper used by the pipelines: returns the solution of A x = b
/// from a zero initial guess or throws SolverError with the residual attached.
Field linear_solve(const OperatorSpec& A, const Field& b, double tol = 1e-10,
                   int max_iter = 0);

/// MINRES in the w-weighted inner product, for symmetric but possibly
/// indefinite operators (the Jacobian at a mountain pass point has a
/// negative direction). Zero initial guess.
CgResult minres_solve(const OperatorSpec& A, const Field& b, Field& x, double tol,
                      int max_iter = 0);

} // namespace fb

#endif
