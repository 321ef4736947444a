#ifndef FB_SOLVER_DETAIL_HPP
#define FB_SOLVER_DETAIL_HPP

#include "fb/functional.hpp"

namespace fb::detail {

/// Re-maximize J_eps along the fibering ray through u (in place). Returns
/// false when (u-1)_+ vanishes. `level` receives the ray maximum value.
/// A positive *t_hint localizes the line search and returns the maximizer.
bool ray_remax(const RegularizedFunctional& F, Field& u, double& level,
               double* t_hint = nullptr);

/// Projected descent: gradient step on J_eps, then ray re-maximization.
bool constrained_descent(const RegularizedFunctional& F, Field& u, double tol, int max_iters,
                         double& grad_norm);

/// Reflected-gradient saddle refinement (tangent from (u-1)_+, with the given
/// field as fallback when the positive part vanishes).
bool refine_maximizer(const RegularizedFunctional& F, Field& u, const Field& tangent, double tol,
                      int max_iters, double& grad_norm);

} // namespace fb::detail

#endif
