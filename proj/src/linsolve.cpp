#include "fb/linsolve.hpp"
#include "fb/errors.hpp"

#include <cmath>
#include <string>

namespace fb {

void OperatorSpec::apply(const Field& u, Field& out) const {
    const Grid& g = *grid;
    laplacian_into(g, u, out);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.dirichlet[k]) {
            out[k] = 0.0;
            continue;
        }
        double v = -laplace_coeff * out[k] + shift * u[k];
        if (diag) v += (*diag)[k] * u[k];
        out[k] = v;
    }
}

CgResult cg_solve(const OperatorSpec& A, const Field& b, Field& x, double tol, int max_iter) {
    const Grid& g = *A.grid;
    const std::size_t n = g.size();
    if (max_iter <= 0) max_iter = static_cast<int>(10 * n) + 200;

    CgResult res;
    const double bnorm = norm_w(g, b);
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        res.converged = true;
        return res;
    }

    Field r(n, 0.0), p(n, 0.0), Ap(n, 0.0);
    A.apply(x, Ap);
    for (std::size_t k = 0; k < n; ++k) r[k] = g.dirichlet[k] ? 0.0 : b[k] - Ap[k];
    p = r;
    double rho = dot_w(g, r, r);

    for (int it = 0; it < max_iter; ++it) {
        if (std::sqrt(rho) <= tol * bnorm) {
            res.converged = true;
            res.iterations = it;
            res.rel_residual = std::sqrt(rho) / bnorm;
            return res;
        }
        A.apply(p, Ap);
        const double pAp = dot_w(g, p, Ap);
        if (!(pAp > 0.0)) {
            res.indefinite = true;
            res.iterations = it;
            res.rel_residual = std::sqrt(rho) / bnorm;
            return res;
        }
        const double alpha = rho / pAp;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * Ap[k];
        }
        const double rho_new = dot_w(g, r, r);
        const double beta = rho_new / rho;
        for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
        rho = rho_new;
    }
    res.iterations = max_iter;
    res.rel_residual = std::sqrt(rho) / bnorm;
    return res;
}

Field linear_solve(const OperatorSpec& A, const Field& b, double tol, int max_iter) {
    Field x(A.grid->size(), 0.0);
    const CgResult r = cg_solve(A, b, x, tol, max_iter);
    if (!r.converged)
        throw SolverError("cg did not converge: rel residual " + std::to_string(r.rel_residual) +
                              (r.indefinite ? " (indefinite operator)" : ""),
                          r.rel_residual);
    return x;
}

CgResult minres_solve(const OperatorSpec& A, const Field& b, Field& x, double tol, int max_iter) {
    const Grid& g = *A.grid;
    const std::size_t n = g.size();
    if (max_iter <= 0) max_iter = static_cast<int>(10 * n) + 200;
    x.assign(n, 0.0);

    CgResult res;
    const double bnorm = norm_w(g, b);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }

    // Lanczos-based MINRES with Givens rotations (w-weighted inner product).
    Field v_prev(n, 0.0), v(n, 0.0), work(n, 0.0);
    Field w1(n, 0.0), w2(n, 0.0); // previous two search directions
    for (std::size_t k = 0; k < n; ++k) v[k] = g.dirichlet[k] ? 0.0 : b[k];
    double beta = bnorm;
    for (std::size_t k = 0; k < n; ++k) v[k] /= beta;

    double eta = beta;
    double gamma1 = 1.0, gamma0 = 1.0, sigma1 = 0.0, sigma0 = 0.0;
    double resid = beta;

    for (int it = 1; it <= max_iter; ++it) {
        A.apply(v, work);
        const double alpha = dot_w(g, v, work);
        for (std::size_t k = 0; k < n; ++k) work[k] -= alpha * v[k] + beta * v_prev[k];
        const double beta_next = norm_w(g, work);

        const double delta = gamma1 * alpha - gamma0 * sigma1 * beta;
        const double rho1 = std::hypot(delta, beta_next);
        if (rho1 == 0.0) break;
        const double rho2 = sigma1 * alpha + gamma0 * gamma1 * beta;
        const double rho3 = sigma0 * beta;
        const double gamma_new = delta / rho1;
        const double sigma_new = beta_next / rho1;

        for (std::size_t k = 0; k < n; ++k) {
            const double wk = (v[k] - rho3 * w2[k] - rho2 * w1[k]) / rho1;
            w2[k] = w1[k];
            w1[k] = wk;
            x[k] += gamma_new * eta * wk;
        }
        resid *= std::abs(sigma_new);
        eta = -sigma_new * eta;
        res.iterations = it;

        if (resid <= tol * bnorm) {
            res.converged = true;
            res.rel_residual = resid / bnorm;
            return res;
        }
        if (beta_next == 0.0) break;

        for (std::size_t k = 0; k < n; ++k) {
            v_prev[k] = v[k];
            v[k] = work[k] / beta_next;
        }
        beta = beta_next;
        gamma0 = gamma1;
        gamma1 = gamma_new;
        sigma0 = sigma1;
        sigma1 = sigma_new;
    }
    res.rel_residual = resid / bnorm;
    res.converged = resid <= tol * bnorm;
    return res;
}

} // namespace fb
