#include "fb/functional.hpp"
#include "fb/errors.hpp"

#include <cmath>

namespace fb {

double bump_beta(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double t = 1.0 - s;
    return 30.0 * s * s * t * t;
}

double bump_B(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double bump_beta_prime(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
}

BumpEval bump_eval(double s) {
    return {bump_beta(s), bump_B(s)};
}

RegularizedFunctional::RegularizedFunctional(const Grid& g, NonlinearityModel m, double eps_)
    : grid(&g), model(std::move(m)), eps(eps_) {
    if (!(eps > 0.0)) throw ConfigError("regularized functional needs eps > 0");
    if (model.critical && !(g.kind == GridKind::Radial && g.dim >= 3))
        throw ConfigError("critical model needs the radial N=3 grid");
}

double RegularizedFunctional::eval_Jeps(const Field& u) const {
    const Grid& g = *grid;
    double pot = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.w[k] == 0.0) continue;
        const double s = u[k] - 1.0;
        const double up = s > 0.0 ? s : 0.0;
        pot += g.w[k] * (bump_B(s / eps) - model.G(g.coords(k), up));
    }
    return dirichlet_energy(g, u) + pot;
}

double RegularizedFunctional::eval_J(const Field& u) const {
    return eval_sharp_J(*grid, model, u);
}

double eval_sharp_J(const Grid& g, const NonlinearityModel& m, const Field& u) {
    double pot = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.w[k] == 0.0) continue;
        const double s = u[k] - 1.0;
        const double up = s > 0.0 ? s : 0.0;
        pot += g.w[k] * ((s > 0.0 ? 1.0 : 0.0) - m.G(g.coords(k), up));
    }
    return dirichlet_energy(g, u) + pot;
}

void sharp_residual_into(const Grid& g, const NonlinearityModel& m, const Field& u, Field& out) {
    laplacian_into(g, u, out);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.dirichlet[k]) {
            out[k] = 0.0;
            continue;
        }
        const double s = u[k] - 1.0;
        out[k] = -out[k] - m.g(g.coords(k), s > 0.0 ? s : 0.0);
    }
}

double superlevel_measure(const Grid& g, const Field& u) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (u[k] > 1.0) s += g.w[k];
    return s;
}

void RegularizedFunctional::residual_into(const Field& u, Field& r) const {
    const Grid& g = *grid;
    laplacian_into(g, u, r);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.dirichlet[k]) {
            r[k] = 0.0;
            continue;
        }
        const double s = u[k] - 1.0;
        const double up = s > 0.0 ? s : 0.0;
        r[k] = -r[k] + bump_beta(s / eps) / eps - model.g(g.coords(k), up);
    }
}

Field RegularizedFunctional::residual(const Field& u) const {
    Field r;
    residual_into(u, r);
    return r;
}

Field RegularizedFunctional::jacobian_diag(const Field& u) const {
    const Grid& g = *grid;
    Field q(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.dirichlet[k]) continue;
        const double s = u[k] - 1.0;
        const double up = s > 0.0 ? s : 0.0;
        q[k] = bump_beta_prime(s / eps) / (eps * eps) - model.dg(g.coords(k), up);
    }
    return q;
}

double RegularizedFunctional::grad_norm(const Field& u) const {
    Field r;
    residual_into(u, r);
    return norm_w(*grid, r);
}

Field plus_part(const Field& u) {
    Field p(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) p[k] = u[k] > 1.0 ? u[k] - 1.0 : 0.0;
    return p;
}

Field minus_part(const Field& u) {
    Field m(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) m[k] = u[k] > 1.0 ? 1.0 : u[k];
    return m;
}

double band_measure(const Grid& g, const Field& u, double a, double b) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (u[k] > a && u[k] < b) s += g.w[k];
    return s;
}

double tie_band_measure(const Grid& g, const Field& u, double tol) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (std::abs(u[k] - 1.0) <= tol) s += g.w[k];
    return s;
}

} // namespace fb
