#include "fb/solver.hpp"

#include <algorithm>
#include <cmath>

namespace fb {

namespace {

struct SupportNode {
    double w;
    Point x;
    double up;
};

std::vector<SupportNode> collect_support(const Grid& g, const Field& u) {
    std::vector<SupportNode> sup;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.w[k] == 0.0) continue;
        if (u[k] > 1.0) sup.push_back({g.w[k], g.coords(k), u[k] - 1.0});
    }
    return sup;
}

} // namespace

NehariTime nehari_time(const Grid& g, const NonlinearityModel& m, const Field& u) {
    const Field up = plus_part(u);
    const double a = dirichlet_form(g, up, up);
    const auto sup = collect_support(g, u);
    if (sup.empty() || !(a > 0.0))
        throw ModelError("nehari time needs (u - 1)_+ != 0");

    auto b = [&](double t) {
        double s = 0.0;
        for (const auto& nd : sup) s += nd.w * nd.up * m.g(nd.x, t * nd.up);
        return s;
    };
    auto db = [&](double t) {
        double s = 0.0;
        for (const auto& nd : sup) s += nd.w * nd.up * nd.up * m.dg(nd.x, t * nd.up);
        return s;
    };

    const double b1 = b(1.0);
    if (!(b1 > 0.0)) throw ModelError("nehari time needs int u_plus g(x, u_plus) > 0");

    NehariTime res;
    res.grad_plus_sq = a;
    res.pairing = b1;

    const double tq = std::pow(a / b1, 1.0 / (m.mu - 2.0));
    res.bracket_lo = std::min(1.0, tq);
    res.bracket_hi = std::max(1.0, tq);

    if (const auto* pp = std::get_if<PurePower>(&m.variant)) {
        // b(t) = t^(p-1) b1, so the root is closed form
        res.t = std::pow(a / b1, 1.0 / (pp->p - 2.0));
        return res;
    }

    double lo = res.bracket_lo, hi = res.bracket_hi;
    double flo = lo * a - b(lo);
    double fhi = hi * a - b(hi);
    // allow a hair of rounding before declaring a structural violation
    for (int guard = 0; flo < 0.0 && guard < 4; ++guard) {
        lo *= 0.999;
        flo = lo * a - b(lo);
    }
    for (int guard = 0; fhi > 0.0 && guard < 4; ++guard) {
        hi *= 1.001;
        fhi = hi * a - b(hi);
    }
    if (flo < 0.0 || fhi > 0.0)
        throw ModelError("nehari bracket failure: nonlinearity violates the comparison bounds");

    // safeguarded Newton within the bracket
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 300 && hi - lo > 1e-12 * hi; ++it) {
        const double f = t * a - b(t);
        if (f > 0.0)
            lo = t;
        else
            hi = t;
        const double fp = a - db(t);
        double tn = fp != 0.0 ? t - f / fp : 0.0;
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        t = tn;
    }
    res.t = 0.5 * (lo + hi);
    return res;
}

Field project_nehari(const Grid& g, const NonlinearityModel& m, const Field& u) {
    const NehariTime nt = nehari_time(g, m, u);
    Field out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k)
        out[k] = u[k] > 1.0 ? 1.0 + nt.t * (u[k] - 1.0) : u[k];
    return out;
}

double nehari_level_formula(const Grid& g, const NonlinearityModel& m, const Field& u, double t) {
    const Field up = plus_part(u);
    const Field um = minus_part(u);
    double pot = 0.0, chi = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.w[k] == 0.0) continue;
        if (u[k] > 1.0) chi += g.w[k];
        pot += g.w[k] * m.G(g.coords(k), t * up[k]);
    }
    return dirichlet_energy(g, um) + t * t * dirichlet_energy(g, up) - pot + chi;
}

MinimizeResult minimize_on_M(const Grid& g, const NonlinearityModel& m, const Field& u_init,
                             const MinimizeOptions& opt) {
    Field u = project_nehari(g, m, u_init);
    double J = eval_sharp_J(g, m, u);

    double alpha = 0.25 * g.min_h() * g.min_h();
    int stall = 0;
    Field d, cand(g.size());
    MinimizeResult res;

    int it = 0;
    for (; it < opt.max_iters && stall < 3; ++it) {
        sharp_residual_into(g, m, u, d);
        double step = alpha;
        bool accepted = false;
        for (int tries = 0; tries < 60 && step > 1e-18; ++tries) {
            for (std::size_t k = 0; k < u.size(); ++k) cand[k] = u[k] - step * d[k];
            double mx = 0.0;
            for (double v : cand) mx = std::max(mx, v);
            if (!(mx > 1.0)) { // positive part lost: restart with halved step
                step *= 0.5;
                continue;
            }
            Field proj = project_nehari(g, m, cand);
            const double Jp = eval_sharp_J(g, m, proj);
            if (Jp < J) {
                const double dec = J - Jp;
                u.swap(proj);
                J = Jp;
                alpha = std::clamp(step * 1.3, 1e-12, 1e6);
                accepted = true;
                stall = dec < opt.decrease_tol * (1.0 + std::abs(J)) ? stall + 1 : 0;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) ++stall;
    }
    res.u = std::move(u);
    res.level = J;
    res.iterations = it;
    return res;
}

} // namespace fb
