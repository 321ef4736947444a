#include "fb/solver.hpp"
#include "test_util.hpp"

#include <cmath>

#include <doctest.h>

using namespace fb;

namespace {

// generic field with (u-1)_+ != 0 and a plateau-free profile
Field bump_field(const Grid& g, double peak) {
    Field u(g.size(), 0.0);
    if (g.kind == GridKind::Rect2D) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double sx = std::sin(M_PI * (g.x_of(i) - g.ax) / (g.bx - g.ax));
                const double sy = std::sin(M_PI * (g.y_of(j) - g.ay) / (g.by - g.ay));
                u[g.index(i, j)] = peak * sx * sy;
            }
    } else {
        for (int i = 0; i < g.nr; ++i)
            u[i] = peak * std::cos(0.5 * M_PI * g.r_of(i) / g.radius);
    }
    apply_dirichlet(g, u);
    return u;
}

} // namespace

TEST_CASE("pure power root matches the closed form and a scan oracle") {
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    const auto m = NonlinearityModel::pure_power(4.0);
    const Field u = bump_field(g, 2.0);

    const NehariTime nt = nehari_time(g, m, u);
    // closed form (a / int u_plus^p)^(1/(p-2)) assembled independently
    const Field up = plus_part(u);
    const double a = dirichlet_form(g, up, up);
    double bp = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) bp += g.w[k] * std::pow(up[k], 4);
    const double closed = std::pow(a / bp, 1.0 / 2.0);
    CHECK(nt.t == doctest::Approx(closed).epsilon(1e-12));

    // coarse scan oracle: phi'(t) changes sign inside [t/2, 2t]
    auto phi_prime = [&](double t) {
        double b = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (up[k] > 0.0) b += g.w[k] * up[k] * m.g(g.coords(k), t * up[k]);
        return t * a - b;
    };
    CHECK(phi_prime(0.5 * nt.t) > 0.0);
    CHECK(phi_prime(2.0 * nt.t) < 0.0);
    CHECK(std::abs(phi_prime(nt.t)) <= 1e-9 * std::max(1.0, a));
}

TEST_CASE("comparison brackets contain the root for every model") {
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    const Grid gr = Grid::radial(3, 1.0, 65);
    struct Case {
        const Grid* grid;
        NonlinearityModel m;
    };
    const Case cases[] = {
        {&g, NonlinearityModel::pure_power(4.0)},
        {&g, NonlinearityModel::sum_of_powers({3.0, 4.0})},
        {&g, NonlinearityModel::weighted_power(3.0, 4.0, 1.0, 1.0, true)},
        {&g, NonlinearityModel::exponential_n2(1.0, 0.5)},
        {&gr, NonlinearityModel::critical_combo(0.1, 1.0, 3.0, 3)},
    };
    for (const auto& c : cases) {
        for (double peak : {1.3, 2.0, 3.5}) {
            const Field u = bump_field(*c.grid, peak);
            const NehariTime nt = nehari_time(*c.grid, c.m, u);
            INFO(c.m.name << " peak " << peak);
            CHECK(nt.t >= nt.bracket_lo * (1.0 - 1e-10));
            CHECK(nt.t <= nt.bracket_hi * (1.0 + 1e-10));
            // the bracket is the t^(mu-2) comparison bound
            const double q = nt.grad_plus_sq / nt.pairing;
            if (q <= 1.0) {
                CHECK(std::pow(nt.t, c.m.mu - 2.0) >= q * (1.0 - 1e-9));
                CHECK(std::pow(nt.t, c.m.mu - 2.0) <= 1.0 + 1e-9);
            } else {
                CHECK(std::pow(nt.t, c.m.mu - 2.0) >= 1.0 - 1e-9);
                CHECK(std::pow(nt.t, c.m.mu - 2.0) <= q * (1.0 + 1e-9));
            }
        }
    }
}

TEST_CASE("projection is idempotent and fixes Nehari points") {
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    const auto m = NonlinearityModel::sum_of_powers({3.0, 4.0});
    const Field u = bump_field(g, 2.4);

    const Field pi_u = project_nehari(g, m, u);
    // membership: t of the projected field is 1
    const NehariTime nt = nehari_time(g, m, pi_u);
    CHECK(nt.t == doctest::Approx(1.0).epsilon(1e-10));
    // idempotence in the sup norm
    const Field pi2 = project_nehari(g, m, pi_u);
    double sup = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) sup = std::max(sup, std::abs(pi2[k] - pi_u[k]));
    CHECK(sup <= 1e-10);
}

TEST_CASE("projected level matches the termwise formula") {
    // plateau construction keeps the discrete cross term exactly zero:
    // u = 1 on a neighborhood of supp (u-1)_+, so every edge touching the
    // superlevel set has constant u_minus
    const Grid g = Grid::rect2d(41, 41, -1, 1, -1, 1);
    const auto m = NonlinearityModel::pure_power(4.0);
    Field u(g.size(), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x_of(i), y = g.y_of(j);
            const double r = std::hypot(x, y);
            // skirt: 1 inside r < 0.6, sloping to 0 toward the boundary
            double v = r < 0.6 ? 1.0 : std::max(0.0, 1.0 - (r - 0.6) / 0.35);
            // cap above the obstacle, supported strictly inside the plateau
            if (r < 0.4) v += 0.9 * (1.0 - r / 0.4);
            u[g.index(i, j)] = v;
        }
    apply_dirichlet(g, u);

    const NehariTime nt = nehari_time(g, m, u);
    const Field pi_u = project_nehari(g, m, u);
    const double lhs = eval_sharp_J(g, m, pi_u);
    const double rhs = nehari_level_formula(g, m, u, nt.t);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

    // on generic fields the two sides differ only by the nonnegative
    // discrete cross term on level-crossing edges, which decays with h
    auto cross_term = [&](int n) {
        const Grid gh = Grid::rect2d(n, n, -1, 1, -1, 1);
        const Field ug = bump_field(gh, 2.0);
        const NehariTime ng = nehari_time(gh, m, ug);
        return eval_sharp_J(gh, m, project_nehari(gh, m, ug)) -
               nehari_level_formula(gh, m, ug, ng.t);
    };
    const double coarse = cross_term(41);
    const double fine = cross_term(81);
    CHECK(coarse >= -1e-12);
    CHECK(fine >= -1e-12);
    CHECK(fine <= 0.7 * coarse);
}

TEST_CASE("projection rejects fields without positive part") {
    const Grid g = Grid::rect2d(17, 17, -1, 1, -1, 1);
    const auto m = NonlinearityModel::pure_power(4.0);
    const Field u = bump_field(g, 0.9);
    CHECK_THROWS_AS(nehari_time(g, m, u), ModelError);
    CHECK_THROWS_AS(project_nehari(g, m, u), ModelError);
}

TEST_CASE("minimizer stays on the Nehari set with positive level") {
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    const auto m = NonlinearityModel::pure_power(4.0);
    const Field u0 = bump_field(g, 2.0);

    MinimizeOptions mo;
    mo.max_iters = 4000;
    const MinimizeResult res = minimize_on_M(g, m, u0, mo);
    CHECK(res.level > 0.0);

    // membership residual: |a - b(1)| relative
    const NehariTime nt = nehari_time(g, m, res.u);
    CHECK(std::abs(nt.grad_plus_sq - nt.pairing) <=
          1e-8 * std::max(nt.grad_plus_sq, nt.pairing));
    // the minimizer does not exceed the start level
    CHECK(res.level <= eval_sharp_J(g, m, project_nehari(g, m, u0)) + 1e-12);
}
