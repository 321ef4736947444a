#include "fb/verification.hpp"
#include "fb/functional.hpp"
#include "test_util.hpp"

#include <cmath>
#include <stdexcept>

#include <doctest.h>

using namespace fb;

namespace {

Field cone_field(const Grid& g, double apex = 2.0, double slope = 2.0) {
    Field u(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Point p = g.coords(k);
        u[k] = apex - slope * std::hypot(p.x, p.y);
    }
    return u;
}

} // namespace

TEST_CASE("sobolev constant closed form and threshold arithmetic") {
    const double S3 = sobolev_constant(3);
    CHECK(S3 == doctest::Approx(5.4777).epsilon(1e-4));
    // threshold at N=3, kappa=1
    CHECK(std::pow(S3, 1.5) / 3.0 == doctest::Approx(4.2733).epsilon(1e-4));
    // monotonicity in kappa: smaller kappa raises the threshold
    const double t1 = std::pow(S3, 1.5) / (3.0 * std::sqrt(1.0));
    const double t2 = std::pow(S3, 1.5) / (3.0 * std::sqrt(0.25));
    CHECK(t2 > t1);
    CHECK_THROWS_AS(sobolev_constant(2), std::domain_error);
}

TEST_CASE("sobolev constant matches rayleigh quotients of scaled bubbles") {
    // quotient ||grad u||^2 / ||u||_{2*}^2 of (delta/(delta^2+r^2))^(1/2)
    // profiles on a large radial grid approaches S from above
    const double S3 = sobolev_constant(3);
    const Grid g = Grid::radial(3, 1.0, 2049);
    double best = 1e300;
    for (double delta : {0.02, 0.05, 0.1, 0.2}) {
        Field u(g.size());
        for (int i = 0; i < g.nr; ++i) {
            const double r = g.r_of(i);
            u[i] = std::sqrt(delta / (delta * delta + r * r));
        }
        // subtract the boundary value so u is admissible
        const double ub = u[g.nr - 1];
        for (auto& v : u) v = std::max(0.0, v - ub);
        const double num = dirichlet_form(g, u, u);
        Field u6(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) u6[k] = std::pow(u[k], 6);
        const double den = std::pow(integrate(g, u6), 1.0 / 3.0);
        best = std::min(best, num / den);
    }
    CHECK(best >= 0.995 * S3);
    CHECK(best <= 1.10 * S3);
}

TEST_CASE("fb condition on exact planar and cone profiles") {
    // planar with alpha^2 - beta^2 = 2 on a grid-aligned kink: residual ~ 0
    const Grid g = Grid::rect2d(65, 65, -1, 1, -1, 1);
    const double beta = 1.0, alpha = std::sqrt(2.0 + beta * beta);
    Field u(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Point p = g.coords(k);
        const double d = p.x - 4.0 * g.hx;
        u[k] = 1.0 + (d > 0 ? alpha * d : beta * d);
    }
    const FreeBoundary fb = extract_free_boundary(g, u);
    const FbConditionReport rep = check_fb_condition(g, u, fb);
    CHECK(!rep.trivial);
    CHECK(rep.median_abs <= 1e-9);
    CHECK(rep.pass);

    // cone residual decreases at first order under refinement
    double prev = 1e300;
    for (int n : {65, 129, 257}) {
        const Grid gh = Grid::rect2d(n, n, -1, 1, -1, 1);
        const Field uc = cone_field(gh);
        const FbConditionReport rc = check_fb_condition(gh, uc, extract_free_boundary(gh, uc));
        CHECK(rc.median_abs < prev);
        prev = rc.median_abs;
    }
}

TEST_CASE("fb condition flags the trivial field") {
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    const FbConditionReport rep =
        check_fb_condition(g, Field(g.size(), 0.0), extract_free_boundary(g, Field(g.size(), 0.0)));
    CHECK(rep.trivial);
    CHECK(!rep.pass);
}

TEST_CASE("nondegeneracy on the cone approaches the slope") {
    const Grid g = Grid::rect2d(129, 129, -1, 1, -1, 1);
    const Field u = cone_field(g); // (u - 1)/dist == 2 in the continuum
    const NondegeneracyReport rep = check_nondegeneracy(g, u, extract_free_boundary(g, u));
    CHECK(rep.samples > 50);
    CHECK(rep.empirical_c > 1.5);
    CHECK(rep.empirical_c < 2.0 + 1e-9);
    CHECK(rep.pass);
}

TEST_CASE("degenerate quadratic touch fails nondegeneracy under refinement") {
    // u = 1 + d^2 has (u-1)/d = d -> 0
    double prev = 1e300;
    for (int n : {65, 129}) {
        const Grid g = Grid::rect2d(n, n, -1, 1, -1, 1);
        Field u(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            const Point p = g.coords(k);
            const double d = 0.5 - std::hypot(p.x, p.y);
            u[k] = 1.0 + (d > 0 ? d * d : d);
        }
        const NondegeneracyReport rep = check_nondegeneracy(g, u, extract_free_boundary(g, u));
        CHECK(rep.empirical_c < prev);
        prev = rep.empirical_c;
    }
    CHECK(prev < 0.12); // r0 = 10h scale: c <= r0 -> 0 with h
}

TEST_CASE("density fractions near a planar interface are half") {
    const Grid g = Grid::rect2d(129, 129, -1, 1, -1, 1);
    Field u(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
        u[k] = 1.0 + 2.0 * (g.coords(k).x - 4.0 * g.hx);
    const DensityReport rep = check_density(g, u, extract_free_boundary(g, u));
    REQUIRE(!rep.entries.empty());
    for (const DensityEntry& e : rep.entries)
        CHECK(e.fraction == doctest::Approx(0.5).epsilon(0.5 * g.hx / e.r + 0.05));
    CHECK(rep.pass);
}

TEST_CASE("density counts match brute-force enumeration") {
    const Grid g = Grid::rect2d(65, 65, -1, 1, -1, 1);
    const Field u = cone_field(g);
    const FreeBoundary fb = extract_free_boundary(g, u);
    const DensityReport rep = check_density(g, u, fb);
    REQUIRE(!rep.entries.empty());
    for (const DensityEntry& e : rep.entries) {
        long super = 0, total = 0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const Point p = g.coords(k);
            const double dx = p.x - e.x, dy = p.y - e.y;
            if (dx * dx + dy * dy > e.r * e.r) continue;
            ++total;
            if (u[k] > 1.0) ++super;
        }
        CHECK(e.count_total == total);
        CHECK(e.count_super == super);
    }
}

TEST_CASE("variational identity vanishes on trivial inputs") {
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    const auto m = NonlinearityModel::pure_power(4.0);
    const VariationalReport rep = check_variational_identity(g, m, 0.0, Field(g.size(), 0.0));
    for (const auto& e : rep.entries) {
        CHECK(e.quad == 0.0);
        CHECK(e.pairing == 0.0);
    }
}

TEST_CASE("phi catalog fields vanish with their jacobians on the boundary") {
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    for (int which = 0; which < phi_catalog_size(g); ++which) {
        for (int i = 0; i < g.nx; ++i) {
            const PhiField f = phi_eval(g, which, g.x_of(i), g.ay);
            CHECK(f.px == 0.0);
            CHECK(f.py == 0.0);
            CHECK(f.dxx == 0.0);
            CHECK(f.dyy == 0.0);
        }
        CHECK(phi_c1_norm(g, which) > 0.0);
    }
    // jacobian entries match finite differences of the field
    fbtest::Rng rng(5);
    for (int which = 0; which < phi_catalog_size(g); ++which) {
        for (int t = 0; t < 20; ++t) {
            const double x = rng.uniform(-0.9, 0.9), y = rng.uniform(-0.9, 0.9);
            const double h = 1e-6;
            const PhiField f = phi_eval(g, which, x, y);
            const PhiField fxp = phi_eval(g, which, x + h, y);
            const PhiField fxm = phi_eval(g, which, x - h, y);
            const PhiField fyp = phi_eval(g, which, x, y + h);
            const PhiField fym = phi_eval(g, which, x, y - h);
            CHECK((fxp.px - fxm.px) / (2 * h) == doctest::Approx(f.dxx).epsilon(1e-4));
            CHECK((fyp.px - fym.px) / (2 * h) == doctest::Approx(f.dxy).epsilon(1e-4));
            CHECK((fxp.py - fxm.py) / (2 * h) == doctest::Approx(f.dyx).epsilon(1e-4));
            CHECK((fyp.py - fym.py) / (2 * h) == doctest::Approx(f.dyy).epsilon(1e-4));
        }
    }
}

TEST_CASE("domain-variation pairing matches the transported difference quotient") {
    // d/dt J_eps(u - t Phi.grad u)|_0 equals the pairing <r, -Phi.grad u>_w
    const Grid g = Grid::rect2d(49, 49, -1, 1, -1, 1);
    const auto m = NonlinearityModel::pure_power(4.0);
    const double eps = 4.0 * g.hx;
    const RegularizedFunctional F(g, m, eps);
    fbtest::Rng rng(31);
    Field u = fbtest::random_field(g, rng, 1.0);
    for (auto& v : u) v += 0.8;
    apply_dirichlet(g, u);

    Field gx, gy;
    gradient_field(g, u, gx, gy);
    const VariationalReport rep = check_variational_identity(g, m, eps, u);
    for (int which = 0; which < phi_catalog_size(g); ++which) {
        Field vdir(g.size(), 0.0);
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.dirichlet[k]) continue;
            const Point p = g.coords(k);
            const PhiField f = phi_eval(g, which, p.x, p.y);
            vdir[k] = -(f.px * gx[k] + f.py * gy[k]);
        }
        const double fd_h = 1e-6;
        Field up(u.size()), um(u.size());
        for (std::size_t k = 0; k < u.size(); ++k) {
            up[k] = u[k] + fd_h * vdir[k];
            um[k] = u[k] - fd_h * vdir[k];
        }
        const double fd = (F.eval_Jeps(up) - F.eval_Jeps(um)) / (2.0 * fd_h);
        CHECK(std::abs(fd - rep.entries[which].pairing) <=
              1e-5 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("energy report flags sandwich violations and passes honest traces") {
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    const auto m = NonlinearityModel::pure_power(4.0);
    const double eps = 0.1;
    const RegularizedFunctional F(g, m, eps);
    fbtest::Rng rng(7);
    Field u = fbtest::random_field(g, rng, 1.0);
    for (auto& v : u) v += 0.9;
    apply_dirichlet(g, u);

    SolveTrace tr;
    TraceEntry e;
    e.eps = eps;
    e.level = F.eval_Jeps(u);
    e.level_sharp = F.eval_J(u);
    e.grad_norm = 0.0;
    e.u = u;
    tr.entries.push_back(e);
    EnergyReport rep = check_energy_convergence(g, tr);
    CHECK(rep.pass);
    CHECK(rep.rows[0].sandwich_ok);
    CHECK(rep.rows[0].band >= rep.rows[0].J_sharp - rep.rows[0].J_eps);

    // tampering with the stored level breaks the exact inequality
    tr.entries[0].level = tr.entries[0].level_sharp + 1.0;
    rep = check_energy_convergence(g, tr);
    CHECK(!rep.pass);
}

TEST_CASE("lipschitz table is flat for an eps-independent field") {
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    const Field u = cone_field(g);
    SolveTrace tr;
    for (double eps : {0.2, 0.1, 0.05}) {
        TraceEntry e;
        e.eps = eps;
        e.u = u;
        tr.entries.push_back(e);
    }
    const LipschitzReport rep = check_lipschitz(g, tr);
    REQUIRE(rep.rows.size() == 3);
    for (const auto& row : rep.rows) CHECK(row.sup_grad == doctest::Approx(rep.rows[0].sup_grad));
    CHECK(rep.pass);
    // cone slope is 2 away from the apex and boundary
    CHECK(rep.rows[0].sup_grad == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("aux checks: harmonic sublevel region and positivity majorant") {
    const Grid g = Grid::rect2d(65, 65, -1, 1, -1, 1);
    const auto m = NonlinearityModel::pure_power(4.0);
    // 2-d harmonic skirt outside r = 1/2: u = 1 - log(2r)/log(2) equals 1 on
    // the circle and decays; linear cap inside
    Field u(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Point p = g.coords(k);
        const double r = std::max(std::hypot(p.x, p.y), 1e-9);
        u[k] = r >= 0.5 ? 1.0 - std::log(2.0 * r) / std::log(2.0)
                        : 1.0 + 2.0 * (0.5 - r);
    }
    const FreeBoundary fb = extract_free_boundary(g, u);
    const AuxReport rep = check_aux(g, m, u, fb);
    CHECK(rep.harmonicity_nodes > 100);
    // log profile is harmonic away from the apex: O(h^2/r^2) defect
    CHECK(rep.harmonicity_sup < 0.5);
    CHECK(rep.ring_samples > 0);
    CHECK(rep.ring_nu > 0.0);
}

TEST_CASE("ring average of the cone matches a quadrature oracle") {
    // ring average of (u-1)_+ = (1 - 2 rho)_+ around a boundary point of the
    // cone, against adaptive quadrature of the exact profile
    const Grid g = Grid::rect2d(257, 257, -1, 1, -1, 1);
    const Field u = cone_field(g);
    const double r = 4.0 * g.hx;
    const double x0 = 0.5, y0 = 0.0;
    double oracle = fbtest::integrate_1d(
        [&](double th) {
            const double px = x0 + r * std::cos(th), py = y0 + r * std::sin(th);
            return std::max(0.0, 1.0 - 2.0 * std::hypot(px, py)) / (2.0 * M_PI);
        },
        0.0, 2.0 * M_PI, 1e-12);
    double avg = 0.0;
    const int n_ang = 64;
    for (int a = 0; a < n_ang; ++a) {
        const double th = 2.0 * M_PI * a / n_ang;
        avg += std::max(0.0, interp(g, u, x0 + r * std::cos(th), y0 + r * std::sin(th)) - 1.0);
    }
    avg /= n_ang;
    CHECK(avg == doctest::Approx(oracle).epsilon(0.05));
}

TEST_CASE("critical threshold report") {
    const auto m = NonlinearityModel::critical_combo(0.1, 1.0, 3.0, 3);
    SolveTrace tr;
    TraceEntry e;
    e.level = 6.5;
    tr.entries.push_back(e);
    CriticalReport rep = check_critical_threshold(m, tr);
    CHECK(rep.applicable);
    CHECK(rep.threshold == doctest::Approx(13.514).epsilon(1e-3));
    CHECK(rep.pass);
    tr.entries[0].level = 14.0;
    rep = check_critical_threshold(m, tr);
    CHECK(!rep.pass);
    // subcritical models are not subject to the threshold
    const CriticalReport sub = check_critical_threshold(NonlinearityModel::pure_power(4.0), tr);
    CHECK(!sub.applicable);
    CHECK(sub.pass);
}
