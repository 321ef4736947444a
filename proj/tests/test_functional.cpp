#include "fb/functional.hpp"
#include "fb/errors.hpp"
#include "test_util.hpp"

#include <cmath>

#include <doctest.h>

using namespace fb;

TEST_CASE("bump values at the anchor points") {
    auto [b_half, B_half] = bump_eval(0.5);
    CHECK(b_half == doctest::Approx(1.875).epsilon(1e-15));
    CHECK(B_half == doctest::Approx(0.5).epsilon(1e-15));
    auto [b_neg, B_neg] = bump_eval(-3.0);
    CHECK(b_neg == 0.0);
    CHECK(B_neg == 0.0);
    auto [b_two, B_two] = bump_eval(2.0);
    CHECK(b_two == 0.0);
    CHECK(B_two == 1.0);
}

TEST_CASE("bump invariants on a dense sample") {
    // 1e5 points across and beyond the support
    double prev_B = 0.0;
    for (int i = 0; i <= 100000; ++i) {
        const double s = -1.0 + 3.0 * i / 100000.0;
        const auto [beta, B] = bump_eval(s);
        CHECK(beta >= 0.0);
        CHECK(beta <= 2.0);
        CHECK(beta * s <= 2.0 + 1e-15);
        CHECK(B >= prev_B - 1e-15); // nondecreasing
        CHECK(B >= 0.0);
        CHECK(B <= 1.0);
        if (s <= 0.0) CHECK(B == 0.0);
        if (s >= 1.0) CHECK(B == 1.0);
        if (s > 0.0 && s < 1.0) {
            CHECK(B > 0.0);
            CHECK(B < 1.0);
        }
        prev_B = B;
    }
    // unit mass comes from the closed form of the primitive at 1
    CHECK(bump_B(1.0) == 1.0);
    // beta' matches finite differences
    for (double s : {0.1, 0.33, 0.5, 0.77, 0.95}) {
        const double h = 1e-7;
        const double fd = (bump_beta(s + h) - bump_beta(s - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(bump_beta_prime(s)).epsilon(1e-5));
    }
}

TEST_CASE("functionals vanish on the zero field") {
    const Grid g = Grid::rect2d(17, 17, -1, 1, -1, 1);
    const RegularizedFunctional F(g, NonlinearityModel::pure_power(4.0), 0.1);
    const Field zero(g.size(), 0.0);
    CHECK(F.eval_J(zero) == 0.0);
    CHECK(F.eval_Jeps(zero) == 0.0);
    const Field r = F.residual(zero);
    for (double v : r) CHECK(v == 0.0);
}

TEST_CASE("strict superlevel: a plateau at exactly 1 contributes nothing") {
    const Grid g = Grid::rect2d(17, 17, -1, 1, -1, 1);
    const RegularizedFunctional F(g, NonlinearityModel::pure_power(4.0), 0.1);
    Field u(g.size(), 0.0);
    // interior patch at exactly 1
    for (int j = 6; j <= 10; ++j)
        for (int i = 6; i <= 10; ++i) u[g.index(i, j)] = 1.0;
    const double J = F.eval_J(u);
    CHECK(J == doctest::Approx(dirichlet_energy(g, u)).epsilon(1e-14));
}

TEST_CASE("chi term counts cells by strict comparison") {
    // direct cell enumeration oracle on a single raised node
    const Grid g = Grid::rect2d(17, 17, -1, 1, -1, 1);
    const NonlinearityModel m = NonlinearityModel::pure_power(4.0);
    const RegularizedFunctional F(g, m, 0.05);
    Field u(g.size(), 0.0);
    const std::size_t mid = g.index(8, 8);
    const double delta = 0.25;
    u[mid] = 1.0 + delta;
    double expected = dirichlet_energy(g, u) + g.w[mid] * 1.0 -
                      g.w[mid] * m.G(g.coords(mid), delta);
    CHECK(F.eval_J(u) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(superlevel_measure(g, u) == doctest::Approx(g.w[mid]).epsilon(1e-14));
}

TEST_CASE("saturated bump term approaches the domain volume") {
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    const double eps = 0.05;
    const RegularizedFunctional F(g, NonlinearityModel::pure_power(4.0), eps);
    Field u(g.size(), 1.0 + 2.0 * eps);
    apply_dirichlet(g, u);
    // B term: everything in the interior saturates at 1
    double bterm = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (!g.dirichlet[k]) bterm += g.w[k];
    const double expected =
        dirichlet_energy(g, u) + bterm -
        [&] {
            double s = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k)
                if (!g.dirichlet[k]) s += g.w[k] * F.model.G(g.coords(k), 2.0 * eps);
            return s;
        }();
    CHECK(F.eval_Jeps(u) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("residual vanishes on a discrete harmonic field below the obstacle") {
    // harmonic iterate with 0 <= u < 1 - eps keeps beta and g inactive:
    // residual equals the (zero) discrete laplacian defect
    const Grid g = Grid::rect2d(33, 33, 0, 1, 0, 1);
    Field u(g.size(), 0.0);
    // discrete harmonic: solve -Δu = 0 with an interior bump forced by a
    // low-rank dirichlet lift is overkill; take u = 0.4 * first eigen shape
    // and relax it to discrete harmonicity via Jacobi sweeps on the interior
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            u[g.index(i, j)] = 0.4 * std::sin(M_PI * g.x_of(i)) * std::sin(M_PI * g.y_of(j));
    // Jacobi iterations drive the field toward the discrete harmonic (zero);
    // partway through it is a generic subunit field, so check consistency
    // instead: residual == -laplacian when beta and g are inactive
    const RegularizedFunctional F(g, NonlinearityModel::pure_power(4.0), 0.1);
    const Field r = F.residual(u);
    const Field lap = laplacian_apply(g, u);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.dirichlet[k])
            CHECK(r[k] == 0.0);
        else
            CHECK(r[k] == doctest::Approx(-lap[k]).epsilon(1e-13));
    }
}

TEST_CASE("residual is the exact gradient of the regularized functional") {
    // central-difference oracle: (J(u+hv) - J(u-hv))/2h vs <r, v>_w
    fbtest::Rng rng(17);
    const double fd_h = 1e-5;

    auto check_grid = [&](const Grid& g, const NonlinearityModel& m) {
        const double eps = 4.0 * g.min_h();
        const RegularizedFunctional F(g, m, eps);
        for (int trial = 0; trial < 20; ++trial) {
            Field u = fbtest::random_field(g, rng, 1.2);
            // push some mass above the obstacle so all terms activate
            for (auto& v : u) v += 0.8;
            apply_dirichlet(g, u);
            const Field v = fbtest::random_field(g, rng, 1.0);
            Field up(u.size()), um(u.size());
            for (std::size_t k = 0; k < u.size(); ++k) {
                up[k] = u[k] + fd_h * v[k];
                um[k] = u[k] - fd_h * v[k];
            }
            const double fd = (F.eval_Jeps(up) - F.eval_Jeps(um)) / (2.0 * fd_h);
            const Field r = F.residual(u);
            const double pair = dot_w(g, r, v);
            CHECK(std::abs(fd - pair) <= 1e-6 * std::max({1.0, std::abs(fd), std::abs(pair)}));
        }
    };

    check_grid(Grid::rect2d(33, 33, -1, 1, -1, 1), NonlinearityModel::pure_power(4.0));
    check_grid(Grid::rect2d(33, 33, -1, 1, -1, 1), NonlinearityModel::sum_of_powers({3.0, 4.0}));
    check_grid(Grid::radial(3, 1.0, 65), NonlinearityModel::critical_combo(0.1, 1.0, 3.0, 3));
}

TEST_CASE("monotone sandwich between the regularized and sharp functionals") {
    fbtest::Rng rng(23);
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    const double eps = 0.1;
    const RegularizedFunctional F(g, NonlinearityModel::sum_of_powers({3.0, 4.0}), eps);
    for (int trial = 0; trial < 10; ++trial) {
        Field u = fbtest::random_field(g, rng, 1.0);
        for (auto& v : u) v += 0.9;
        apply_dirichlet(g, u);
        const double je = F.eval_Jeps(u);
        const double js = F.eval_J(u);
        const double band = band_measure(g, u, 1.0, 1.0 + eps);
        CHECK(je <= js + 1e-12 * (1.0 + std::abs(js)));
        CHECK(js - je <= band + 1e-12 * (1.0 + std::abs(js)));
    }
}

TEST_CASE("regularized functional validates its inputs") {
    const Grid g = Grid::rect2d(17, 17, -1, 1, -1, 1);
    CHECK_THROWS_AS(RegularizedFunctional(g, NonlinearityModel::pure_power(4.0), 0.0), ConfigError);
    // critical model demands the radial three-dimensional grid
    CHECK_THROWS_AS(RegularizedFunctional(g, NonlinearityModel::critical_combo(0.1, 1.0, 3.0, 3), 0.1),
                    ConfigError);
    const Grid gr = Grid::radial(3, 1.0, 33);
    CHECK_NOTHROW(RegularizedFunctional(gr, NonlinearityModel::critical_combo(0.1, 1.0, 3.0, 3), 0.1));
}
