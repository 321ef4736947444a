#include "fb/freeboundary.hpp"
#include "test_util.hpp"

#include <cmath>

#include <doctest.h>

using namespace fb;

namespace {

Field cone_field(const Grid& g, double apex = 2.0, double slope = 2.0) {
    // u = apex - slope * r; level set {u = 1} is the circle r = (apex-1)/slope
    Field u(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Point p = g.coords(k);
        u[k] = apex - slope * std::hypot(p.x, p.y);
    }
    return u;
}

Field planar_field(const Grid& g, double alpha, double beta, double nx, double ny, double ox,
                   double oy) {
    // u = 1 + alpha d_+ - beta d_-, d = (x - o) . n
    Field u(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Point p = g.coords(k);
        const double d = (p.x - ox) * nx + (p.y - oy) * ny;
        u[k] = 1.0 + (d > 0 ? alpha * d : beta * d);
    }
    return u;
}

} // namespace

TEST_CASE("empty field has an empty boundary") {
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    const FreeBoundary fb = extract_free_boundary(g, Field(g.size(), 0.0));
    CHECK(fb.empty());
}

TEST_CASE("cone extraction: circle radius and total length") {
    const Grid g = Grid::rect2d(65, 65, -1, 1, -1, 1);
    const Field u = cone_field(g);
    const FreeBoundary fb = extract_free_boundary(g, u);
    REQUIRE(!fb.segments.empty());
    for (const FbPoint& p : fb.points) {
        CHECK(std::hypot(p.x, p.y) == doctest::Approx(0.5).epsilon(2.0 * g.hx));
        // normals point toward larger u, i.e. inward
        const double dot = p.nx * (-p.x) + p.ny * (-p.y);
        CHECK(dot > 0.0);
        CHECK(std::hypot(p.nx, p.ny) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // circumference oracle 2 pi (1/2)
    CHECK(fb.total_length() == doctest::Approx(M_PI).epsilon(5.0 * g.hx / M_PI));
}

TEST_CASE("extraction consistency: interpolated u equals 1 at boundary points") {
    const Grid g = Grid::rect2d(49, 49, -1, 1, -1, 1);
    fbtest::Rng rng(3);
    Field u = fbtest::random_field(g, rng, 0.9);
    for (auto& v : u) v += 0.8;
    apply_dirichlet(g, u);
    const FreeBoundary fb = extract_free_boundary(g, u);
    REQUIRE(fb.points.size() > 8);
    for (const FbPoint& p : fb.points)
        CHECK(interp(g, u, p.x, p.y) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("segments orient the superlevel set to the left") {
    const Grid g = Grid::rect2d(65, 65, -1, 1, -1, 1);
    const Field u = cone_field(g);
    const FreeBoundary fb = extract_free_boundary(g, u);
    for (const FbSegment& s : fb.segments) {
        const double tx = s.x1 - s.x0, ty = s.y1 - s.y0;
        const double mx = 0.5 * (s.x0 + s.x1), my = 0.5 * (s.y0 + s.y1);
        // left normal of the tangent must point inward (toward u > 1)
        const double lx = -ty, ly = tx;
        CHECK(lx * (-mx) + ly * (-my) > 0.0);
    }
}

TEST_CASE("one-sided gradients on an exact planar profile") {
    const Grid g = Grid::rect2d(65, 65, -1, 1, -1, 1);
    const double alpha = 2.0, beta = std::sqrt(2.0);
    const double nx = 1.0, ny = 0.0;
    // kink on a grid line: extraction and the linear fit are exact
    const Field u = planar_field(g, alpha, beta, nx, ny, 4.0 * g.hx, 0.0);
    const FreeBoundary fb = extract_free_boundary(g, u);
    REQUIRE(!fb.points.empty());
    int used = 0;
    for (const FbPoint& p : fb.points) {
        const OneSidedGradients og = one_sided_gradients(g, u, p);
        if (!og.ok) continue;
        ++used;
        CHECK(og.alpha_hat == doctest::Approx(alpha).epsilon(1e-9));
        CHECK(og.beta_hat == doctest::Approx(beta).epsilon(1e-9));
    }
    CHECK(used > 10);

    // off-lattice kink: the extracted interface carries an O(h) offset
    const Field uo = planar_field(g, alpha, beta, nx, ny, 0.1, 0.0);
    const FreeBoundary fbo = extract_free_boundary(g, uo);
    for (const FbPoint& p : fbo.points) {
        const OneSidedGradients og = one_sided_gradients(g, uo, p);
        if (!og.ok) continue;
        CHECK(og.alpha_hat == doctest::Approx(alpha).epsilon(3.0 * g.hx));
        CHECK(og.beta_hat == doctest::Approx(beta).epsilon(3.0 * g.hx));
    }
}

TEST_CASE("one-sided gradients on the cone approach the slope") {
    const Grid g = Grid::rect2d(129, 129, -1, 1, -1, 1);
    const Field u = cone_field(g);
    const FreeBoundary fb = extract_free_boundary(g, u);
    int used = 0;
    for (const FbPoint& p : fb.points) {
        const OneSidedGradients og = one_sided_gradients(g, u, p);
        if (!og.ok) continue;
        ++used;
        // analytic gradient oracle: slope 2 on both sides, curvature bias O(h)
        CHECK(og.alpha_hat == doctest::Approx(2.0).epsilon(0.1));
        CHECK(og.beta_hat == doctest::Approx(2.0).epsilon(0.1));
    }
    CHECK(used > 50);
}

TEST_CASE("symmetric tent gives equal slopes") {
    const Grid g = Grid::rect2d(65, 65, -1, 1, -1, 1);
    const double s = 1.7;
    const Field u = planar_field(g, s, s, 0.0, 1.0, 0.0, -0.05);
    const FreeBoundary fb = extract_free_boundary(g, u);
    for (const FbPoint& p : fb.points) {
        const OneSidedGradients og = one_sided_gradients(g, u, p);
        if (!og.ok) continue;
        CHECK(og.alpha_hat == doctest::Approx(og.beta_hat).epsilon(1e-9));
        CHECK(og.alpha_hat == doctest::Approx(s).epsilon(1e-9));
    }
}

TEST_CASE("points near the domain edge are skipped with a flag") {
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    // kink close to the right wall: +-4h samples would leave the box
    const Field u = planar_field(g, 2.0, 1.0, 1.0, 0.0, 1.0 - 2.0 * g.hx, 0.0);
    const FreeBoundary fb = extract_free_boundary(g, u);
    REQUIRE(!fb.points.empty());
    for (const FbPoint& p : fb.points) {
        const OneSidedGradients og = one_sided_gradients(g, u, p);
        CHECK(!og.ok);
    }
}

TEST_CASE("radial crossing detection") {
    const Grid g = Grid::radial(3, 1.0, 129);
    Field u(g.size());
    for (int i = 0; i < g.nr; ++i) u[i] = 2.0 - 2.0 * g.r_of(i);
    const FreeBoundary fb = extract_free_boundary(g, u);
    REQUIRE(fb.points.size() == 1);
    CHECK(fb.points[0].x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fb.points[0].nx == -1.0); // superlevel set lies at smaller radii

    const OneSidedGradients og = one_sided_gradients(g, u, fb.points[0]);
    REQUIRE(og.ok);
    CHECK(og.alpha_hat == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(og.beta_hat == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("distance field basics") {
    const Grid g = Grid::rect2d(33, 33, 0, 1, 0, 1);
    Field u(g.size(), 2.0);
    const std::size_t origin = g.index(4, 4);
    u[origin] = 0.5; // single sublevel node
    const Field d = distance_to_sublevel(g, u);
    CHECK(d[origin] == 0.0);
    // 3-4-5 triangle
    CHECK(d[g.index(7, 8)] == doctest::Approx(5.0 * g.hx).epsilon(1e-12));
}

TEST_CASE("two-pass transform equals the brute-force oracle") {
    fbtest::Rng rng(41);
    const Grid g = Grid::rect2d(33, 29, -1, 1, 0, 1);
    for (int trial = 0; trial < 5; ++trial) {
        Field u(g.size());
        for (auto& v : u) v = rng.uniform(0.0, 2.0);
        const Field fast = distance_to_sublevel(g, u, false);
        const Field slow = distance_to_sublevel(g, u, true);
        for (std::size_t k = 0; k < g.size(); ++k)
            CHECK(fast[k] == doctest::Approx(slow[k]).epsilon(1e-12));
    }
}

TEST_CASE("distance field is lipschitz across neighbors") {
    fbtest::Rng rng(43);
    const Grid g = Grid::rect2d(33, 33, -1, 1, -1, 1);
    Field u(g.size());
    for (auto& v : u) v = rng.uniform(0.5, 1.6);
    const Field d = distance_to_sublevel(g, u);
    const double slack = std::hypot(g.hx, g.hy) + 1e-12;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i)
            CHECK(std::abs(d[g.index(i + 1, j)] - d[g.index(i, j)]) <= slack);
}
