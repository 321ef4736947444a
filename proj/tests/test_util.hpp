#ifndef FB_TEST_UTIL_HPP
#define FB_TEST_UTIL_HPP

#include "fb/grid.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

namespace fbtest {

// mt19937_64 with explicit double mapping so streams are identical across
// standard libraries
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    double uniform(double a = 0.0, double b = 1.0) {
        const double t = (eng() >> 11) * 0x1.0p-53;
        return a + t * (b - a);
    }
    int index(int n) { return static_cast<int>(eng() % static_cast<std::uint64_t>(n)); }
};

// adaptive Simpson quadrature, used as an independent oracle for primitives
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb_, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb_);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson(f, m, b, fm, frm, fb_, right, tol / 2.0, depth - 1);
}

inline double integrate_1d(const std::function<double(double)>& f, double a, double b,
                           double tol = 1e-12) {
    const double fa = f(a), fb_ = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb_);
    return simpson(f, a, b, fa, fm, fb_, whole, tol, 48);
}

// random admissible field: a few sine modes, zero on Dirichlet nodes
inline fb::Field random_field(const fb::Grid& g, Rng& rng, double amp = 1.0, int modes = 3) {
    fb::Field u(g.size(), 0.0);
    if (g.kind == fb::GridKind::Rect2D) {
        for (int m = 1; m <= modes; ++m) {
            const double cx = rng.uniform(-amp, amp), cy = rng.uniform(-amp, amp);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const double sx = std::sin(m * M_PI * (g.x_of(i) - g.ax) / (g.bx - g.ax));
                    const double sy = std::sin(m * M_PI * (g.y_of(j) - g.ay) / (g.by - g.ay));
                    u[g.index(i, j)] += cx * sx * sy + cy * sx * sx * sy;
                }
        }
    } else {
        for (int m = 1; m <= modes; ++m) {
            const double c = rng.uniform(-amp, amp);
            for (int i = 0; i < g.nr; ++i)
                u[i] += c * std::cos((2 * m - 1) * M_PI * g.r_of(i) / (2.0 * g.radius));
        }
    }
    fb::apply_dirichlet(g, u);
    return u;
}

} // namespace fbtest

#endif
