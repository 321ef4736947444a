#include "fb/freeboundary.hpp"
#include "fb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <utility>

namespace fb {

double FreeBoundary::total_length() const {
    double s = 0.0;
    for (const auto& seg : segments) s += std::hypot(seg.x1 - seg.x0, seg.y1 - seg.y0);
    return s;
}

namespace {

struct CellCorner {
    double x, y, u;
};

// crossing of the value-1 level on the edge a-b (values straddle 1)
inline void edge_cross(const CellCorner& a, const CellCorner& b, double& px, double& py) {
    const double s = (1.0 - a.u) / (b.u - a.u);
    px = a.x + s * (b.x - a.x);
    py = a.y + s * (b.y - a.y);
}

// bilinear gradient of u inside the cell at (px, py)
inline void cell_gradient(const Grid& g, const Field& u, int i, int j, double px, double py,
                          double& gx, double& gy) {
    const std::size_t k = g.index(i, j);
    const double fx = (px - g.x_of(i)) / g.hx;
    const double fy = (py - g.y_of(j)) / g.hy;
    const double u00 = u[k], u10 = u[k + 1], u01 = u[k + g.nx], u11 = u[k + g.nx + 1];
    gx = ((1 - fy) * (u10 - u00) + fy * (u11 - u01)) / g.hx;
    gy = ((1 - fx) * (u01 - u00) + fx * (u11 - u10)) / g.hy;
}

} // namespace

FreeBoundary extract_free_boundary(const Grid& g, const Field& u) {
    FreeBoundary fb;
    if (g.kind == GridKind::Radial) {
        for (int i = 0; i + 1 < g.nr; ++i) {
            const bool in0 = u[i] > 1.0, in1 = u[i + 1] > 1.0;
            if (in0 == in1) continue;
            const double s = (1.0 - u[i]) / (u[i + 1] - u[i]);
            const double r = g.r_of(i) + s * g.hr;
            FbPoint p;
            p.x = r;
            p.y = 0.0;
            p.nx = in0 ? -1.0 : 1.0; // toward the superlevel side
            p.ny = 0.0;
            fb.points.push_back(p);
        }
        return fb;
    }

    std::map<std::pair<double, double>, std::size_t> seen;
    auto add_point = [&](double px, double py, int ci, int cj) {
        if (seen.count({px, py})) return;
        double gx, gy;
        cell_gradient(g, u, ci, cj, px, py, gx, gy);
        const double n = std::hypot(gx, gy);
        if (n == 0.0) return;
        seen[{px, py}] = fb.points.size();
        fb.points.push_back({px, py, gx / n, gy / n});
    };
    auto add_segment = [&](double ax, double ay, double bx, double by, int ci, int cj) {
        // orient so that the superlevel set lies to the left
        const double mx = 0.5 * (ax + bx), my = 0.5 * (ay + by);
        double gx, gy;
        cell_gradient(g, u, ci, cj, mx, my, gx, gy);
        const double tx = bx - ax, ty = by - ay;
        if (-ty * gx + tx * gy < 0.0) {
            std::swap(ax, bx);
            std::swap(ay, by);
        }
        fb.segments.push_back({ax, ay, bx, by});
        add_point(ax, ay, ci, cj);
        add_point(bx, by, ci, cj);
    };

    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const CellCorner c00{g.x_of(i), g.y_of(j), u[g.index(i, j)]};
            const CellCorner c10{g.x_of(i + 1), g.y_of(j), u[g.index(i + 1, j)]};
            const CellCorner c11{g.x_of(i + 1), g.y_of(j + 1), u[g.index(i + 1, j + 1)]};
            const CellCorner c01{g.x_of(i), g.y_of(j + 1), u[g.index(i, j + 1)]};
            const int code = (c00.u > 1.0 ? 1 : 0) | (c10.u > 1.0 ? 2 : 0) |
                             (c11.u > 1.0 ? 4 : 0) | (c01.u > 1.0 ? 8 : 0);
            if (code == 0 || code == 15) continue;

            double bx_ = 0, by_ = 0, rx = 0, ry = 0, tx = 0, ty = 0, lx = 0, ly = 0;
            const bool bottom = ((code & 1) != 0) != ((code & 2) != 0);
            const bool right = ((code & 2) != 0) != ((code & 4) != 0);
            const bool top = ((code & 4) != 0) != ((code & 8) != 0);
            const bool left = ((code & 8) != 0) != ((code & 1) != 0);
            if (bottom) edge_cross(c00, c10, bx_, by_);
            if (right) edge_cross(c10, c11, rx, ry);
            if (top) edge_cross(c01, c11, tx, ty);
            if (left) edge_cross(c00, c01, lx, ly);

            switch (code) {
                case 1: case 14: add_segment(lx, ly, bx_, by_, i, j); break;
                case 2: case 13: add_segment(bx_, by_, rx, ry, i, j); break;
                case 4: case 11: add_segment(rx, ry, tx, ty, i, j); break;
                case 8: case 7:  add_segment(tx, ty, lx, ly, i, j); break;
                case 3: case 12: add_segment(lx, ly, rx, ry, i, j); break;
                case 6: case 9:  add_segment(bx_, by_, tx, ty, i, j); break;
                case 5: case 10: {
                    // saddle: connect by the cell-average rule
                    const double avg = 0.25 * (c00.u + c10.u + c11.u + c01.u);
                    const bool center_in = avg > 1.0;
                    const bool corners_in = (code == 5); // c00 and c11 inside
                    if (center_in == corners_in) {
                        add_segment(lx, ly, bx_, by_, i, j);
                        add_segment(rx, ry, tx, ty, i, j);
                    } else {
                        add_segment(bx_, by_, rx, ry, i, j);
                        add_segment(tx, ty, lx, ly, i, j);
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return fb;
}

OneSidedGradients one_sided_gradients(const Grid& g, const Field& u, const FbPoint& p) {
    OneSidedGradients r;
    const double h = g.min_h();
    const double dists[3] = {2.0 * h, 3.0 * h, 4.0 * h};

    auto in_domain = [&](double x, double y) {
        if (g.kind == GridKind::Rect2D)
            return x >= g.ax && x <= g.bx && y >= g.ay && y <= g.by;
        return std::hypot(x, y) <= g.radius;
    };

    // least-squares fit of y ~ a d + c d^2 through the origin; the quadratic
    // term absorbs the curvature of the profile so the linear coefficient is
    // not biased at first order
    double s2 = 0, s3 = 0, s4 = 0, sdy_p = 0, sd2y_p = 0, sdy_m = 0, sd2y_m = 0;
    for (double d : dists) {
        const double xp = p.x + d * p.nx, yp = p.y + d * p.ny;
        const double xm = p.x - d * p.nx, ym = p.y - d * p.ny;
        if (!in_domain(xp, yp) || !in_domain(xm, ym)) return r; // ok = false
        const double vp = interp(g, u, xp, yp) - 1.0;
        const double vm = interp(g, u, xm, ym) - 1.0;
        s2 += d * d;
        s3 += d * d * d;
        s4 += d * d * d * d;
        sdy_p += d * vp;
        sd2y_p += d * d * vp;
        sdy_m += d * vm;
        sd2y_m += d * d * vm;
    }
    const double det = s2 * s4 - s3 * s3;
    r.alpha_hat = std::max(0.0, (s4 * sdy_p - s3 * sd2y_p) / det);
    r.beta_hat = std::max(0.0, -(s4 * sdy_m - s3 * sd2y_m) / det);
    r.ok = true;
    return r;
}

namespace {

// exact 1-D squared distance transform (lower envelope of parabolas).
// "No feature" cells carry kFar instead of infinity so the intersection
// arithmetic stays finite; kFar-rooted outputs mean "no feature anywhere".
constexpr double kFar = 1e300;

void edt_1d(const std::vector<double>& f, double h2, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    d.assign(n, 0.0);
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    const double inf = std::numeric_limits<double>::infinity();
    int k = 0;
    v[0] = 0;
    z[0] = -inf;
    z[1] = inf;
    auto intersect = [&](int q, int p) {
        return ((f[q] + h2 * q * q) - (f[p] + h2 * p * p)) / (2.0 * h2 * (q - p));
    };
    for (int q = 1; q < n; ++q) {
        double s = intersect(q, v[k]);
        while (s <= z[k]) {
            --k;
            s = intersect(q, v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < static_cast<double>(q)) ++k;
        d[q] = h2 * (q - v[k]) * (q - v[k]) + f[v[k]];
    }
}

} // namespace

Field distance_to_set(const Grid& g, const std::vector<std::uint8_t>& mask) {
    const double inf = std::numeric_limits<double>::infinity();
    Field d(g.size(), inf);

    if (g.kind == GridKind::Radial) {
        for (int i = 0; i < g.nr; ++i) {
            if (mask[i]) {
                d[i] = 0.0;
                continue;
            }
            double best = inf;
            for (int j = 0; j < g.nr; ++j)
                if (mask[j]) best = std::min(best, std::abs(g.r_of(i) - g.r_of(j)));
            d[i] = best;
        }
        return d;
    }

    // two-pass exact squared-distance transform
    std::vector<double> row(g.nx), rowd;
    std::vector<std::vector<double>> stage(g.ny, std::vector<double>(g.nx));
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) row[i] = mask[g.index(i, j)] ? 0.0 : kFar;
        edt_1d(row, g.hx * g.hx, rowd);
        stage[j] = rowd;
    }
    std::vector<double> col(g.ny), cold;
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) col[j] = stage[j][i];
        edt_1d(col, g.hy * g.hy, cold);
        for (int j = 0; j < g.ny; ++j)
            d[g.index(i, j)] = cold[j] >= 0.5 * kFar ? inf : std::sqrt(cold[j]);
    }
    return d;
}

Field distance_to_sublevel(const Grid& g, const Field& u, bool brute_force) {
    const double inf = std::numeric_limits<double>::infinity();

    if (brute_force && g.kind == GridKind::Rect2D) {
        Field d(g.size(), inf);
        std::vector<std::pair<double, double>> sub;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (u[k] <= 1.0) sub.push_back({g.coords(k).x, g.coords(k).y});
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (u[k] <= 1.0) {
                d[k] = 0.0;
                continue;
            }
            const Point p = g.coords(k);
            double best2 = inf;
            for (const auto& s : sub) {
                const double dx = p.x - s.first, dy = p.y - s.second;
                best2 = std::min(best2, dx * dx + dy * dy);
            }
            d[k] = std::sqrt(best2);
        }
        return d;
    }

    std::vector<std::uint8_t> mask(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k) mask[k] = u[k] <= 1.0 ? 1 : 0;
    return distance_to_set(g, mask);
}

void write_polyline_csv(const std::string& path, const FreeBoundary& fb,
                        std::uint64_t config_hash) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open for write: " + path);
    std::fprintf(f, "# config_hash=%016llx\n", static_cast<unsigned long long>(config_hash));
    std::fprintf(f, "x0,y0,x1,y1\n");
    for (const auto& s : fb.segments)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", s.x0, s.y0, s.x1, s.y1);
    std::fclose(f);
}

void write_normals_csv(const std::string& path, const FreeBoundary& fb,
                       std::uint64_t config_hash) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open for write: " + path);
    std::fprintf(f, "# config_hash=%016llx\n", static_cast<unsigned long long>(config_hash));
    std::fprintf(f, "x,y,nx,ny\n");
    for (const auto& p : fb.points)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", p.x, p.y, p.nx, p.ny);
    std::fclose(f);
}

} // namespace fb
