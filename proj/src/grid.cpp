#include "fb/grid.hpp"
#include "fb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>

namespace fb {

Grid Grid::rect2d(int nx, int ny, double ax, double bx, double ay, double by, MaskShape mask) {
    if (nx < 17 || ny < 17)
        throw ConfigError("rect2d grid needs nx, ny >= 17");
    if (!(bx > ax) || !(by > ay))
        throw ConfigError("rect2d grid needs a nondegenerate box");
    Grid g;
    g.kind = GridKind::Rect2D;
    g.dim = 2;
    g.nx = nx;
    g.ny = ny;
    g.ax = ax;
    g.bx = bx;
    g.ay = ay;
    g.by = by;
    g.hx = (bx - ax) / (nx - 1);
    g.hy = (by - ay) / (ny - 1);
    g.mask_shape = mask;
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    g.dirichlet.assign(n, 0);
    g.w.assign(n, 0.0);

    const double cx = 0.5 * (ax + bx), cy = 0.5 * (ay + by);
    const double rdisk = 0.5 * std::min(bx - ax, by - ay);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = g.index(i, j);
            const bool edge = (i == 0 || i == nx - 1 || j == 0 || j == ny - 1);
            if (mask == MaskShape::Box) {
                g.dirichlet[k] = edge ? 1 : 0;
                const double wx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
                const double wy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
                g.w[k] = g.hx * g.hy * wx * wy;
            } else {
                const double dx = g.x_of(i) - cx, dy = g.y_of(j) - cy;
                const bool outside = edge || dx * dx + dy * dy >= rdisk * rdisk;
                g.dirichlet[k] = outside ? 1 : 0;
                g.w[k] = outside ? 0.0 : g.hx * g.hy;
            }
        }
    }
    return g;
}

Grid Grid::radial(int dim, double radius, int n) {
    if (dim != 2 && dim != 3)
        throw ConfigError("radial grid supports dim 2 or 3");
    if (n < 17)
        throw ConfigError("radial grid needs n >= 17");
    if (!(radius > 0))
        throw ConfigError("radial grid needs radius > 0");
    Grid g;
    g.kind = GridKind::Radial;
    g.dim = dim;
    g.nr = n;
    g.radius = radius;
    g.hr = radius / (n - 1);
    g.dirichlet.assign(n, 0);
    g.dirichlet[n - 1] = 1;
    g.w.assign(n, 0.0);

    const double omega = (dim == 2) ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
    auto facevol = [&](double f) { return omega * std::pow(f, dim) / dim; };
    // Exact shell volumes between faces at (i +- 1/2) h; half cells at the ends.
    for (int i = 0; i < n; ++i) {
        const double flo = (i == 0) ? 0.0 : (i - 0.5) * g.hr;
        const double fhi = (i == n - 1) ? radius : (i + 0.5) * g.hr;
        g.w[i] = facevol(fhi) - facevol(flo);
    }
    return g;
}

Point Grid::coords(std::size_t k) const {
    if (kind == GridKind::Rect2D) {
        const int i = static_cast<int>(k % nx);
        const int j = static_cast<int>(k / nx);
        return {x_of(i), y_of(j)};
    }
    return {r_of(static_cast<int>(k)), 0.0};
}

double Grid::min_h() const {
    return kind == GridKind::Rect2D ? std::min(hx, hy) : hr;
}

double Grid::volume() const {
    double s = 0.0;
    for (double v : w) s += v;
    return s;
}

Field laplacian_apply(const Grid& g, const Field& u) {
    Field out(g.size(), 0.0);
    laplacian_into(g, u, out);
    return out;
}

void laplacian_into(const Grid& g, const Field& u, Field& out) {
    out.assign(g.size(), 0.0);
    if (g.kind == GridKind::Rect2D) {
        const double ix2 = 1.0 / (g.hx * g.hx), iy2 = 1.0 / (g.hy * g.hy);
        for (int j = 1; j < g.ny - 1; ++j) {
            for (int i = 1; i < g.nx - 1; ++i) {
                const std::size_t k = g.index(i, j);
                if (g.dirichlet[k]) continue;
                out[k] = (u[k - 1] - 2.0 * u[k] + u[k + 1]) * ix2 +
                         (u[k - g.nx] - 2.0 * u[k] + u[k + g.nx]) * iy2;
            }
        }
    } else {
        const double omega = (g.dim == 2) ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
        for (int i = 0; i < g.nr - 1; ++i) {
            double flux_hi = 0.0, flux_lo = 0.0;
            const double fhi = (i + 0.5) * g.hr;
            flux_hi = omega * std::pow(fhi, g.dim - 1) * (u[i + 1] - u[i]) / g.hr;
            if (i > 0) {
                const double flo = (i - 0.5) * g.hr;
                flux_lo = omega * std::pow(flo, g.dim - 1) * (u[i] - u[i - 1]) / g.hr;
            }
            out[i] = (flux_hi - flux_lo) / g.w[i];
        }
        out[g.nr - 1] = 0.0;
    }
}

double dirichlet_form(const Grid& g, const Field& u, const Field& v) {
    double s = 0.0;
    if (g.kind == GridKind::Rect2D) {
        const double cx = g.hy / g.hx, cy = g.hx / g.hy;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i + 1 < g.nx; ++i) {
                const std::size_t k = g.index(i, j);
                s += cx * (u[k + 1] - u[k]) * (v[k + 1] - v[k]);
            }
        for (int j = 0; j + 1 < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t k = g.index(i, j);
                s += cy * (u[k + g.nx] - u[k]) * (v[k + g.nx] - v[k]);
            }
    } else {
        const double omega = (g.dim == 2) ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
        for (int i = 0; i + 1 < g.nr; ++i) {
            const double f = (i + 0.5) * g.hr;
            s += omega * std::pow(f, g.dim - 1) / g.hr * (u[i + 1] - u[i]) * (v[i + 1] - v[i]);
        }
    }
    return s;
}

double dirichlet_energy(const Grid& g, const Field& u) {
    return 0.5 * dirichlet_form(g, u, u);
}

double integrate(const Grid& g, const Field& f) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) s += g.w[k] * f[k];
    return s;
}

double dot_w(const Grid& g, const Field& a, const Field& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) s += g.w[k] * a[k] * b[k];
    return s;
}

double norm_w(const Grid& g, const Field& a) {
    return std::sqrt(dot_w(g, a, a));
}

void gradient_field(const Grid& g, const Field& u, Field& gx, Field& gy) {
    gx.assign(g.size(), 0.0);
    gy.assign(g.size(), 0.0);
    if (g.kind == GridKind::Rect2D) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t k = g.index(i, j);
                if (i == 0)
                    gx[k] = (u[k + 1] - u[k]) / g.hx;
                else if (i == g.nx - 1)
                    gx[k] = (u[k] - u[k - 1]) / g.hx;
                else
                    gx[k] = (u[k + 1] - u[k - 1]) / (2.0 * g.hx);
                if (j == 0)
                    gy[k] = (u[k + g.nx] - u[k]) / g.hy;
                else if (j == g.ny - 1)
                    gy[k] = (u[k] - u[k - g.nx]) / g.hy;
                else
                    gy[k] = (u[k + g.nx] - u[k - g.nx]) / (2.0 * g.hy);
            }
        }
    } else {
        gx[0] = 0.0; // symmetry at r = 0
        for (int i = 1; i < g.nr - 1; ++i) gx[i] = (u[i + 1] - u[i - 1]) / (2.0 * g.hr);
        gx[g.nr - 1] = (u[g.nr - 1] - u[g.nr - 2]) / g.hr;
    }
}

Field gradient_magnitude(const Grid& g, const Field& u) {
    Field gx, gy;
    gradient_field(g, u, gx, gy);
    Field m(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) m[k] = std::hypot(gx[k], gy[k]);
    return m;
}

double interp(const Grid& g, const Field& u, double px, double py) {
    if (g.kind == GridKind::Rect2D) {
        double tx = (px - g.ax) / g.hx, ty = (py - g.ay) / g.hy;
        tx = std::clamp(tx, 0.0, static_cast<double>(g.nx - 1));
        ty = std::clamp(ty, 0.0, static_cast<double>(g.ny - 1));
        int i = std::min(static_cast<int>(tx), g.nx - 2);
        int j = std::min(static_cast<int>(ty), g.ny - 2);
        const double fx = tx - i, fy = ty - j;
        const std::size_t k = g.index(i, j);
        return (1 - fx) * (1 - fy) * u[k] + fx * (1 - fy) * u[k + 1] +
               (1 - fx) * fy * u[k + g.nx] + fx * fy * u[k + g.nx + 1];
    }
    double r = std::hypot(px, py);
    r = std::clamp(r, 0.0, g.radius);
    double t = r / g.hr;
    int i = std::min(static_cast<int>(t), g.nr - 2);
    const double f = t - i;
    return (1 - f) * u[i] + f * u[i + 1];
}

void apply_dirichlet(const Grid& g, Field& u) {
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.dirichlet[k]) u[k] = 0.0;
}

namespace {

void header_dims(const Grid& g, int& n1, int& n2, double& h) {
    if (g.kind == GridKind::Rect2D) {
        n1 = g.nx;
        n2 = g.ny;
        h = g.hx;
    } else {
        n1 = g.nr;
        n2 = 1;
        h = g.hr;
    }
}

} // namespace

void write_field_csv(const std::string& path, const Grid& g, const Field& u,
                     std::uint64_t config_hash) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open for write: " + path);
    int n1, n2;
    double h;
    header_dims(g, n1, n2, h);
    std::fprintf(f, "# config_hash=%016llx\n", static_cast<unsigned long long>(config_hash));
    std::fprintf(f, "nx,ny,h\n%d,%d,%.17g\n", n1, n2, h);
    for (double v : u) std::fprintf(f, "%.17g\n", v);
    std::fclose(f);
}

Field read_field_csv(const std::string& path, const Grid& g) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for read: " + path);
    std::string line;
    std::getline(in, line); // config hash comment
    if (!std::getline(in, line) || line != "nx,ny,h")
        throw SchemaError("bad field csv header in " + path);
    std::getline(in, line);
    int n1 = 0, n2 = 0;
    double h = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%lg", &n1, &n2, &h) != 3)
        throw SchemaError("bad field csv dims in " + path);
    int gn1, gn2;
    double gh;
    header_dims(g, gn1, gn2, gh);
    if (n1 != gn1 || n2 != gn2)
        throw SchemaError("field csv dims do not match grid in " + path);
    Field u;
    u.reserve(g.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        u.push_back(std::strtod(line.c_str(), nullptr));
    }
    if (u.size() != g.size())
        throw SchemaError("field csv node count does not match grid in " + path);
    return u;
}

namespace {
constexpr char kFieldMagic[8] = {'F', 'B', 'F', 'L', 'D', '1', 0, 0};
}

void write_field_bin(const std::string& path, const Grid& g, const Field& u,
                     std::uint64_t config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for write: " + path);
    int n1, n2;
    double h;
    header_dims(g, n1, n2, h);
    const std::uint32_t kind = (g.kind == GridKind::Rect2D) ? 0u : 1u;
    const std::uint64_t count = u.size();
    out.write(kFieldMagic, 8);
    out.write(reinterpret_cast<const char*>(&kind), 4);
    const std::uint32_t d1 = n1, d2 = n2;
    out.write(reinterpret_cast<const char*>(&d1), 4);
    out.write(reinterpret_cast<const char*>(&d2), 4);
    out.write(reinterpret_cast<const char*>(&h), 8);
    out.write(reinterpret_cast<const char*>(&config_hash), 8);
    out.write(reinterpret_cast<const char*>(&count), 8);
    out.write(reinterpret_cast<const char*>(u.data()), static_cast<std::streamsize>(count * 8));
    if (!out) throw IoError("write failed: " + path);
}

Field read_field_bin(const std::string& path, const Grid& g) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for read: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kFieldMagic, 8) != 0)
        throw SchemaError("bad field binary magic in " + path);
    std::uint32_t kind, d1, d2;
    double h;
    std::uint64_t hash, count;
    in.read(reinterpret_cast<char*>(&kind), 4);
    in.read(reinterpret_cast<char*>(&d1), 4);
    in.read(reinterpret_cast<char*>(&d2), 4);
    in.read(reinterpret_cast<char*>(&h), 8);
    in.read(reinterpret_cast<char*>(&hash), 8);
    in.read(reinterpret_cast<char*>(&count), 8);
    int gn1, gn2;
    double gh;
    header_dims(g, gn1, gn2, gh);
    if (!in || kind != (g.kind == GridKind::Rect2D ? 0u : 1u) ||
        d1 != static_cast<std::uint32_t>(gn1) || d2 != static_cast<std::uint32_t>(gn2) ||
        count != g.size())
        throw SchemaError("field binary header does not match grid in " + path);
    Field u(count);
    in.read(reinterpret_cast<char*>(u.data()), static_cast<std::streamsize>(count * 8));
    if (!in) throw IoError("short read: " + path);
    return u;
}

} // namespace fb
