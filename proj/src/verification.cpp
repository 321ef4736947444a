#include "fb/verification.hpp"
#include "fb/errors.hpp"
#include "fb/functional.hpp"
#include "fb/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fb {

namespace {

double percentile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double idx = p * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double f = idx - lo;
    return (1.0 - f) * v[lo] + f * v[hi];
}

// quintic smoothstep and its derivative
double smoothstep(double s) {
    s = std::clamp(s, 0.0, 1.0);
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}
double smoothstep_d(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double t = 1.0 - s;
    return 30.0 * s * s * t * t;
}

constexpr double kCutMargin = 0.15;

// cutoff ramp on [0,1]: 0 at the ends with vanishing slope, 1 in the middle
void ramp(double t, double& q, double& dq) {
    if (t < kCutMargin) {
        q = smoothstep(t / kCutMargin);
        dq = smoothstep_d(t / kCutMargin) / kCutMargin;
    } else if (t > 1.0 - kCutMargin) {
        q = smoothstep((1.0 - t) / kCutMargin);
        dq = -smoothstep_d((1.0 - t) / kCutMargin) / kCutMargin;
    } else {
        q = 1.0;
        dq = 0.0;
    }
}

struct PolyPair {
    // P and Q with constant gradients: P = c0 + cx x + cy y
    double p0, px, py;
    double q0, qx, qy;
};

const PolyPair kPhiPolys[8] = {
    {1, 0, 0, 0, 0, 0},   // (eta, 0)
    {0, 0, 0, 1, 0, 0},   // (0, eta)
    {0, 1, 0, 0, 0, 0},   // (x eta, 0)
    {0, 0, 0, 0, 0, 1},   // (0, y eta)
    {0, 0, 1, 0, 0, 0},   // (y eta, 0)
    {0, 0, 0, 0, 1, 0},   // (0, x eta)
    {0, 1, 0, 0, 0, 1},   // (x eta, y eta)
    {0, 0, 1, 0, -1, 0},  // (y eta, -x eta)
};

const char* kPhiNames[8] = {"e1", "e2", "x_e1", "y_e2", "y_e1", "x_e2", "dilate", "rotate"};

double radial_phi(const Grid& g, int k, double r, double& dphi, double& phi_over_r) {
    // phi_k(r) = 4 r^(k+1) (R - r) / R^(k+2)
    const double R = g.radius;
    const double s = r / R;
    double sk = 1.0;
    for (int i = 0; i < k; ++i) sk *= s;
    const double phi = 4.0 * sk * s * (R - r) / R;
    dphi = 4.0 * (sk * (k + 1) * (R - r) - sk * s * R) / (R * R);
    phi_over_r = 4.0 * sk * (R - r) / (R * R);
    return phi;
}

} // namespace

int phi_catalog_size(const Grid&) { return 8; }

PhiField phi_eval(const Grid& g, int which, double x, double y) {
    PhiField f;
    if (g.kind == GridKind::Radial) {
        double dphi, por;
        const double phi = radial_phi(g, which, x, dphi, por);
        f.name = "radial_" + std::to_string(which);
        f.px = phi;
        f.py = 0.0;
        f.dxx = dphi;
        f.dyy = por; // tangential stretch phi/r
        return f;
    }
    double qx_, dqx, qy_, dqy;
    ramp((x - g.ax) / (g.bx - g.ax), qx_, dqx);
    ramp((y - g.ay) / (g.by - g.ay), qy_, dqy);
    dqx /= (g.bx - g.ax);
    dqy /= (g.by - g.ay);
    const double eta = qx_ * qy_;
    const double eta_x = dqx * qy_;
    const double eta_y = qx_ * dqy;
    const PolyPair& pp = kPhiPolys[which];
    const double P = pp.p0 + pp.px * x + pp.py * y;
    const double Q = pp.q0 + pp.qx * x + pp.qy * y;
    f.name = kPhiNames[which];
    f.px = P * eta;
    f.py = Q * eta;
    f.dxx = pp.px * eta + P * eta_x;
    f.dxy = pp.py * eta + P * eta_y;
    f.dyx = pp.qx * eta + Q * eta_x;
    f.dyy = pp.qy * eta + Q * eta_y;
    return f;
}

double phi_c1_norm(const Grid& g, int which) {
    double m = 0.0;
    if (g.kind == GridKind::Radial) {
        for (int i = 0; i < g.nr; ++i) {
            double dphi, por;
            const double phi = radial_phi(g, which, g.r_of(i), dphi, por);
            m = std::max({m, std::abs(phi), std::abs(dphi), std::abs(por)});
        }
        return m;
    }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const PhiField f = phi_eval(g, which, g.x_of(i), g.y_of(j));
            m = std::max({m, std::abs(f.px), std::abs(f.py), std::abs(f.dxx), std::abs(f.dxy),
                          std::abs(f.dyx), std::abs(f.dyy)});
        }
    return m;
}

FbConditionReport check_fb_condition(const Grid& g, const Field& u, const FreeBoundary& fb,
                                     const VerifyOptions& opt) {
    FbConditionReport rep;
    rep.points_total = static_cast<int>(fb.points.size());
    if (fb.empty()) {
        rep.trivial = true;
        return rep;
    }
    std::vector<double> res, abs_res;
    for (const FbPoint& p : fb.points) {
        const OneSidedGradients og = one_sided_gradients(g, u, p);
        if (!og.ok) continue;
        const double v = og.alpha_hat * og.alpha_hat - og.beta_hat * og.beta_hat - 2.0;
        res.push_back(v);
        abs_res.push_back(std::abs(v));
    }
    rep.points_used = static_cast<int>(res.size());
    if (res.empty()) {
        rep.trivial = true;
        return rep;
    }
    rep.median_abs = percentile(abs_res, 0.5);
    rep.median_signed = percentile(res, 0.5);
    rep.iqr = percentile(res, 0.75) - percentile(res, 0.25);
    rep.worst_decile = percentile(abs_res, 0.9);
    rep.pass = rep.median_abs <= opt.fb_median_max;
    return rep;
}

NondegeneracyReport check_nondegeneracy(const Grid& g, const Field& u, const FreeBoundary& fb,
                                        const VerifyOptions& opt) {
    NondegeneracyReport rep;
    const double h = g.min_h();
    rep.r0 = opt.nondeg_r0_factor * h;
    rep.r_min = opt.nondeg_r_min_factor * h;

    bool any_super = false;
    for (double v : u)
        if (v > 1.0) {
            any_super = true;
            break;
        }
    if (!any_super) {
        rep.trivial = true;
        return rep;
    }

    const Field dist = distance_to_sublevel(g, u);
    double cmin = std::numeric_limits<double>::infinity();
    int samples = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!(u[k] > 1.0) || g.w[k] == 0.0) continue;
        double r = dist[k];
        if (r > rep.r0 + 2.0 * h) continue;
        // refine with the extracted boundary vertices: they lie on {u = 1}
        const Point p = g.coords(k);
        for (const FbPoint& q : fb.points) {
            const double dx = p.x - q.x, dy = p.y - q.y;
            if (std::abs(dx) >= r || std::abs(dy) >= r) continue;
            r = std::min(r, std::hypot(dx, dy));
        }
        if (r < rep.r_min || r > rep.r0) continue;
        cmin = std::min(cmin, (u[k] - 1.0) / r);
        ++samples;
    }
    rep.samples = samples;
    rep.empirical_c = samples > 0 ? cmin : 0.0;
    rep.pass = samples > 0 && rep.empirical_c >= opt.nondeg_c_min;
    return rep;
}

DensityReport check_density(const Grid& g, const Field& u, const FreeBoundary& fb,
                            const VerifyOptions& opt) {
    DensityReport rep;
    if (fb.points.empty()) {
        rep.trivial = true;
        return rep;
    }
    const double h = g.min_h();
    const int stride =
        std::max(1, static_cast<int>(fb.points.size()) / std::max(1, opt.max_fb_samples));

    for (std::size_t pi = 0; pi < fb.points.size(); pi += stride) {
        const FbPoint& p = fb.points[pi];
        for (double fac : opt.density_radii_factors) {
            const double r = fac * h;
            DensityEntry e;
            e.x = p.x;
            e.y = p.y;
            e.r = r;
            if (g.kind == GridKind::Rect2D) {
                if (p.x - r < g.ax || p.x + r > g.bx || p.y - r < g.ay || p.y + r > g.by) {
                    ++rep.skipped;
                    continue;
                }
                const int i0 = std::max(0, static_cast<int>((p.x - r - g.ax) / g.hx));
                const int i1 = std::min(g.nx - 1, static_cast<int>((p.x + r - g.ax) / g.hx) + 1);
                const int j0 = std::max(0, static_cast<int>((p.y - r - g.ay) / g.hy));
                const int j1 = std::min(g.ny - 1, static_cast<int>((p.y + r - g.ay) / g.hy) + 1);
                for (int j = j0; j <= j1; ++j)
                    for (int i = i0; i <= i1; ++i) {
                        const double dx = g.x_of(i) - p.x, dy = g.y_of(j) - p.y;
                        if (dx * dx + dy * dy > r * r) continue;
                        ++e.count_total;
                        if (u[g.index(i, j)] > 1.0) ++e.count_super;
                    }
            } else {
                // radial mode: fraction along the radial line through the point
                const double r0 = p.x;
                if (r0 - r < 0.0 || r0 + r > g.radius) {
                    ++rep.skipped;
                    continue;
                }
                const int i0 = std::max(0, static_cast<int>((r0 - r) / g.hr));
                const int i1 = std::min(g.nr - 1, static_cast<int>((r0 + r) / g.hr) + 1);
                for (int i = i0; i <= i1; ++i) {
                    if (std::abs(g.r_of(i) - r0) > r) continue;
                    ++e.count_total;
                    if (u[i] > 1.0) ++e.count_super;
                }
            }
            if (e.count_total == 0) {
                ++rep.skipped;
                continue;
            }
            e.fraction = static_cast<double>(e.count_super) / e.count_total;
            rep.min_fraction = std::min(rep.min_fraction, e.fraction);
            rep.max_fraction = std::max(rep.max_fraction, e.fraction);
            rep.entries.push_back(e);
        }
    }
    rep.pass = !rep.entries.empty() && rep.min_fraction >= opt.density_c_min &&
               rep.max_fraction <= 1.0 - opt.density_c_min;
    return rep;
}

VariationalReport check_variational_identity(const Grid& g, const NonlinearityModel& m,
                                             double eps, const Field& u,
                                             const VerifyOptions& opt) {
    VariationalReport rep;
    rep.eps = eps;

    Field gx, gy;
    gradient_field(g, u, gx, gy);

    // residual of the regularized equation (eps > 0), or the smooth part of
    // the sharp gradient (eps == 0)
    Field r(g.size(), 0.0);
    if (eps > 0.0) {
        RegularizedFunctional F(g, m, eps);
        F.residual_into(u, r);
    } else {
        sharp_residual_into(g, m, u, r);
    }
    rep.res_norm = norm_w(g, r);

    const int nphi = phi_catalog_size(g);
    rep.pass = true;
    for (int which = 0; which < nphi; ++which) {
        VariationalEntry e;
        e.phi = g.kind == GridKind::Radial ? "radial_" + std::to_string(which)
                                           : kPhiNames[which];
        e.phi_c1 = phi_c1_norm(g, which);
        double quad = 0.0, pairing = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.w[k] == 0.0) continue;
            const Point p = g.coords(k);
            const PhiField f = phi_eval(g, which, p.x, p.y);
            const double s = u[k] - 1.0;
            const double up = s > 0.0 ? s : 0.0;
            const double pot = eps > 0.0 ? bump_B(s / eps) : (s > 0.0 ? 1.0 : 0.0);
            double div, contraction, transport;
            if (g.kind == GridKind::Radial) {
                div = f.dxx + (g.dim - 1) * f.dyy; // phi' + (N-1) phi/r
                contraction = gx[k] * gx[k] * f.dxx;
                transport = f.px * gx[k];
            } else {
                div = f.dxx + f.dyy;
                contraction = gx[k] * (f.dxx * gx[k] + f.dxy * gy[k]) +
                              gy[k] * (f.dyx * gx[k] + f.dyy * gy[k]);
                transport = f.px * gx[k] + f.py * gy[k];
            }
            const double ed = 0.5 * (gx[k] * gx[k] + gy[k] * gy[k]) + pot - m.G(p, up);
            quad += g.w[k] * (ed * div - contraction);
            pairing += g.w[k] * r[k] * (-transport);
        }
        e.quad = quad;
        e.pairing = pairing;
        e.bound = opt.variational_factor * rep.res_norm * e.phi_c1;
        rep.max_abs_quad = std::max(rep.max_abs_quad, std::abs(quad));
        if (std::abs(e.pairing) > e.bound) rep.pass = false;
        rep.entries.push_back(e);
    }
    return rep;
}

EnergyReport check_energy_convergence(const Grid& g, const SolveTrace& trace,
                                      const VerifyOptions& opt) {
    EnergyReport rep;
    const double h = g.min_h();
    rep.pass = true;
    for (const TraceEntry& te : trace.entries) {
        EnergyRow row;
        row.eps = te.eps;
        row.J_eps = te.level;
        row.J_sharp = te.level_sharp;
        row.band = band_measure(g, te.u, 1.0, 1.0 + te.eps);
        row.tie_band = tie_band_measure(g, te.u, opt.tie_band_factor * h);
        row.grad_norm = te.grad_norm;
        const double scale = 1.0 + std::abs(row.J_sharp);
        // pointwise B <= chi makes both inequalities exact up to rounding
        row.sandwich_ok = row.J_eps <= row.J_sharp + 1e-12 * scale &&
                          row.J_sharp - row.J_eps <= row.band + 1e-12 * scale;
        rep.pass = rep.pass && row.sandwich_ok;
        rep.rows.push_back(row);
    }
    if (!trace.entries.empty()) rep.level_last = trace.entries.back().level;
    rep.pass = rep.pass && !trace.entries.empty();
    return rep;
}

LipschitzReport check_lipschitz(const Grid& g, const SolveTrace& trace,
                                const VerifyOptions& opt) {
    LipschitzReport rep;
    if (trace.entries.empty()) return rep;

    auto boundary_distance = [&](std::size_t k) {
        const Point p = g.coords(k);
        if (g.kind == GridKind::Radial) return g.radius - p.x;
        if (g.mask_shape == MaskShape::Disk) {
            const double cx = 0.5 * (g.ax + g.bx), cy = 0.5 * (g.ay + g.by);
            const double rd = 0.5 * std::min(g.bx - g.ax, g.by - g.ay);
            return rd - std::hypot(p.x - cx, p.y - cy);
        }
        return std::min(std::min(p.x - g.ax, g.bx - p.x), std::min(p.y - g.ay, g.by - p.y));
    };

    // delta0 from the finest iterate: distance from {u >= 1} to the boundary
    const Field& ufine = trace.entries.back().u;
    double delta0 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.size(); ++k)
        if (ufine[k] >= 1.0) delta0 = std::min(delta0, boundary_distance(k));
    if (!std::isfinite(delta0)) delta0 = 0.25 * std::sqrt(g.volume());
    rep.delta0 = delta0;

    std::vector<double> sups;
    for (const TraceEntry& te : trace.entries) {
        const Field mag = gradient_magnitude(g, te.u);
        double sup = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (boundary_distance(k) >= 0.5 * delta0) sup = std::max(sup, mag[k]);
        rep.rows.push_back({te.eps, sup});
        sups.push_back(sup);
    }
    const double med = percentile(sups, 0.5);
    rep.pass = rep.rows.back().sup_grad <= opt.lipschitz_ratio * std::max(med, 1e-300);
    return rep;
}

AuxReport check_aux(const Grid& g, const NonlinearityModel& m, const Field& u,
                    const FreeBoundary& fb, const VerifyOptions& opt) {
    AuxReport rep;
    const double h = g.min_h();

    // harmonicity on int{u <= 1} away from the interface
    std::vector<std::uint8_t> super(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k) super[k] = u[k] > 1.0 ? 1 : 0;
    const Field dsup = distance_to_set(g, super);
    const Field lap = laplacian_apply(g, u);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.dirichlet[k] || super[k] || dsup[k] < 2.0 * h) continue;
        rep.harmonicity_sup = std::max(rep.harmonicity_sup, std::abs(lap[k]));
        ++rep.harmonicity_nodes;
    }

    // ring averages of (u-1)_+ over boundary-centered spheres
    rep.ring_nu = std::numeric_limits<double>::infinity();
    const int stride =
        std::max(1, static_cast<int>(fb.points.size()) / std::max(1, opt.max_fb_samples));
    for (std::size_t pi = 0; pi < fb.points.size(); pi += stride) {
        const FbPoint& p = fb.points[pi];
        for (double fac : opt.ring_radii_factors) {
            const double r = fac * h;
            double avg = 0.0;
            if (g.kind == GridKind::Rect2D) {
                if (p.x - r < g.ax || p.x + r > g.bx || p.y - r < g.ay || p.y + r > g.by) continue;
                for (int a = 0; a < opt.ring_angles; ++a) {
                    const double th = 2.0 * std::numbers::pi * a / opt.ring_angles;
                    const double v =
                        interp(g, u, p.x + r * std::cos(th), p.y + r * std::sin(th)) - 1.0;
                    avg += std::max(v, 0.0);
                }
                avg /= opt.ring_angles;
            } else {
                const double r0 = p.x;
                if (r0 + r > g.radius) continue;
                double wsum = 0.0;
                for (int a = 0; a < opt.ring_angles; ++a) {
                    const double th = std::numbers::pi * (a + 0.5) / opt.ring_angles;
                    const double wt = g.dim == 3 ? std::sin(th) : 1.0;
                    const double rho =
                        std::sqrt(r0 * r0 + r * r + 2.0 * r0 * r * std::cos(th));
                    const double v = interp(g, u, rho, 0.0) - 1.0;
                    avg += wt * std::max(v, 0.0);
                    wsum += wt;
                }
                avg /= wsum;
            }
            rep.ring_nu = std::min(rep.ring_nu, avg / r);
            ++rep.ring_samples;
        }
    }
    if (rep.ring_samples == 0) rep.ring_nu = 0.0;

    // positivity and the maximum-principle majorant -Δ phi0 = A0
    double A0 = 0.0, umin = u.empty() ? 0.0 : u[0], umax = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double s = u[k] - 1.0;
        A0 = std::max(A0, std::abs(m.g(g.coords(k), s > 0.0 ? s : 0.0)));
        umin = std::min(umin, u[k]);
        umax = std::max(umax, u[k]);
    }
    rep.majorant_A0 = A0;
    rep.min_u = umin;
    Field rhs(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (!g.dirichlet[k]) rhs[k] = A0;
    OperatorSpec A{&g, 1.0, nullptr, 0.0};
    const Field phi0 = linear_solve(A, rhs, 1e-10);
    double viol = 0.0, phimax = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        viol = std::max(viol, u[k] - phi0[k]);
        phimax = std::max(phimax, phi0[k]);
    }
    rep.majorant_violation = std::max(viol, 0.0);

    rep.pass = umin >= -1e-9 * std::max(1.0, umax) &&
               rep.majorant_violation <= 1e-7 * std::max(1.0, phimax) &&
               rep.harmonicity_sup <= opt.harmonicity_max;
    return rep;
}

CriticalReport check_critical_threshold(const NonlinearityModel& m, const SolveTrace& trace) {
    CriticalReport rep;
    const auto* cc = std::get_if<CriticalCombo>(&m.variant);
    if (!cc) return rep;
    rep.applicable = true;
    rep.sobolev = sobolev_constant(cc->dim);
    rep.threshold = std::pow(rep.sobolev, cc->dim / 2.0) /
                    (cc->dim * std::pow(cc->kappa, cc->dim / 2.0 - 1.0));
    rep.worst_level = -std::numeric_limits<double>::infinity();
    for (const TraceEntry& te : trace.entries) rep.worst_level = std::max(rep.worst_level, te.level);
    rep.pass = rep.worst_level < rep.threshold;
    return rep;
}

double sobolev_constant(int dim) {
    if (dim < 3) throw std::domain_error("sobolev constant needs N >= 3");
    const double n = dim;
    const double sphere = 2.0 * std::pow(std::numbers::pi, (n + 1.0) / 2.0) /
                          std::tgamma((n + 1.0) / 2.0); // |S^N|
    return n * (n - 2.0) / 4.0 * std::pow(sphere, 2.0 / n);
}

bool VerificationReport::all_pass() const {
    bool var_ok = true;
    for (const auto& v : variational) var_ok = var_ok && v.pass;
    return fb.pass && nondeg.pass && density.pass && var_ok && energy.pass && lipschitz.pass &&
           aux.pass && critical.pass;
}

VerificationReport run_verification(const Grid& g, const NonlinearityModel& m,
                                    const SolveTrace& trace, const VerifyOptions& opt) {
    if (trace.entries.empty()) throw ConfigError("verification needs a nonempty trace");
    VerificationReport rep;
    rep.options = opt;
    const Field& u = trace.entries.back().u;
    const FreeBoundary fb = extract_free_boundary(g, u);

    rep.fb = check_fb_condition(g, u, fb, opt);
    rep.nondeg = check_nondegeneracy(g, u, fb, opt);
    rep.density = check_density(g, u, fb, opt);
    for (const TraceEntry& te : trace.entries) {
        VariationalReport vr = check_variational_identity(g, m, te.eps, te.u, opt);
        vr.source_eps = te.eps;
        rep.variational.push_back(std::move(vr));
    }
    // sharp (chi) form on the last two iterates for the refinement trend
    const std::size_t first_sharp =
        trace.entries.size() > 1 ? trace.entries.size() - 2 : 0;
    for (std::size_t i = first_sharp; i < trace.entries.size(); ++i) {
        VariationalReport vr = check_variational_identity(g, m, 0.0, trace.entries[i].u, opt);
        vr.source_eps = trace.entries[i].eps;
        rep.variational.push_back(std::move(vr));
    }
    rep.energy = check_energy_convergence(g, trace, opt);
    rep.lipschitz = check_lipschitz(g, trace, opt);
    rep.aux = check_aux(g, m, u, fb, opt);
    rep.critical = check_critical_threshold(m, trace);
    return rep;
}

} // namespace fb
