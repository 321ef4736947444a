#include "fb/solver.hpp"
#include "fb/linsolve.hpp"
#include "fb/solver_detail.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numbers>

namespace fb {

EpsSchedule EpsSchedule::geometric(double eps1, double ratio, double eps_min) {
    if (!(eps1 > 0.0) || !(eps_min > 0.0) || eps_min > eps1)
        throw ConfigError("eps schedule needs eps1 >= eps_min > 0");
    if (!(ratio > 0.0 && ratio < 1.0))
        throw ConfigError("eps schedule needs ratio in (0,1)");
    EpsSchedule s;
    for (double e = eps1; e >= eps_min * (1.0 - 1e-12); e *= ratio) s.levels.push_back(e);
    if (s.levels.empty()) s.levels.push_back(eps1);
    return s;
}

EpsSchedule EpsSchedule::for_grid(const Grid& g, double first_factor, double last_factor,
                                  double ratio) {
    const double h = g.min_h();
    return geometric(first_factor * h, ratio, last_factor * h);
}

Field make_endpoint(const RegularizedFunctional& F, const Field& u0) {
    const Grid& g = *F.grid;
    const Field up = plus_part(u0);
    const Field um = minus_part(u0);
    double mx = 0.0;
    for (double v : up) mx = std::max(mx, v);
    if (!(mx > 0.0)) throw ModelError("endpoint construction needs (u0 - 1)_+ != 0");

    double t = 1.0;
    Field e(g.size());
    for (int k = 0; k < 60; ++k) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = um[i] + t * up[i];
        if (F.eval_Jeps(e) < 0.0) return e;
        t *= 2.0;
    }
    throw ModelError("no negative-energy endpoint after 60 doublings (superlinearity violated)");
}

std::vector<Field> initial_path(const Grid& g, const Field& endpoint, int size) {
    if (size < 3) throw ConfigError("path needs at least 3 fields");
    // follow the fibering construction: grow the subunit part first, then
    // sweep the ray u_minus + t u_plus out to the endpoint
    const Field up = plus_part(endpoint);
    const Field um = minus_part(endpoint);
    const int leg = std::max(2, size / 4);
    std::vector<Field> path;
    path.reserve(size);
    for (int i = 0; i < leg; ++i) {
        const double s = static_cast<double>(i) / leg;
        Field f(g.size());
        for (std::size_t k = 0; k < f.size(); ++k) f[k] = s * um[k];
        path.push_back(std::move(f));
    }
    for (int i = leg; i < size; ++i) {
        const double t = static_cast<double>(i - leg + 1) / (size - leg);
        Field f(g.size());
        for (std::size_t k = 0; k < f.size(); ++k) f[k] = um[k] + t * up[k];
        path.push_back(std::move(f));
    }
    return path;
}

namespace {

// uniform re-discretization of the path by cumulative weighted-L2 arclength
void resample_path(const Grid& g, std::vector<Field>& path) {
    const int m = static_cast<int>(path.size());
    std::vector<double> s(m, 0.0);
    for (int i = 1; i < m; ++i) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < path[i].size(); ++k) {
            const double d = path[i][k] - path[i - 1][k];
            d2 += g.w[k] * d * d;
        }
        s[i] = s[i - 1] + std::sqrt(d2);
    }
    const double total = s[m - 1];
    if (!(total > 0.0)) return;

    std::vector<Field> fresh(m);
    fresh[0] = path[0];
    fresh[m - 1] = path[m - 1];
    int seg = 0;
    for (int j = 1; j + 1 < m; ++j) {
        const double target = total * j / (m - 1);
        while (seg + 2 < m && s[seg + 1] < target) ++seg;
        const double len = s[seg + 1] - s[seg];
        const double th = len > 0.0 ? (target - s[seg]) / len : 0.0;
        Field f(path[j].size());
        for (std::size_t k = 0; k < f.size(); ++k)
            f[k] = (1.0 - th) * path[seg][k] + th * path[seg + 1][k];
        fresh[j] = std::move(f);
    }
    path.swap(fresh);
}

} // namespace

namespace {

// J_eps along the fibering ray u_minus + t u_plus. Only the plus-part
// support enters the t-dependent terms (u_minus = 1 there), so evaluation is
// cheap; the quadratic part carries the discrete cross term.
struct RayObjective {
    const RegularizedFunctional* F;
    double a0, a1, a2; // (1/2)||grad um||^2, <grad um, grad up>, ||grad up||^2
    struct Node {
        double w;
        Point x;
        double up;
    };
    std::vector<Node> sup;
    double base; // t-independent potential of the off-support nodes

    RayObjective(const RegularizedFunctional& f, const Field& um, const Field& up) : F(&f) {
        const Grid& g = *f.grid;
        a0 = dirichlet_energy(g, um);
        a1 = dirichlet_form(g, um, up);
        a2 = dirichlet_form(g, up, up);
        base = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.w[k] == 0.0) continue;
            if (up[k] > 0.0)
                sup.push_back({g.w[k], g.coords(k), up[k]});
            else
                base += g.w[k] * bump_B((um[k] - 1.0) / f.eps);
        }
    }

    double operator()(double t) const {
        double s = a0 + a1 * t + 0.5 * a2 * t * t + base;
        for (const Node& nd : sup)
            s += nd.w * (bump_B(t * nd.up / F->eps) - F->model.G(nd.x, t * nd.up));
        return s;
    }

    double golden(double lo, double hi) const {
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = (*this)(x1), f2 = (*this)(x2);
        for (int it = 0; it < 60 && hi - lo > 1e-8 * hi; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = (*this)(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = (*this)(x1);
            }
        }
        return 0.5 * (lo + hi);
    }

    // scan + golden-section refinement of the ray maximum on (0, t_hi]
    double argmax(double t_hi) const {
        const int scan = 80;
        double best_t = t_hi, best_v = -std::numeric_limits<double>::infinity();
        for (int i = 1; i <= scan; ++i) {
            const double t = t_hi * i / scan;
            const double v = (*this)(t);
            if (v > best_v) {
                best_v = v;
                best_t = t;
            }
        }
        return golden(std::max(1e-12, best_t - t_hi / scan), std::min(t_hi, best_t + t_hi / scan));
    }

    // localized refinement around a previous maximizer; falls back to the
    // full scan when the hint is not an interior bracket
    double argmax_near(double hint, double t_hi) const {
        const double lo = hint / 1.5, hi = std::min(t_hi, hint * 1.5);
        const double fl = (*this)(lo), fm = (*this)(hint), fh = (*this)(hi);
        if (!(fm >= fl && fm >= fh)) return argmax(t_hi);
        return golden(lo, hi);
    }
};

} // namespace

namespace detail {

// re-maximize J_eps along the fibering ray through u; returns false when the
// positive part is gone. A positive *t_hint localizes the search and returns
// the maximizer for the next warm start.
bool ray_remax(const RegularizedFunctional& F, Field& u, double& level, double* t_hint) {
    const Grid& g = *F.grid;
    const Field up = plus_part(u);
    double upmax = 0.0;
    for (double v : up) upmax = std::max(upmax, v);
    if (!(upmax > 0.0)) return false;
    const Field um = minus_part(u);
    const RayObjective ray(F, um, up);
    double t;
    if (t_hint && *t_hint > 0.0) {
        t = ray.argmax_near(*t_hint, 1e6);
    } else {
        // bracket: the ray eventually goes negative by superlinearity
        double t_hi = 4.0;
        for (int k = 0; k < 40 && ray(t_hi) > 0.0; ++k) t_hi *= 2.0;
        t = ray.argmax(t_hi);
    }
    if (t_hint) *t_hint = t;
    for (std::size_t k = 0; k < g.size(); ++k) u[k] = um[k] + t * up[k];
    level = ray(t);
    return true;
}

// constrained descent toward the saddle: gradient step on J_eps followed by
// re-maximization along the current fibering ray. Fixed points are critical
// points of J_eps with a nondegenerate ray maximum.
bool constrained_descent(const RegularizedFunctional& F, Field& u, double tol, int max_iters,
                         double& grad_norm) {
    const Grid& g = *F.grid;
    const std::size_t n = g.size();
    double level;
    double t_hint = 0.0;
    if (!ray_remax(F, u, level, &t_hint)) {
        Field r0;
        F.residual_into(u, r0);
        grad_norm = norm_w(g, r0);
        return false;
    }

    Field r(n), cand(n);
    double alpha = 0.25 * g.min_h() * g.min_h();
    int stall = 0;
    for (int it = 0; it < max_iters && stall < 25; ++it) {
        F.residual_into(u, r);
        grad_norm = norm_w(g, r);
        if (grad_norm <= tol) return true;
        if (it % 64 == 0) t_hint = 0.0; // periodic full rescan of the ray
        double step = std::clamp(2.0 * alpha, 1e-14, 1e3);
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t k = 0; k < n; ++k) cand[k] = u[k] - step * r[k];
            double lc;
            double th = t_hint;
            Field trial = cand;
            if (ray_remax(F, trial, lc, &th) && lc < level - 1e-14 * (1.0 + std::abs(level))) {
                const double drop = level - lc;
                u.swap(trial);
                level = lc;
                alpha = step;
                t_hint = th;
                accepted = true;
                stall = drop < 1e-10 * (1.0 + std::abs(level)) ? stall + 1 : 0;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) ++stall;
    }
    F.residual_into(u, r);
    grad_norm = norm_w(g, r);
    return grad_norm <= tol;
}

// transverse refinement of a near-saddle iterate: descend the residual with
// its component along the fibering direction reflected (ascent along the
// ridge, descent across it). d = r - 2 <r,tau> tau vanishes only at r = 0.
bool refine_maximizer(const RegularizedFunctional& F, Field& u, const Field& tangent,
                      double tol, int max_iters, double& grad_norm) {
    const Grid& g = *F.grid;
    const std::size_t n = g.size();

    Field tau(n, 0.0);
    auto update_tau = [&]() {
        Field t = plus_part(u);
        double tn = norm_w(g, t);
        if (tn == 0.0) {
            t = tangent;
            tn = norm_w(g, t);
        }
        if (tn > 0.0)
            for (std::size_t k = 0; k < n; ++k) tau[k] = t[k] / tn;
    };

    Field r(n), d(n), d_prev(n), u_prev(n), cand(n), rc(n), dc(n);
    auto reflected = [&](const Field& res, Field& out) {
        const double rt = dot_w(g, res, tau);
        for (std::size_t k = 0; k < n; ++k) out[k] = res[k] - 2.0 * rt * tau[k];
    };

    update_tau();
    F.residual_into(u, r);
    double rn = norm_w(g, r);
    reflected(r, d);
    double dn = norm_w(g, d);
    double step = 0.25 * g.min_h() * g.min_h();
    bool have_prev = false;

    Field best_u = u;
    double best_rn = rn;
    int since_best = 0;

    for (int it = 0; it < max_iters; ++it) {
        grad_norm = rn;
        if (rn <= tol) return true;

        if (have_prev) {
            // Barzilai-Borwein step on the reflected force
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double du = u[k] - u_prev[k];
                const double dd = d[k] - d_prev[k];
                num += g.w[k] * du * du;
                den += g.w[k] * du * dd;
            }
            if (den > 0.0) step = num / den;
        }
        step = std::clamp(step, 1e-14, 1e3);

        bool accepted = false;
        double trial = step;
        for (int ls = 0; ls < 30; ++ls) {
            for (std::size_t k = 0; k < n; ++k) cand[k] = u[k] - trial * d[k];
            F.residual_into(cand, rc);
            reflected(rc, dc);
            const double dcn = norm_w(g, dc);
            if (dcn <= 1.5 * dn) { // mild nonmonotonicity for the BB steps
                u_prev = u;
                d_prev = d;
                u.swap(cand);
                r.swap(rc);
                d.swap(dc);
                dn = dcn;
                rn = norm_w(g, r);
                have_prev = true;
                accepted = true;
                break;
            }
            trial *= 0.25;
        }
        if (!accepted) break;
        update_tau();

        if (rn < 0.999 * best_rn) {
            best_rn = rn;
            best_u = u;
            since_best = 0;
        } else if (++since_best > 200) {
            break; // no sustained progress
        }
    }
    u = best_u;
    grad_norm = best_rn;
    return best_rn <= tol;
}

} // namespace detail

using detail::constrained_descent;
using detail::refine_maximizer;

MountainPassResult mountain_pass(const RegularizedFunctional& F, std::vector<Field> path,
                                 const MountainPassOptions& opt) {
    const Grid& g = *F.grid;
    if (static_cast<int>(path.size()) < 3)
        throw ConfigError("mountain pass needs a path with >= 3 fields");
    const double tol = opt.grad_tol > 0.0 ? opt.grad_tol : 1e-6 * std::sqrt(g.volume());

    std::vector<double> vals(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) vals[i] = F.eval_Jeps(path[i]);

    double best_level = std::numeric_limits<double>::infinity();
    int stall = 0;
    int deform_stall = 0;
    int refine_failures = 0;
    double alpha = 0.25 * g.min_h() * g.min_h();
    Field r, cand(g.size());

    auto node_max = [&]() {
        int mi = 1;
        for (int i = 2; i + 1 < static_cast<int>(path.size()); ++i)
            if (vals[i] > vals[mi]) mi = i; // lowest index wins ties
        return mi;
    };

    for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        const int mi = node_max();
        Field& u = path[mi];
        F.residual_into(u, r);
        double rn = norm_w(g, r);
        if (rn <= tol) {
            const double umax = *std::max_element(u.begin(), u.end());
            if (!(umax > 1.0))
                throw SolverError("mountain pass converged to a trivial field", rn);
            return {u, vals[mi], rn, sweep};
        }

        // once the hump stops dropping, refine the maximizer directly:
        // constrained descent along the fibering rays pulls it toward the
        // saddle; a guarded damped-Newton closer (or, when that fails, the
        // reflected-gradient iteration) finishes to the gradient tolerance
        if (deform_stall >= 10) {
            double grad_norm = rn;
            Field usad = u;
            Field tangent(g.size());
            for (std::size_t k = 0; k < g.size(); ++k)
                tangent[k] = path[mi + 1][k] - path[mi - 1][k];
            bool done = false;
            for (int round = 0; round < 12 && !done; ++round) {
                const auto tcd0 = std::chrono::steady_clock::now();
                done = constrained_descent(F, usad, tol, 300, grad_norm);
                if (opt.verbose)
                    std::fprintf(stderr, "[mp] round %d cd: %.2fs |r|=%.3e J=%.6f done=%d\n", round,
                                 std::chrono::duration<double>(std::chrono::steady_clock::now() - tcd0).count(),
                                 grad_norm, F.eval_Jeps(usad), (int)done);
                // Newton closer, accepted only while it stays in the basin
                // of the descent iterate
                if (!done) {
                    const auto tnw0 = std::chrono::steady_clock::now();
                    try {
                        NewtonOptions no;
                        no.tol = tol;
                        no.max_steps = round < 3 ? 12 : 30;
                        no.lin_max_iter = round < 1 ? 800 : 3000;
                        NewtonResult nr = newton_continue(F, usad, no);
                        double move = 0.0, scale = 0.0;
                        for (std::size_t k = 0; k < g.size(); ++k) {
                            const double du = nr.u[k] - usad[k];
                            move += g.w[k] * du * du;
                            scale += g.w[k] * usad[k] * usad[k];
                        }
                        if (move <= 0.25 * scale) {
                            usad = std::move(nr.u);
                            grad_norm = nr.res_norm;
                            done = true;
                        }
                    } catch (const SolverError&) {
                    }
                    if (opt.verbose)
                        std::fprintf(stderr, "[mp] round %d newton: %.2fs done=%d |r|=%.3e\n", round,
                                     std::chrono::duration<double>(std::chrono::steady_clock::now() - tnw0).count(),
                                     (int)done, grad_norm);
                }
                if (!done && round % 3 == 2) {
                    const auto trf0 = std::chrono::steady_clock::now();
                    Field tentative = usad;
                    double gtent = grad_norm;
                    const bool ok = refine_maximizer(F, tentative, tangent, tol, 1500, gtent);
                    const double tmax = *std::max_element(tentative.begin(), tentative.end());
                    // adopt only genuine progress that keeps the iterate
                    // above the obstacle (the reflected force also vanishes
                    // at the trivial root)
                    if (tmax > 1.0 && (ok || gtent < grad_norm)) {
                        usad = std::move(tentative);
                        grad_norm = gtent;
                        done = ok;
                    }
                    if (opt.verbose)
                        std::fprintf(stderr, "[mp] round %d reflect: %.2fs done=%d |r|=%.3e\n", round,
                                     std::chrono::duration<double>(std::chrono::steady_clock::now() - trf0).count(),
                                     (int)done, grad_norm);
                }
            }
            if (done) {
                const double level = F.eval_Jeps(usad);
                const double umax = *std::max_element(usad.begin(), usad.end());
                if (!(umax > 1.0))
                    throw SolverError("mountain pass converged to a trivial field", grad_norm);
                return {usad, level, grad_norm, sweep};
            }
            if (++refine_failures >= 2)
                throw MountainPassStall(usad, F.eval_Jeps(usad), grad_norm);
            deform_stall = 0; // refinement failed; resume deforming the path
            resample_path(g, path);
            for (std::size_t i = 0; i < path.size(); ++i) vals[i] = F.eval_Jeps(path[i]);
            continue;
        }

        if (vals[mi] < best_level - opt.stall_tol) {
            const double drop = best_level - vals[mi];
            best_level = vals[mi];
            stall = 0;
            deform_stall = drop < 1e-2 * (1.0 + std::abs(best_level)) ? deform_stall + 1 : 0;
        } else if (++stall >= opt.stall_sweeps) {
            throw MountainPassStall(path[mi], vals[mi], rn);
        } else {
            ++deform_stall;
        }

        // descend the maximizer with Armijo backtracking and step doubling
        double J = vals[mi];
        for (int it = 0; it < opt.descent_steps; ++it) {
            if (it > 0) {
                F.residual_into(u, r);
                rn = norm_w(g, r);
                if (rn <= tol) break;
            }
            double step = std::clamp(2.0 * alpha, 1e-14, 1e3);
            bool accepted = false;
            for (int ls = 0; ls < 50 && step >= 1e-16; ++ls) {
                for (std::size_t k = 0; k < u.size(); ++k) cand[k] = u[k] - step * r[k];
                const double Jc = F.eval_Jeps(cand);
                if (Jc <= J - 1e-4 * step * rn * rn) {
                    u.swap(cand);
                    J = Jc;
                    alpha = step;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;
            // stop once this field is no longer the hump top
            if (J < std::max(vals[mi - 1], vals[mi + 1])) break;
        }
        vals[mi] = J;

        // re-discretize by arclength so nodes track the deforming path
        resample_path(g, path);
        for (std::size_t i = 0; i < path.size(); ++i) vals[i] = F.eval_Jeps(path[i]);
    }
    throw SolverError("mountain pass: sweep limit reached");
}

NewtonResult newton_continue(const RegularizedFunctional& F, const Field& warm,
                             const NewtonOptions& opt) {
    const Grid& g = *F.grid;
    Field u = warm;
    apply_dirichlet(g, u);
    Field r;
    F.residual_into(u, r);
    double rn = norm_w(g, r);

    NewtonResult out;
    if (rn <= opt.tol) {
        out.u = std::move(u);
        out.res_norm = rn;
        out.steps = 0;
        return out;
    }

    const std::size_t n = g.size();
    Field negr(n), delta(n), cand(n), rc;
    double lm = 0.0; // Levenberg parameter adapted to the accepted step sizes
    for (int step = 1; step <= opt.max_steps; ++step) {
        const Field q = F.jacobian_diag(u);
        double qinf = 0.0;
        for (std::size_t k = 0; k < n; ++k) qinf = std::max(qinf, std::abs(q[k]));
        for (std::size_t k = 0; k < n; ++k) negr[k] = -r[k];
        const int cap = opt.lin_max_iter > 0 ? opt.lin_max_iter : 5000;

        bool ok = false;
        double accepted_a = 0.0;
        for (int attempt = 0; attempt < 5 && !ok; ++attempt) {
            OperatorSpec A{&g, 1.0, &q, lm};
            minres_solve(A, negr, delta, opt.lin_tol, cap);
            double a = 1.0;
            for (int ls = 0; ls < 40; ++ls) {
                for (std::size_t k = 0; k < n; ++k) cand[k] = u[k] + a * delta[k];
                F.residual_into(cand, rc);
                const double rcn = norm_w(g, rc);
                if (rcn * rcn <= rn * rn * (1.0 - 1e-4 * a)) {
                    u.swap(cand);
                    r.swap(rc);
                    rn = rcn;
                    ok = true;
                    accepted_a = a;
                    break;
                }
                a *= 0.5;
            }
            if (!ok) lm = lm == 0.0 ? 1e-3 * (1.0 + qinf) : 10.0 * lm;
        }
        if (!ok)
            throw SolverError("newton: no damped step decreases the residual", rn);
        // heavily damped steps ask for more regularization, full steps for less
        if (accepted_a >= 1.0)
            lm *= 0.25;
        else if (accepted_a < 1e-2)
            lm = std::max(10.0 * lm, 1e-3 * (1.0 + qinf));
        if (lm < 1e-12 * (1.0 + qinf)) lm = 0.0;
        if (rn <= opt.tol) {
            out.u = std::move(u);
            out.res_norm = rn;
            out.steps = step;
            return out;
        }
    }
    throw SolverError("newton: step limit reached", rn);
}

SolveTrace continue_branch(const Grid& g, const NonlinearityModel& m, const EpsSchedule& sched,
                           const Field& u0, const ContinuationOptions& opt) {
    using clock = std::chrono::steady_clock;
    SolveTrace tr;
    Field u;

    auto solve_fresh = [&](const RegularizedFunctional& F, TraceEntry& e) {
        // nested iteration on fine radial grids: converge the branch on a
        // coarsened grid at the same eps, prolong, re-maximize the ray and
        // let Newton take over here
        if (g.kind == GridKind::Radial && g.nr > 257) {
            try {
                // coarsen as far as the transition layer stays resolved
                int nc = g.nr;
                while (nc > 65) {
                    const int next = (nc - 1) / 2 + 1;
                    if (g.radius / (next - 1) > 0.5 * F.eps) break;
                    nc = next;
                }
                const Grid gc = Grid::radial(g.dim, g.radius, nc);
                EpsSchedule single;
                single.levels = {F.eps};
                if (opt.verbose)
                    std::fprintf(stderr, "[cont] nested coarse n=%d eps=%.5g\n", nc, F.eps);
                const SolveTrace coarse =
                    continue_branch(gc, m, single, default_initial_field(gc), opt);
                const Field& uc = coarse.entries.back().u;
                Field fine(g.size(), 0.0);
                for (int i = 0; i < g.nr; ++i) fine[i] = interp(gc, uc, g.r_of(i), 0.0);
                apply_dirichlet(g, fine);
                double gn = 0.0;
                const double cd_tol =
                    opt.mp.grad_tol > 0.0 ? opt.mp.grad_tol : 1e-6 * std::sqrt(g.volume());
                detail::constrained_descent(F, fine, cd_tol, 600, gn);
                if (opt.verbose) std::fprintf(stderr, "[cont] prolonged cd |r|=%.3e\n", gn);
                NewtonResult nr = newton_continue(F, fine, opt.newton);
                u = std::move(nr.u);
                e.mp_sweeps = coarse.entries.back().mp_sweeps;
                e.newton_steps = nr.steps;
                e.grad_norm = nr.res_norm;
                return;
            } catch (const SolverError& err) {
                // fall through to the full-resolution mountain pass
                if (opt.verbose) std::fprintf(stderr, "[cont] nested failed: %s\n", err.what());
            } catch (const ModelError& err) {
                if (opt.verbose) std::fprintf(stderr, "[cont] nested failed: %s\n", err.what());
            }
        }
        const Field ep = make_endpoint(F, u0);
        auto path = initial_path(g, ep, opt.mp.path_size);
        MountainPassResult mp;
        try {
            mp = mountain_pass(F, path, opt.mp);
        } catch (const MountainPassStall& s) {
            mp.u = s.best;
            mp.level = s.level;
            mp.sweeps = -1; // stalled; Newton may still close the gap
        }
        e.mp_sweeps = mp.sweeps;
        NewtonResult nr = newton_continue(F, mp.u, opt.newton);
        u = std::move(nr.u);
        e.newton_steps = nr.steps;
        e.grad_norm = nr.res_norm;
    };

    for (std::size_t j = 0; j < sched.levels.size(); ++j) {
        const double eps = sched.levels[j];
        RegularizedFunctional F(g, m, eps);
        TraceEntry e;
        e.eps = eps;
        const auto t0 = clock::now();
        if (j == 0) {
            solve_fresh(F, e);
        } else {
            try {
                NewtonResult nr = newton_continue(F, u, opt.newton);
                u = std::move(nr.u);
                e.newton_steps = nr.steps;
                e.grad_norm = nr.res_norm;
            } catch (const SolverError&) {
                solve_fresh(F, e); // fall back to a fresh mountain pass at this eps
            }
        }
        e.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        e.level = F.eval_Jeps(u);
        e.level_sharp = F.eval_J(u);

        double umin = u[0], umax = u[0];
        for (double v : u) {
            umin = std::min(umin, v);
            umax = std::max(umax, v);
        }
        if (umin < -1e-9 * std::max(1.0, umax))
            throw SolverError("continuation produced a negative iterate", e.grad_norm);
        if (!(umax > 1.0))
            throw SolverError("continuation collapsed to a trivial branch", e.grad_norm);

        e.u = u;
        tr.entries.push_back(std::move(e));
    }
    return tr;
}

Field default_initial_field(const Grid& g) {
    Field u(g.size(), 0.0);
    if (g.kind == GridKind::Rect2D) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double sx = std::sin(std::numbers::pi * (g.x_of(i) - g.ax) / (g.bx - g.ax));
                const double sy = std::sin(std::numbers::pi * (g.y_of(j) - g.ay) / (g.by - g.ay));
                u[g.index(i, j)] = 2.0 * sx * sy;
            }
    } else {
        for (int i = 0; i < g.nr; ++i)
            u[i] = 2.0 * std::cos(0.5 * std::numbers::pi * g.r_of(i) / g.radius);
    }
    apply_dirichlet(g, u);
    return u;
}

} // namespace fb
