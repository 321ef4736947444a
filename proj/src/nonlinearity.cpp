#include "fb/nonlinearity.hpp"
#include "fb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fb {

namespace {

// pow with fast paths for the small integer exponents the catalog uses
inline double powx(double s, double e) {
    const int ie = static_cast<int>(e);
    if (static_cast<double>(ie) == e && ie >= 0 && ie <= 6) {
        double r = 1.0;
        for (int i = 0; i < ie; ++i) r *= s;
        return r;
    }
    return std::pow(s, e);
}

inline void require_nonneg(double s) {
    if (s < 0.0) throw std::domain_error("nonlinearity evaluated at negative s");
}

struct GVisitor {
    const Point& x;
    double s;

    double operator()(const PurePower& m) const { return powx(s, m.p - 1.0); }
    double operator()(const SumOfPowers& m) const {
        double r = 0.0;
        for (double p : m.exponents) r += powx(s, p - 1.0);
        return r;
    }
    double operator()(const WeightedPower& m) const {
        const double base = m.a3 * powx(s, m.mu - 1.0) + m.a4 * powx(s, m.p - 1.0);
        return m.spatial ? (1.0 + x.x * x.x + x.y * x.y) * base : base;
    }
    double operator()(const CriticalCombo& m) const {
        const double two_star = 2.0 * m.dim / (m.dim - 2.0);
        return m.kappa * powx(s, two_star - 1.0) + m.lambda * powx(s, m.mu - 1.0);
    }
    double operator()(const ExponentialN2& m) const {
        return m.a1 * s * s * s * std::exp(m.a2 * s * s);
    }
};

struct GPrimVisitor {
    const Point& x;
    double s;

    double operator()(const PurePower& m) const { return powx(s, m.p) / m.p; }
    double operator()(const SumOfPowers& m) const {
        double r = 0.0;
        for (double p : m.exponents) r += powx(s, p) / p;
        return r;
    }
    double operator()(const WeightedPower& m) const {
        const double base = m.a3 * powx(s, m.mu) / m.mu + m.a4 * powx(s, m.p) / m.p;
        return m.spatial ? (1.0 + x.x * x.x + x.y * x.y) * base : base;
    }
    double operator()(const CriticalCombo& m) const {
        const double two_star = 2.0 * m.dim / (m.dim - 2.0);
        return m.kappa * powx(s, two_star) / two_star + m.lambda * powx(s, m.mu) / m.mu;
    }
    double operator()(const ExponentialN2& m) const {
        // int a1 t^3 exp(a2 t^2) dt = a1/(2 a2) [exp(a2 s^2)(s^2 - 1/a2) + 1/a2]
        const double e = std::exp(m.a2 * s * s);
        return m.a1 / (2.0 * m.a2) * (e * (s * s - 1.0 / m.a2) + 1.0 / m.a2);
    }
};

struct GSlopeVisitor {
    const Point& x;
    double s;

    double operator()(const PurePower& m) const { return (m.p - 1.0) * powx(s, m.p - 2.0); }
    double operator()(const SumOfPowers& m) const {
        double r = 0.0;
        for (double p : m.exponents) r += (p - 1.0) * powx(s, p - 2.0);
        return r;
    }
    double operator()(const WeightedPower& m) const {
        const double base = m.a3 * (m.mu - 1.0) * powx(s, m.mu - 2.0) +
                            m.a4 * (m.p - 1.0) * powx(s, m.p - 2.0);
        return m.spatial ? (1.0 + x.x * x.x + x.y * x.y) * base : base;
    }
    double operator()(const CriticalCombo& m) const {
        const double two_star = 2.0 * m.dim / (m.dim - 2.0);
        return m.kappa * (two_star - 1.0) * powx(s, two_star - 2.0) +
               m.lambda * (m.mu - 1.0) * powx(s, m.mu - 2.0);
    }
    double operator()(const ExponentialN2& m) const {
        const double e = std::exp(m.a2 * s * s);
        return m.a1 * e * (3.0 * s * s + 2.0 * m.a2 * s * s * s * s);
    }
};

} // namespace

NonlinearityModel NonlinearityModel::pure_power(double p) {
    if (!(p > 2.0)) throw ConfigError("pure power needs p > 2");
    NonlinearityModel m;
    m.variant = PurePower{p};
    m.mu = p;
    m.growth = p;
    m.name = "pure_power";
    return m;
}

NonlinearityModel NonlinearityModel::sum_of_powers(std::vector<double> exponents) {
    if (exponents.empty()) throw ConfigError("sum of powers needs at least one exponent");
    for (double p : exponents)
        if (!(p > 2.0)) throw ConfigError("sum of powers needs every p > 2");
    NonlinearityModel m;
    m.mu = *std::min_element(exponents.begin(), exponents.end());
    m.growth = *std::max_element(exponents.begin(), exponents.end());
    m.variant = SumOfPowers{std::move(exponents)};
    m.name = "sum_of_powers";
    return m;
}

NonlinearityModel NonlinearityModel::weighted_power(double mu, double p, double a3, double a4,
                                                    bool spatial) {
    if (!(mu > 2.0) || !(p >= mu)) throw ConfigError("weighted power needs p >= mu > 2");
    if (a3 < 0.0 || a4 < 0.0 || a3 + a4 <= 0.0)
        throw ConfigError("weighted power needs a3, a4 >= 0, not both zero");
    NonlinearityModel m;
    m.variant = WeightedPower{mu, p, a3, a4, spatial};
    m.mu = mu;
    m.growth = p;
    m.name = "weighted_power";
    return m;
}

NonlinearityModel NonlinearityModel::critical_combo(double kappa, double lambda, double mu,
                                                    int dim) {
    if (dim < 3) throw ConfigError("critical combo needs dimension >= 3");
    const double two_star = 2.0 * dim / (dim - 2.0);
    if (!(kappa > 0.0) || !(lambda > 0.0)) throw ConfigError("critical combo needs kappa, lambda > 0");
    if (!(mu > 2.0 && mu < two_star)) throw ConfigError("critical combo needs 2 < mu < 2*");
    NonlinearityModel m;
    m.variant = CriticalCombo{kappa, lambda, mu, dim};
    m.mu = mu;
    m.growth = two_star;
    m.critical = true;
    m.name = "critical_combo";
    return m;
}

NonlinearityModel NonlinearityModel::exponential_n2(double a1, double a2) {
    if (!(a1 > 0.0) || !(a2 > 0.0)) throw ConfigError("exponential model needs a1, a2 > 0");
    NonlinearityModel m;
    m.variant = ExponentialN2{a1, a2};
    m.mu = 4.0;
    m.growth = 4.0;
    m.name = "exponential_n2";
    return m;
}

double NonlinearityModel::g(const Point& x, double s) const {
    require_nonneg(s);
    return std::visit(GVisitor{x, s}, variant);
}

double NonlinearityModel::G(const Point& x, double s) const {
    require_nonneg(s);
    return std::visit(GPrimVisitor{x, s}, variant);
}

double NonlinearityModel::dg(const Point& x, double s) const {
    require_nonneg(s);
    return std::visit(GSlopeVisitor{x, s}, variant);
}

void SlackStat::update(double slack, double scale, double s, double t) {
    ++samples;
    const double rel = slack / std::max(1.0, scale);
    if (rel < worst_rel) {
        worst_rel = rel;
        at_s = s;
        at_t = t;
    }
    worst = std::min(worst, slack);
}

bool StructureReport::pass(double tol) const {
    return ar.worst_rel >= -tol && sub_unit.worst_rel >= -tol && super_unit.worst_rel >= -tol &&
           mono_ratio.worst_rel >= -tol && mono_ar.worst_rel >= -tol;
}

StructureReport check_structure(const NonlinearityModel& m, std::span<const Point> xs,
                                std::span<const double> ss, std::span<const double> ts) {
    if (xs.empty() || ss.empty() || ts.empty())
        throw ConfigError("check_structure needs nonempty sample sets");
    for (double s : ss)
        if (!(s > 0.0)) throw ConfigError("check_structure needs s > 0 samples");

    StructureReport rep;
    for (const Point& x : xs) {
        for (double s : ss) {
            const double gs = m.g(x, s);
            const double Gs = m.G(x, s);
            rep.ar.update(s * gs - m.mu * Gs, std::abs(s * gs), s, 0.0);
            for (double t : ts) {
                const double gts = m.g(x, t * s);
                const double scaled = powx(t, m.mu - 1.0) * gs;
                if (t <= 1.0)
                    rep.sub_unit.update(scaled - gts, std::abs(scaled), s, t);
                if (t >= 1.0)
                    rep.super_unit.update(gts - scaled, std::abs(gts), s, t);
            }
        }

        // monotonicity of the two (g4) maps on a geometric scan
        const double slo = *std::min_element(ss.begin(), ss.end());
        const double shi = *std::max_element(ss.begin(), ss.end());
        const int per_decade = 1000;
        const int steps = std::max(2, static_cast<int>(per_decade * std::log10(shi / slo)));
        const double ratio = std::pow(shi / slo, 1.0 / steps);
        double prev_ratio_map = 0.0, prev_ar_map = 0.0;
        for (int i = 0; i <= steps; ++i) {
            const double s = slo * std::pow(ratio, i);
            const double gs = m.g(x, s);
            const double ratio_map = gs / powx(s, m.mu - 1.0);
            const double ar_map = s * gs / m.mu - m.G(x, s);
            if (i > 0) {
                rep.mono_ratio.update(ratio_map - prev_ratio_map, std::abs(ratio_map), s, 0.0);
                rep.mono_ar.update(ar_map - prev_ar_map, std::abs(ar_map), s, 0.0);
            }
            prev_ratio_map = ratio_map;
            prev_ar_map = ar_map;
        }
    }
    return rep;
}

} // namespace fb
