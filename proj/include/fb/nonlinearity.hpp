#ifndef FB_NONLINEARITY_HPP
#define FB_NONLINEARITY_HPP

#include "fb/grid.hpp"

#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fb {

// Closed catalog of superlinear right-hand sides. Every entry has analytic
// g, primitive G and slope dg, and a superlinearity exponent mu > 2 such
// that s -> g(x,s)/s^(mu-1) and s -> s g(x,s)/mu - G(x,s) are nondecreasing.

struct PurePower {
    double p; // g = s^(p-1)
};

struct SumOfPowers {
    std::vector<double> exponents; // g = sum s^(p_i - 1), mu = min p_i
};

struct WeightedPower {
    // g = a(x,s) s^(mu-1) with a = (a3 + a4 s^(p-mu)), optionally times (1+|x|^2)
    double mu;
    double p;
    double a3;
    double a4;
    bool spatial; // multiply the weight by (1+|x|^2)
};

struct CriticalCombo {
    double kappa;  // coefficient of the critical power s^(2*-1)
    double lambda; // coefficient of s^(mu-1)
    double mu;     // 2 < mu < 2*
    int dim;       // N >= 3; 2* = 2N/(N-2)
};

struct ExponentialN2 {
    double a1, a2; // g = a1 s^3 exp(a2 s^2), mu = 4 (two dimensions only)
};

struct NonlinearityModel {
    using Variant = std::variant<PurePower, SumOfPowers, WeightedPower, CriticalCombo, ExponentialN2>;

    Variant variant;
    double mu = 0.0;
    double growth = 0.0; // largest power (2* for the critical model)
    bool critical = false;
    std::string name;

    static NonlinearityModel pure_power(double p);
    static NonlinearityModel sum_of_powers(std::vector<double> exponents);
    static NonlinearityModel weighted_power(double mu, double p, double a3, double a4, bool spatial);
    static NonlinearityModel critical_combo(double kappa, double lambda, double mu, int dim);
    static NonlinearityModel exponential_n2(double a1, double a2);

    double g(const Point& x, double s) const;  // throws std::domain_error for s < 0
    double G(const Point& x, double s) const;  // primitive of g in s
    double dg(const Point& x, double s) const; // d g / d s
};

// Worst-case slack bookkeeping for one inequality. `worst` is the raw
// minimum of (lhs - rhs); `worst_rel` divides by the local magnitude so
// rounding on large values does not mask or fake a violation.
struct SlackStat {
    double worst = std::numeric_limits<double>::infinity();
    double worst_rel = std::numeric_limits<double>::infinity();
    double at_s = 0.0, at_t = 0.0;
    long samples = 0;

    void update(double slack, double scale, double s, double t);
};

struct StructureReport {
    SlackStat ar;         // s g - mu G >= 0
    SlackStat sub_unit;   // t in (0,1]:  t^(mu-1) g(x,s) - g(x,ts) >= 0
    SlackStat super_unit; // t >= 1:      g(x,ts) - t^(mu-1) g(x,s) >= 0
    SlackStat mono_ratio; // s -> g/s^(mu-1) nondecreasing
    SlackStat mono_ar;    // s -> s g/mu - G nondecreasing

    bool pass(double tol = 1e-12) const;
};

/// Samples the structural inequalities over the given points and scalars.
/// Monotonicity maps are scanned on a geometric grid of 1000 points per
/// decade spanning [min ss, max ss].
StructureReport check_structure(const NonlinearityModel& m, std::span<const Point> xs,
                                std::span<const double> ss, std::span<const double> ts);

} // namespace fb

#endif
