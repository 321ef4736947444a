#ifndef FB_VERIFICATION_HPP
#define FB_VERIFICATION_HPP

#include "fb/freeboundary.hpp"
#include "fb/grid.hpp"
#include "fb/nonlinearity.hpp"
#include "fb/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fb {

struct VerifyOptions {
    // nondegeneracy: nodes with r in [r_min_factor*h, r0_factor*h]
    double nondeg_r0_factor = 10.0;
    double nondeg_r_min_factor = 2.0; // first cells skipped (discrete-interface band)
    double nondeg_c_min = 0.05;

    std::vector<double> density_radii_factors = {4.0, 8.0, 16.0, 32.0};
    double density_c_min = 0.05;

    double fb_median_max = 0.25;

    double lipschitz_ratio = 1.2;

    double variational_factor = 10.0;

    int ring_angles = 64;
    std::vector<double> ring_radii_factors = {4.0, 8.0, 16.0};

    double harmonicity_max = 1e-6;
    double tie_band_factor = 1.0; // kappa_tie = factor * h

    int max_fb_samples = 512; // deterministic stride subsample of boundary points
};

struct FbConditionReport {
    int points_total = 0;
    int points_used = 0;
    double median_abs = 0.0; // median |alpha^2 - beta^2 - 2|
    double median_signed = 0.0;
    double iqr = 0.0;
    double worst_decile = 0.0; // 90th percentile of the absolute residual
    bool trivial = false;      // empty free boundary
    bool pass = false;
};

struct NondegeneracyReport {
    double empirical_c = 0.0; // min (u(x0) - 1) / dist(x0, {u <= 1})
    int samples = 0;
    double r_min = 0.0, r0 = 0.0;
    bool trivial = false;
    bool pass = false;
};

struct DensityEntry {
    double x = 0, y = 0, r = 0;
    long count_super = 0, count_total = 0;
    double fraction = 0.0;
};

struct DensityReport {
    std::vector<DensityEntry> entries;
    double min_fraction = 1.0, max_fraction = 0.0;
    int skipped = 0;
    bool trivial = false;
    bool pass = false;
};

struct VariationalEntry {
    std::string phi;
    double phi_c1 = 0.0;
    double quad = 0.0;    // quadrature of the domain-variation integrand
    double pairing = 0.0; // exact discrete pairing <r, -Phi . grad_h u>_w
    double bound = 0.0;   // factor * ||r||_w * ||Phi||_C1
};

struct VariationalReport {
    double eps = 0.0;        // 0 marks the sharp (chi) version
    double source_eps = 0.0; // eps of the trace entry the field came from
    double res_norm = 0.0;
    std::vector<VariationalEntry> entries;
    double max_abs_quad = 0.0;
    bool pass = false; // every |pairing| within its bound
};

struct EnergyRow {
    double eps = 0, J_eps = 0, J_sharp = 0;
    double band = 0;     // |{1 < u < 1 + eps}|
    double tie_band = 0; // |{|u - 1| <= kappa_tie}|
    double grad_norm = 0;
    bool sandwich_ok = false;
};

struct EnergyReport {
    std::vector<EnergyRow> rows;
    double level_last = 0.0;
    double inf_M_level = 0.0;
    bool has_inf_M = false;
    double cross_method_gap = 0.0; // |level_last - inf_M| / |inf_M|
    bool pass = false;
};

struct LipschitzRow {
    double eps = 0, sup_grad = 0;
};

struct LipschitzReport {
    std::vector<LipschitzRow> rows;
    double delta0 = 0.0;
    bool pass = false;
};

struct AuxReport {
    double harmonicity_sup = 0.0; // sup |Δ_h u| on int{u<=1} minus collar
    long harmonicity_nodes = 0;
    double ring_nu = 0.0; // min ring-average((u-1)_+)/r over boundary samples
    int ring_samples = 0;
    double majorant_A0 = 0.0;
    double majorant_violation = 0.0; // max (u - phi0)_+
    double min_u = 0.0;
    bool pass = false;
};

struct CriticalReport {
    bool applicable = false;
    double sobolev = 0.0;
    double threshold = 0.0; // S^{N/2} / (N kappa^{N/2-1})
    double worst_level = 0.0;
    bool pass = true;
};

struct VerificationReport {
    int schema_version = 1;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    FbConditionReport fb;
    NondegeneracyReport nondeg;
    DensityReport density;
    std::vector<VariationalReport> variational; // one per trace entry plus a sharp entry
    EnergyReport energy;
    LipschitzReport lipschitz;
    AuxReport aux;
    CriticalReport critical;
    VerifyOptions options; // thresholds recorded alongside the verdicts

    bool all_pass() const;
};

// individual checks ----------------------------------------------------------

FbConditionReport check_fb_condition(const Grid& g, const Field& u, const FreeBoundary& fb,
                                     const VerifyOptions& opt = {});

NondegeneracyReport check_nondegeneracy(const Grid& g, const Field& u, const FreeBoundary& fb,
                                        const VerifyOptions& opt = {});

DensityReport check_density(const Grid& g, const Field& u, const FreeBoundary& fb,
                            const VerifyOptions& opt = {});

/// Domain-variation identity. eps > 0 evaluates the regularized integrand
/// (B term); eps == 0 the sharp one (chi term). The pairing column is the
/// derivative of the discrete functional along the discrete transport field
/// -Phi . grad_h u, which the divergence-theorem identity equates with the
/// integrand's quadrature up to discretization error.
VariationalReport check_variational_identity(const Grid& g, const NonlinearityModel& m,
                                             double eps, const Field& u,
                                             const VerifyOptions& opt = {});

EnergyReport check_energy_convergence(const Grid& g, const SolveTrace& trace,
                                      const VerifyOptions& opt = {});

LipschitzReport check_lipschitz(const Grid& g, const SolveTrace& trace,
                                const VerifyOptions& opt = {});

AuxReport check_aux(const Grid& g, const NonlinearityModel& m, const Field& u,
                    const FreeBoundary& fb, const VerifyOptions& opt = {});

CriticalReport check_critical_threshold(const NonlinearityModel& m, const SolveTrace& trace);

/// Best constant of the Sobolev embedding ||grad u||_2^2 >= S ||u||_{2*}^2
/// on R^N: S = N(N-2)/4 * |S^N|^{2/N}. Throws std::domain_error for N < 3.
double sobolev_constant(int dim);

/// Full suite over a finished trace.
VerificationReport run_verification(const Grid& g, const NonlinearityModel& m,
                                    const SolveTrace& trace, const VerifyOptions& opt = {});

// domain-variation test fields -----------------------------------------------

struct PhiField {
    std::string name;
    // component values and Jacobian entries at a point
    double px = 0, py = 0;
    double dxx = 0, dxy = 0, dyx = 0, dyy = 0;
};

/// Catalog of >= 8 compactly supported C^1 vector fields: tensor-product
/// polynomials times a quintic-smoothstep cutoff vanishing near the domain
/// boundary (radial grids use radial profiles vanishing at 0 and R).
int phi_catalog_size(const Grid& g);
PhiField phi_eval(const Grid& g, int which, double x, double y);
double phi_c1_norm(const Grid& g, int which);

} // namespace fb

#endif
