#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "poholab/green.hpp"
#include "poholab/jets.hpp"
#include "poholab/pohozaev.hpp"

namespace poholab {

// ============================================================================
// Profile functions of the blow-up constructions, as second-order jets so
// every Laplacian downstream is assembled analytically through the chain
// rule (3D grids cannot resolve the eps-scale peaks).
// ============================================================================

namespace profiles {

/// U(r) = r (1+r^2)^{-1/2}; U' = r^{-3} U^3, U'' = -3 r^{-4} U^5.
Jet1 bubble_profile(const Jet1& r);
/// V(r) = 1 - (1+r^2)^{-3/2}.
Jet1 corrector_profile(const Jet1& r);
/// psi_eps(r) = 1 + ln(1+r^{-2}) / ln(eps^2).
Jet1 log_interpolant(const Jet1& r, double eps);
/// W(r) of the flat-correction term; series switches below small_switch and
/// above large_switch keep the jets stable at the ends.
Jet1 flat_correction_profile(const Jet1& r, double small_switch = 1e-3,
                             double large_switch = 1e3);
/// C^2 quintic bump: 1 on r <= inner, 0 on r >= outer.
Jet1 bump(const Jet1& r, double inner, double outer);

}  // namespace profiles

// ============================================================================
// Radial one-bubble family on the unit ball:
//   u_eps = U_eps + eta_eps V_eps
//   U_eps = eps^{1/2} (eps^2 + G^{-2})^{-1/2}
//   V_eps = -gamma0(0) eps^{1/2} (1 + eps^2 G^2)^{-3/2}
//   eta_eps(r) = eta(r) ln(eps^2 + r^2)/ln(eps^2), eta = 1 on r <= 1/4,
//   0 on r >= 1/2.
// ============================================================================

struct RadialFamilyParams {
    double eps = 0.0;
    double mass = 0.0;  // gamma_0(0), scaled normalization
    GreenField green;   // radial or closed-form path, scaled normalization
    double cutoff_inner = 0.25;
    double cutoff_outer = 0.5;
};

/// Builds the Green data (radial ODE or closed form) and packages the family
/// parameters. Requires eps < 0.1 and a coercive radial h.
RadialFamilyParams make_radial_family_params(const CoefficientH& h, const Domain& ball,
                                             double eps, const GreenOptions& green_opts = {});

class RadialFamily {
  public:
    explicit RadialFamily(RadialFamilyParams params);

    const RadialFamilyParams& params() const { return params_; }
    Jet1 eval_jet(double r) const;  // u_eps with d/dr and d2/dr2
    double value(double r) const { return eval_jet(r).v; }
    /// Analyst Laplacian -(u'' + 2u'/r).
    double laplacian(double r) const;
    double value_at_origin() const;  // eps^{-1/2}

    /// Samples onto a grid; throws ConstructionError with the failing radius
    /// if positivity fails (eps too large).
    ScalarFieldRadial sample(const RadialGrid& grid) const;

  private:
    RadialFamilyParams params_;
    Jet1 green_jet(double r) const;
};

// ============================================================================
// Residual potential h_tilde = (3 u^5 - Delta u) / u, for which the
// constructed u solves Delta u + h_tilde u = 3 u^5 exactly; the rescaled
// pair (3^{1/4} u, h_tilde) then solves the coefficient-1 equation.
// ============================================================================

struct ResidualScanRadial {
    ScalarFieldRadial h_tilde;
    ScalarFieldRadial u;           // the input samples
    ScalarFieldRadial u_rescaled;  // 3^{1/4} u
    double l3_norm = 0.0;          // || h_tilde - h_target ||_{L^3}
    double linf_norm = 0.0;
    double min_u = 0.0;
};

/// Analytic-composition path for family evaluators.
ResidualScanRadial residual_potential(const RadialFamily& u, const CoefficientH& h_target,
                                      const RadialGrid& eval_grid);
/// Finite-difference path for sampled fields.
ResidualScanRadial residual_potential(const ScalarFieldRadial& u, const CoefficientH& h_target);

// ============================================================================
// Two-bubble balancing and family (general case).
// ============================================================================

struct TwoBubbleParams {
    Vec3 x1{}, x2{};
    double lambda = 0.0;
    double delta = 0.0;  // cutoff radius
    GreenField g1, g2;   // scaled normalization
    GreenExpansion e1, e2;
    Vec3 grad_g2_at_x1{}, grad_g1_at_x2{};
    double balance_residual_1 = 0.0;  // |sqrt(lambda) G2(x1) + gamma1(x1)|
    double balance_residual_2 = 0.0;  // |G1(x2) + sqrt(lambda) gamma2(x2)|
};

struct BalanceOptions {
    /// Pins x1 (defaults to the most negative-mass scan sample).
    std::optional<Vec3> x1_override;
    std::vector<Vec3> scan_points;      // defaults to a small interior lattice
    std::vector<Vec3> ray_directions;   // defaults to the 6 axis directions
    double root_tol = 1e-12;
    double delta_fraction = 0.1;        // delta = fraction * min(dists, |x1-x2|)
    GreenOptions green;
    ExpansionFitOptions fit;
};

/// Solves the balancing system: x1 with negative mass, x2 the root of
/// F(x) = G(x1,x)^2 - gamma_{x1}(x1) gamma_x(x) along a ray, lambda =
/// (-gamma_{x1}(x1)/G(x1,x2))^2. Throws ConstructionError when no scanned
/// ray brackets a root.
TwoBubbleParams balance_configuration(const CoefficientH& h, const Domain& domain,
                                      const BalanceOptions& opts = {});

/// Pointwise-evaluable eight-term family of the general construction;
/// evaluation is exact given Green values (no grid commitment) and pure, so
/// sweeps may fan sample batches across threads.
class TwoBubbleField {
  public:
    TwoBubbleField(TwoBubbleParams params, double eps, const CoefficientH& h);

    const TwoBubbleParams& params() const { return params_; }
    double eps() const { return eps_; }

    Jet3 eval_jet(const Vec3& x) const;
    double value(const Vec3& x) const { return eval_jet(x).v; }
    double laplacian(const Vec3& x) const { return eval_jet(x).lap; }

    /// Sum of the two leading bubble terms only (the exact far-field form).
    double leading_terms(const Vec3& x) const;

  private:
    TwoBubbleParams params_;
    double eps_ = 0.0;
    CoefficientH h_;
    Jet3 green_jet(const GreenField& g, const Vec3& x) const;
};

struct ResidualScan3D {
    double linf_norm = 0.0;  // sampled sup of |h_tilde - h_target|
    double min_u = 0.0;
    Vec3 argmax{};
};

ResidualScan3D residual_potential(const TwoBubbleField& u, const CoefficientH& h_target,
                                  const std::vector<Vec3>& samples);

/// Stratified interior samples: uniform core plus geometric refinement
/// toward the two centers and toward the boundary; deterministic per seed.
std::vector<Vec3> stratified_samples(const Domain& ball, const Vec3& x1, const Vec3& x2,
                                     double inner_scale, int count, std::uint64_t seed);

// ============================================================================
// Displayed-identity checks: the exact identities of the radial pieces and
// the o(U_eps) expansion lines of the two-bubble block.
// ============================================================================

struct PieceIdentityReport {
    double bubble_piece_residual = 0.0;     // exact identity of the U_eps piece
    double corrector_piece_residual = 0.0;  // exact identity of the V_eps piece
    struct Line {
        std::string name;
        double remainder_ratio = 0.0;  // sup |remainder| / U_eps over the sample
    };
    std::vector<Line> expansion_lines;
};

struct PieceOptions {
    int annulus_samples = 400;
    double annulus_inner = 0.02;  // fractions of the cutoff radius delta
    double annulus_outer = 1.5;
    std::uint64_t seed = 7;
};

PieceIdentityReport verify_piece_identities(const RadialFamilyParams& radial,
                                            const TwoBubbleParams& two_bubble,
                                            const CoefficientH& h, double eps,
                                            const PieceOptions& opts = {});

// ============================================================================
// Instability sweeps: the headline experiment.
// ============================================================================

enum class SweepMode { Radial, TwoBubble };

struct SweepRow {
    double eps = 0.0;
    double l3_norm = 0.0;
    double linf_norm = 0.0;
    double min_u = 0.0;
    double balance_residual_1 = 0.0;
    double balance_residual_2 = 0.0;
    bool positivity_ok = false;
};

struct ResidualSweep {
    SweepMode mode = SweepMode::Radial;
    std::vector<SweepRow> rows;  // eps strictly decreasing
};

struct SweepOptions {
    int radial_nodes = 4000;
    double radial_first_frac = 1e-7;
    int samples_3d = 100000;
    std::uint64_t seed = 0;
    BalanceOptions balance;
};

ResidualSweep instability_sweep(SweepMode mode, const CoefficientH& h, const Domain& domain,
                                const std::vector<double>& eps_list,
                                const SweepOptions& opts = {});

}  // namespace poholab
