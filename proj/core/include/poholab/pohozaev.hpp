#pragma once

#include <string>
#include <vector>

#include "poholab/coefficient.hpp"
#include "poholab/fields.hpp"
#include "poholab/green.hpp"

namespace poholab {

// ============================================================================
// Pohozaev identities for Delta u + h u = u^5 (analyst sign), evaluated by
// quadrature. Conventions (derived from the multiplier arguments; see tests):
//   P1: 1/2 int (h u^2 + h <x, grad u^2>) = B1 + B2
//       B1 = oint (<x,grad u> d_nu u + u d_nu u / 2 - <x,nu> |grad u|^2 / 2)
//       B2 = oint <x,nu> u^6/6
//   P2 (u = 0 on boundary): 1/2 int h (u^2 + <x,grad u^2>) = 1/2 oint <x,nu> (d_nu u)^2
//   P3: int (h + <x,grad h>/2) u^2 = -1/2 oint <x,nu> (d_nu u)^2
//   P4: oint (d_nu u grad u - |grad u|^2 nu / 2 + u^6 nu / 6) = int h grad(u^2)/2
// ============================================================================

struct PohozaevReport {
    std::string identity_id;  // "P1" | "P2" | "P3"
    double volume_term = 0.0;
    double boundary_B1 = 0.0;
    double boundary_B2 = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    /// |lhs - rhs| over the summed magnitudes of the printed terms (+1e-12).
    double identity_residual = 0.0;
    /// P3 obstruction bookkeeping: lhs >= 0 with rhs <= 0 on a star-shaped
    /// domain forces u = 0; margin = lhs - rhs when the contradiction bites.
    bool obstruction_contradiction = false;
    double contradiction_margin = 0.0;
};

struct PohozaevReportVec {
    std::string identity_id;  // "P4"
    Vec3 lhs{};
    Vec3 rhs{};
    double identity_residual = 0.0;  // max component mismatch over term scale
};

struct StructuralCertificate {
    double min_value = 0.0;  // min over samples of h + <x, grad h>/2
    bool satisfied = false;
    bool gradient_from_fd = false;
    Vec3 argmin{};
};

struct PohozaevOptions {
    int radial_quadrature_nodes = 10000;
    int volume_radial_points = 96;
    SphereRule const* rule = &SphereRule::standard();
    /// One-sided normal-derivative step for 3D fields (defaults to grid h).
    double normal_step = 0.0;
    double boundary_trace_tol = 1e-5;  // P3 precondition
    double residual_floor = 1e-12;
};

/// Grid minimum of h + <x, grad h>/2 over the domain.
StructuralCertificate check_structural_condition(const CoefficientH& h, const Domain& domain,
                                                 double tolerance = 1e-12, int n_radial = 256,
                                                 const SphereRule& rule = SphereRule::coarse());

// Radial fields on a ball (1D quadrature paths).
PohozaevReport evaluate_identity_P1(const ScalarFieldRadial& u, const CoefficientH& h,
                                    const Domain& domain, const PohozaevOptions& opts = {});
PohozaevReport evaluate_identity_P3(const ScalarFieldRadial& u, const CoefficientH& h,
                                    const Domain& domain, const PohozaevOptions& opts = {});

// General fields through views (3D quadrature paths).
PohozaevReport evaluate_identity_P1(const FieldView& u, const CoefficientH& h,
                                    const Domain& domain, const PohozaevOptions& opts = {});
/// P2 is P1 with the boundary-vanishing reduction.
PohozaevReport evaluate_identity_P2(const FieldView& u, const CoefficientH& h,
                                    const Domain& domain, const PohozaevOptions& opts = {});
PohozaevReport evaluate_identity_P3(const FieldView& u, const CoefficientH& h,
                                    const Domain& domain, const PohozaevOptions& opts = {});
PohozaevReportVec evaluate_identity_P4(const FieldView& u, const CoefficientH& h,
                                       const Domain& domain, const PohozaevOptions& opts = {});

// ----------------------------------------------------------------------------
// Green-function Pohozaev sum. With G = sum_i lambda_i G_h(., x_i) written
// near x_i as lambda_i/(omega_2 |x-x_i|) + m_i + ... + gamma_i, the scalar
//   sum_i lambda_i (m_i + 2 <x_i, grad gamma_i(x_i)>)
// is negative on star-shaped domains when h satisfies the structural
// condition. Expansions must arrive in Unit normalization; the cross terms
// m_i and grad gamma_i need the Green fields of the other sources.
// ----------------------------------------------------------------------------

struct BubbleConfiguration {
    std::vector<Vec3> points;
    std::vector<double> weights;
    double scale = 0.0;  // optional epsilon, constructor use
};

double green_pohozaev_sum(const BubbleConfiguration& config,
                          const std::vector<GreenExpansion>& expansions,
                          const std::vector<GreenField>& fields);

}  // namespace poholab
