#pragma once

#include <optional>
#include <vector>

#include "poholab/coefficient.hpp"
#include "poholab/fields.hpp"

namespace poholab {

// ============================================================================
// Sign convention: the analyst Laplacian Delta u = -sum d^2u/dx_i^2 is used
// everywhere; its discrete form is the negated standard stencil and has
// positive spectrum.
// ============================================================================

/// Radial analyst Laplacian -(u'' + 2u'/r) by non-uniform second-order
/// differences; the origin side uses the symmetry ghost u'(0) = 0.
ScalarFieldRadial apply_laplacian(const ScalarFieldRadial& u);

/// Negated 7-point stencil at interior nodes (boundary and exterior rows are
/// zero in the result).
ScalarField3D apply_laplacian(const ScalarField3D& u);

// ----------------------------------------------------------------------------
// Linear solves
// ----------------------------------------------------------------------------

struct SolveOptions {
    double tol = 1e-10;       // relative residual target
    int max_iterations = 20000;
    /// Optional Dirichlet data evaluated at boundary nodes (default zero).
    std::function<double(const Vec3&)> boundary_data;
};

/// Conjugate gradient with diagonal preconditioning on (Delta + h) v = rhs,
/// v = 0 on the boundary (or the supplied data). Throws
/// IndefiniteSystemError if a direction of non-positive curvature appears,
/// IterationLimitError on non-convergence.
ScalarField3D solve_dirichlet(const CoefficientH& h, const ScalarField3D& rhs,
                              const Domain& domain, const SolveOptions& opts = {});

/// Radial fast path on the ball of radius R: substituting w = r v turns
/// (Delta + h) v = f into -w'' + h w = r f with w(0) = w(R) = 0, integrated
/// by superposition of two RK45 trajectories.
ScalarFieldRadial solve_dirichlet_radial(const CoefficientH& h,
                                         const std::function<double(double)>& rhs, double R,
                                         const RadialGrid& output_grid);

// ----------------------------------------------------------------------------
// Coercivity
// ----------------------------------------------------------------------------

struct CoercivityReport {
    bool coercive = false;
    double smallest_eigenvalue = 0.0;
    bool sufficient_l32_bound = false;  // ||h_-||_{3/2} < delta (sufficient only)
    double h_minus_l32 = 0.0;
    double sobolev_delta = 0.0;
};

struct CoercivityOptions {
    /// Radial path resolution (h radial on a ball).
    int radial_nodes = 2048;
    /// 3D path spacing; used when h is not radial or the domain is not a ball.
    double spacing = 1.0 / 24.0;
    /// Sufficient-condition threshold; defaults to the sharp Sobolev constant
    /// 3 (pi/2)^{4/3} of the embedding H^1_0 -> L^6 in R^3.
    double sobolev_delta = 0.0;
    int max_iterations = 4000;
};

/// Smallest Dirichlet eigenvalue of Delta + h. Radial h on a ball reduces to
/// the half-line Sturm-Liouville problem -w'' + h w = lambda w, w(0) = w(R) =
/// 0 (the ground state of a radial potential is radial); otherwise inverse
/// power iteration on the 3D stencil.
CoercivityReport coercivity_check(const CoefficientH& h, const Domain& domain,
                                  const CoercivityOptions& opts = {});

// ----------------------------------------------------------------------------
// Radial nonlinear shooting: Delta u + h u = u^5, u(0) = a, u'(0) = 0, i.e.
// u'' + (2/r) u' = h u - u^5 in the analyst convention.
// ----------------------------------------------------------------------------

struct ShootOptions {
    double r_end = 1.0;
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    double blowup_guard = 1e8;  // |u| beyond this reports divergence
    int dense_output_nodes = 0; // 0: keep accepted steps only
    double max_step = 0.0;      // 0: adaptive only; >0 caps the step size
};

struct ShootResult {
    double endpoint_value = 0.0;
    ScalarFieldRadial profile;
    double endpoint_derivative = 0.0;
    bool stayed_positive = false;
    bool diverged = false;
};

ShootResult radial_shoot(const CoefficientH& h, double a, const ShootOptions& opts = {});

struct RadialSolveOptions {
    double a_min = 1e-2;
    double a_max = 1e3;
    int probes = 200;          // log-spaced shoots before bracketing
    double root_tol = 1e-10;   // |u(1)| target under bisection
    ShootOptions shoot;
};

struct SweepProbe {
    double height = 0.0;
    double endpoint_value = 0.0;
    bool diverged = false;
};

/// Positive radial solution with u(R) = 0 within tolerance, or NotFound with
/// the probe log (NotFound is a value, not an error; at sweep resolution it
/// is evidence, not proof).
struct RadialSolveOutcome {
    std::optional<ScalarFieldRadial> solution;
    double root_height = 0.0;
    double boundary_derivative = 0.0;
    std::vector<SweepProbe> sweep_log;
};

RadialSolveOutcome find_radial_solution(const CoefficientH& h,
                                        const RadialSolveOptions& opts = {});

}  // namespace poholab
