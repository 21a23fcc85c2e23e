#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "poholab/fields.hpp"
#include "poholab/pohozaev.hpp"

namespace poholab {

// ============================================================================
// The standard bubble, spherical profiles, and the greedy extraction of
// concentration points.
// ============================================================================

/// U_mu(x) = mu^{-1/2} (1 + |x-center|^2 / (3 mu^2))^{-1/2}; solves
/// Delta U = U^5 on R^3 for every mu > 0.
double standard_bubble(const Vec3& x, const Vec3& center, double mu);

/// psi(r) = r^{1/2} * sphere_average(u, center, r).
std::vector<std::pair<double, double>> spherical_profile(const FieldView& u, const Domain& domain,
                                                         const Vec3& center,
                                                         const std::vector<double>& radii,
                                                         const SphereRule& rule = SphereRule::standard());

/// Largest r in the profile with discrete psi' <= 0 on [inner_cutoff, r];
/// returns the outer limit when psi' never turns positive. Throws on fewer
/// than 3 samples past the cutoff.
double critical_radius(const std::vector<std::pair<double, double>>& profile,
                       double inner_cutoff);

struct ExtractionResult {
    std::vector<Vec3> points;
    std::vector<double> heights;  // u(x_i)
    double threshold = 1.0;
    /// max over grid of (min_i |x_i - x|) u(x)^2; diagnostic only (the
    /// covering bound is guaranteed at critical points, not grid-wide).
    double covering_margin = 0.0;
    bool empty() const { return points.empty(); }
};

/// Greedy construction over the discrete strict local maxima (26-neighbor,
/// 2-cell boundary layer excluded): K_0 = {maxima with d(x,boundary) u^2 >=
/// threshold}; then repeatedly take the argmax of u (lexicographic
/// tie-break) and prune every x with |x_new - x| u(x)^2 < threshold. An
/// empty K_0 yields an empty result, not an error.
ExtractionResult extract_concentration_points(const ScalarField3D& u, const Domain& domain,
                                              double threshold = 1.0);

/// sup over |z| <= R of | mu^{1/2} u(point + mu z) - (1+|z|^2/3)^{-1/2} |,
/// sampled on a radial-times-sphere lattice.
double rescale_and_compare(const FieldView& u, const Domain& domain, const Vec3& point,
                           double mu, double R, int n_radial = 64,
                           const SphereRule& rule = SphereRule::coarse());

}  // namespace poholab
