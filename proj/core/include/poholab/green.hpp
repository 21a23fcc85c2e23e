#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "poholab/coefficient.hpp"
#include "poholab/elliptic.hpp"
#include "poholab/fields.hpp"

namespace poholab {

// ============================================================================
// Green functions of Delta + h with Dirichlet conditions.
//
// Normalizations:
//   Scaled : Delta_y G + h G = omega_2 delta_x,  G ~ 1/|x-y|   (canonical)
//   Unit   : Delta_y G + h G = delta_x,          G ~ 1/(omega_2 |x-y|)
// Conversion is exact: Scaled = omega_2 * Unit.
// ============================================================================

enum class GreenNorm { Scaled, Unit };

/// Green function of the Laplacian on the ball of radius R (h = 0), scaled
/// normalization, by the method of images:
///   G(x,y) = 1/|x-y| - R/(|x| |y - R^2 x/|x|^2|),  G(0,y) = 1/|y| - 1/R.
/// Analytic oracle for the solver paths. Throws SingularityError at x = y.
double laplace_green_ball(const Vec3& x, const Vec3& y, double radius = 1.0);
/// Gradient in the second argument.
Vec3 laplace_green_ball_grad(const Vec3& x, const Vec3& y, double radius = 1.0);
/// Regular part value and y-gradient at y = x: m(x) = -R/(R^2-|x|^2) scaled
/// by ... (exact closed forms; see implementation).
double laplace_green_ball_mass(const Vec3& x, double radius = 1.0);
Vec3 laplace_green_ball_mass_gradient(const Vec3& x, double radius = 1.0);

/// Expansion data of G(x, x+z) = 1/|z| + h(x)|z|/2 + mass + grad.z + O(z^2)
/// (written in the Scaled normalization; Unit divides by omega_2).
struct GreenExpansion {
    Vec3 source{};
    double mass = 0.0;
    Vec3 grad_regular{};
    double h_at_source = 0.0;
    GreenNorm normalization = GreenNorm::Scaled;
    double fit_residual = 0.0;
};

GreenExpansion convert(const GreenExpansion& e, GreenNorm target);

// ----------------------------------------------------------------------------
// GreenField: evaluable G(x, .) built from an analytic singular part plus a
// smooth sampled correction; the grid never resolves the 1/|x-y| singularity.
// Immutable after construction; safe to share and evaluate across threads,
// and solves for distinct sources are independent.
// ----------------------------------------------------------------------------

class GreenField {
  public:
    enum class Path {
        Radial,     // radial h, source at 0: G = v(r)/r with v'' = h v
        ClosedForm, // h = 0 on a ball: method of images, exact
        Images3D,   // ball: images part + sampled beta, (Delta+h) beta = -h G_im
        FreeSpace3D // 1/|x-y| part + sampled harmonic-plus-beta correction
    };

    Vec3 source() const { return source_; }
    GreenNorm normalization() const { return normalization_; }
    Path path() const { return path_; }
    const Domain& domain() const { return domain_; }
    const CoefficientH& coefficient() const { return h_; }

    /// G(x, y); scaled or unit per the stored tag.
    double value(const Vec3& y) const;
    /// Gradient in y (analytic singular part exact, correction by FD).
    Vec3 gradient(const Vec3& y) const;
    /// Off the source, Delta_y G = -h(y) G(x,y); exposed for the composition
    /// Laplacians of the blow-up constructions.
    double laplacian(const Vec3& y) const;

    // Radial path access (throws unless path() == Radial).
    double value_radial(double r) const;
    double derivative_radial(double r) const;
    double second_derivative_radial(double r) const;
    /// Scaled mass gamma_x(x) = v'(0) for the radial path.
    double radial_mass() const;

    // builders (see solve_green)
    struct RadialData;
    GreenField(Vec3 source, GreenNorm n, Domain domain, CoefficientH h, Path path,
               std::shared_ptr<const RadialData> radial, std::optional<ScalarField3D> correction);

    struct RadialData {
        std::vector<double> r, v, vp;  // v'' = h v accepted steps, v = r G
        double mass = 0.0;             // v'(0)
        CoefficientH h;
        double eval_v(double r) const;
        double eval_vp(double r) const;
    };

  private:
    Vec3 source_{};
    GreenNorm normalization_ = GreenNorm::Scaled;
    Domain domain_;
    CoefficientH h_;
    Path path_ = Path::ClosedForm;
    std::shared_ptr<const RadialData> radial_;
    std::optional<ScalarField3D> correction_;
};

struct GreenOptions {
    enum class Mode { Auto, Radial, ClosedForm, Images3D, FreeSpace3D };
    Mode mode = Mode::Auto;
    double spacing = 1.0 / 32.0;
    double solver_tol = 1e-9;
    GreenNorm normalization = GreenNorm::Scaled;
    /// Skip the coercivity precheck (callers that already ran it).
    bool assume_coercive = false;
};

/// Green function of Delta + h at an interior source. Auto mode picks: the
/// exact closed form (h = 0 on a ball), the radial ODE path (radial h,
/// source 0 on a ball), or the 3D images decomposition. The source must keep
/// a distance of at least two grid spacings from the boundary.
GreenField solve_green(const CoefficientH& h, const Vec3& source, const Domain& domain,
                       const GreenOptions& opts = {});

struct ExpansionFitOptions {
    double r0_fraction = 0.05;  // r0 = fraction * dist(source, boundary)
    int shells = 5;             // radii r0 * 2^{-k}
    int n_theta = 16;
    int n_phi = 32;
    double residual_tol = 1e-2; // relative; above it the fit throws
};

/// Fits G(x, x+z) - 1/|z| - h(x)|z|/2 (scaled normalization) to
/// c0 + c.z + q|z|^2 over spherical shells; returns mass = c0 and
/// grad_regular = c. Throws NumericError when the fit residual exceeds the
/// tolerance (grid too coarse).
GreenExpansion extract_expansion(const GreenField& g, const CoefficientH& h,
                                 const ExpansionFitOptions& opts = {});

struct MassSample {
    Vec3 point{};
    double mass = 0.0;  // scaled normalization
};

struct MassScanResult {
    std::vector<MassSample> samples;
    int most_negative_index = -1;
};

MassScanResult mass_sign_scan(const CoefficientH& h, const Domain& domain,
                              const std::vector<Vec3>& points, const GreenOptions& opts = {});

}  // namespace poholab
