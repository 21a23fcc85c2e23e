#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "poholab/geometry.hpp"
#include "poholab/vec.hpp"

namespace poholab {

// ============================================================================
// Sampled scalar fields. All PDE quantities live in these two containers.
// ============================================================================

/// Radial samples on a RadialGrid with cubic Hermite interpolation between
/// nodes (finite-difference slopes). An optional origin value extends the
/// interpolant to [0, r_1); without it, evaluation below the first node
/// throws ExtrapolationError.
struct ScalarFieldRadial {
    RadialGrid grid;
    std::vector<double> values;
    std::optional<double> origin_value;

    static ScalarFieldRadial sample(const std::function<double(double)>& f, RadialGrid grid,
                                    std::optional<double> origin = std::nullopt);

    double eval(double r) const;
    /// Derivative of the interpolant.
    double deriv(double r) const;
    double outer_radius() const { return grid.outer(); }

  private:
    void ensure_slopes() const;
    mutable std::vector<double> slopes_;  // lazy FD slopes, grid-shaped
};

/// Node-indexed samples on a Grid3D. Values are stored for every lattice node
/// (exterior nodes hold 0); boundary nodes hold the Dirichlet data.
struct ScalarField3D {
    std::shared_ptr<const Grid3D> grid;
    std::vector<double> values;

    static ScalarField3D zeros(std::shared_ptr<const Grid3D> grid);
    static ScalarField3D sample(const std::function<double(const Vec3&)>& f,
                                std::shared_ptr<const Grid3D> grid);

    double at(int i, int j, int k) const { return values[grid->index(i, j, k)]; }
    double& at(int i, int j, int k) { return values[grid->index(i, j, k)]; }

    /// Trilinear interpolation of the node values.
    double eval(const Vec3& x) const;
    /// Central differences of eval with step h.
    Vec3 grad_fd(const Vec3& x) const;
};

// ============================================================================
// Field views: the uniform evaluation interface quadrature and the Pohozaev
// evaluators consume. Adapters exist for both sampled containers and for
// closed-form callables (oracle paths).
// ============================================================================

struct FieldView {
    std::function<double(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> gradient;
};

FieldView make_view(const ScalarField3D& f);
FieldView make_view(const ScalarFieldRadial& f, Vec3 center = {});
FieldView make_view(std::function<double(const Vec3&)> value, double fd_step = 1e-5);
FieldView make_view(std::function<double(const Vec3&)> value,
                    std::function<Vec3(const Vec3&)> gradient);

// ============================================================================
// Quadrature over fields
// ============================================================================

/// Mean of the field over the sphere of radius r about center (surface
/// measure divided by omega_2 r^2). Throws GeometryError if the sphere exits
/// the domain.
double sphere_average(const FieldView& u, const Domain& domain, const Vec3& center, double r,
                      const SphereRule& rule = SphereRule::standard());
double sphere_average(const ScalarField3D& u, const Domain& domain, const Vec3& center, double r,
                      const SphereRule& rule = SphereRule::standard());
double sphere_average(const ScalarFieldRadial& u, const Domain& domain, const Vec3& center,
                      double r, const SphereRule& rule = SphereRule::standard());

/// Volume integral of field * weight over the domain. Radial fields use the
/// graded-grid Simpson rule with 4 pi r^2 weight; 3D fields use the spherical
/// product rule with per-ray Simpson and trilinear interpolation.
double volume_integral(const ScalarFieldRadial& u,
                       const std::function<double(double)>& weight = nullptr);
double volume_integral(const ScalarField3D& u, const Domain& domain,
                       const std::function<double(const Vec3&)>& weight = nullptr);
double volume_integral(const FieldView& u, const Domain& domain, int radial_points = 96,
                       const SphereRule& rule = SphereRule::standard());

/// Surface integral of f over the domain boundary (f receives the boundary
/// point and the outward unit normal).
double surface_integral(const std::function<double(const Vec3&, const Vec3&)>& f,
                        const Domain& domain, const SphereRule& rule = SphereRule::standard());

// CSV round trip for fields (header row; '.' decimal, comma separator). The
// JSON manifest written next to the CSV carries grid metadata and the
// convention tags.
void write_radial_csv(const ScalarFieldRadial& f, const std::string& path);
ScalarFieldRadial read_radial_csv(const std::string& path);
void write_field3d_csv(const ScalarField3D& f, const std::string& path);
ScalarField3D read_field3d_csv(const std::string& path, const Domain& domain);

}  // namespace poholab
