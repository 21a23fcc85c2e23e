#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "poholab/errors.hpp"
#include "poholab/vec.hpp"

namespace poholab {

// ============================================================================
// Domains: the unit ball and star-shaped radial graphs r = rho(direction),
// always centered at the origin. General centers are obtained by translating
// the data, never the domain.
// ============================================================================

class Domain {
  public:
    enum class Kind { UnitBall, StarShaped };

    static Domain unit_ball(double radius = 1.0);
    static Domain star_shaped(std::function<double(const Vec3&)> boundary_radius);

    Kind kind() const { return kind_; }
    bool is_ball() const { return kind_ == Kind::UnitBall; }
    double ball_radius() const { return radius_; }

    /// Boundary radius along a unit direction.
    double boundary_radius(const Vec3& unit_dir) const;
    bool contains(const Vec3& x) const;
    /// Exact for the ball; for star-shaped graphs a sampled lower bound.
    double distance_to_boundary(const Vec3& x) const;
    double bounding_radius() const;

  private:
    Kind kind_ = Kind::UnitBall;
    double radius_ = 1.0;
    std::function<double(const Vec3&)> rho_;
};

struct StarShapeCertificate {
    bool passed = false;
    double min_boundary_radius = 0.0;  // min over sampled directions of rho
    double min_inner_product = 0.0;    // min over sampled boundary points of <x, nu_hat>
    std::string failure_reason;
};

/// Samples the boundary and checks the Domain invariants: rho strictly
/// positive and <x, nu> > 0 at every sampled boundary point.
StarShapeCertificate check_star_shaped(const Domain& domain, int n_theta = 64, int n_phi = 128);

// ============================================================================
// Grids
// ============================================================================

/// Radii in (0, R], strictly increasing, geometrically refined toward 0.
struct RadialGrid {
    std::vector<double> nodes;

    /// Geometric grid with nodes[0] = first_frac * R and nodes.back() = R.
    /// first_frac must satisfy nodes[0] <= 1e-3 R (graded-cluster invariant).
    static RadialGrid graded(double R, int n, double first_frac = 1e-4);
    static RadialGrid uniform(double R, int n);
    static RadialGrid from_nodes(std::vector<double> nodes);

    int size() const { return static_cast<int>(nodes.size()); }
    double outer() const { return nodes.back(); }
    double inner() const { return nodes.front(); }
};

/// Axis-aligned node lattice covering a domain, with interior/boundary
/// classification. Boundary nodes are the non-interior nodes with an interior
/// axis neighbor; they carry the Dirichlet value slot (first-order snapping).
struct Grid3D {
    double h = 0.0;
    Vec3 lo{};
    int nx = 0, ny = 0, nz = 0;
    std::vector<uint8_t> node_kind;  // 0 exterior, 1 interior, 2 boundary
    int n_interior = 0;

    static std::shared_ptr<const Grid3D> cover(const Domain& domain, double spacing);

    std::size_t node_count() const { return static_cast<std::size_t>(nx) * ny * nz; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    Vec3 point(int i, int j, int k) const { return {lo.x + h * i, lo.y + h * j, lo.z + h * k}; }
    bool in_range(int i, int j, int k) const {
        return i >= 0 && j >= 0 && k >= 0 && i < nx && j < ny && k < nz;
    }
};

// ============================================================================
// Quadrature
// ============================================================================

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times a
/// uniform azimuthal rule. Weights sum to 1 (the rule computes means).
struct SphereRule {
    std::vector<Vec3> dirs;
    std::vector<double> weights;

    static SphereRule product(int n_theta, int n_phi);
    /// Default 32x64 rule, built once.
    static const SphereRule& standard();
    /// Coarser 16x32 rule for inner loops (expansion fits, scans).
    static const SphereRule& coarse();
};

/// Integral of y dx over a strictly increasing abscissa set, by composite
/// Simpson on consecutive interval pairs (quadratic through each triple);
/// trapezoid closes an odd final interval.
double integrate_nonuniform(const std::vector<double>& x, const std::vector<double>& y);

/// Adaptive Simpson on [a, b] to an absolute tolerance. Independent oracle
/// used by tests; kept free of the grid machinery on purpose.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12, int max_depth = 40);

}  // namespace poholab
