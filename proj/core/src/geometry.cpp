#include "poholab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace poholab {

// ============================================================================
// Domain
// ============================================================================

Domain Domain::unit_ball(double radius) {
    Domain d;
    d.kind_ = Kind::UnitBall;
    d.radius_ = radius;
    return d;
}

Domain Domain::star_shaped(std::function<double(const Vec3&)> boundary_radius) {
    Domain d;
    d.kind_ = Kind::StarShaped;
    d.rho_ = std::move(boundary_radius);
    d.radius_ = 0.0;
    return d;
}

double Domain::boundary_radius(const Vec3& unit_dir) const {
    if (kind_ == Kind::UnitBall) return radius_;
    return rho_(unit_dir);
}

bool Domain::contains(const Vec3& x) const {
    const double r = norm(x);
    if (kind_ == Kind::UnitBall) return r < radius_;
    if (r == 0.0) return rho_({1, 0, 0}) > 0.0;
    return r < rho_(x / r);
}

double Domain::distance_to_boundary(const Vec3& x) const {
    if (kind_ == Kind::UnitBall) return radius_ - norm(x);
    // Sampled lower bound over directions; adequate for the extraction and
    // fit-radius uses, which only need the right order of magnitude.
    const SphereRule& rule = SphereRule::coarse();
    double best = std::numeric_limits<double>::max();
    for (const Vec3& w : rule.dirs) {
        const double rho = rho_(w);
        best = std::min(best, norm(w * rho - x));
    }
    return best;
}

double Domain::bounding_radius() const {
    if (kind_ == Kind::UnitBall) return radius_;
    const SphereRule& rule = SphereRule::standard();
    double best = 0.0;
    for (const Vec3& w : rule.dirs) best = std::max(best, rho_(w));
    return best;
}

StarShapeCertificate check_star_shaped(const Domain& domain, int n_theta, int n_phi) {
    StarShapeCertificate cert;
    cert.min_boundary_radius = std::numeric_limits<double>::max();
    cert.min_inner_product = std::numeric_limits<double>::max();

    // <x, nu> on the graph r = rho(omega): with the exact normal, the value
    // is rho^2 / sqrt(rho^2 + |grad_S rho|^2); the angular gradient is
    // estimated by central differences on the parameter sphere.
    const double dt = kPi / n_theta;
    const double dp = 2.0 * kPi / n_phi;
    auto dir = [](double th, double ph) -> Vec3 {
        return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    };
    auto rho_at = [&](double th, double ph) { return domain.boundary_radius(dir(th, ph)); };

    for (int it = 0; it <= n_theta; ++it) {
        const double th = std::min(kPi, std::max(0.0, it * dt));
        for (int ip = 0; ip < n_phi; ++ip) {
            const double ph = ip * dp;
            const double rho = rho_at(th, ph);
            cert.min_boundary_radius = std::min(cert.min_boundary_radius, rho);
            if (rho <= 0.0) continue;
            const double dth = (rho_at(th + dt, ph) - rho_at(th - dt, ph)) / (2.0 * dt);
            const double sin_th = std::max(std::sin(th), 1e-9);
            const double dph = (rho_at(th, ph + dp) - rho_at(th, ph - dp)) / (2.0 * dp * sin_th);
            const double grad2 = dth * dth + dph * dph;
            const double xn = rho * rho / std::sqrt(rho * rho + grad2);
            cert.min_inner_product = std::min(cert.min_inner_product, xn);
        }
    }
    if (cert.min_boundary_radius <= 0.0) {
        cert.passed = false;
        cert.failure_reason = "boundary_radius_function is not strictly positive";
        cert.min_inner_product = 0.0;
        return cert;
    }
    cert.passed = cert.min_inner_product > 0.0;
    if (!cert.passed) cert.failure_reason = "<x, nu> <= 0 at a sampled boundary point";
    return cert;
}

// ============================================================================
// RadialGrid
// ============================================================================

RadialGrid RadialGrid::graded(double R, int n, double first_frac) {
    if (n < 8 || R <= 0.0 || first_frac <= 0.0 || first_frac > 1e-3)
        throw GeometryError("RadialGrid::graded: need n >= 8, R > 0, first_frac in (0, 1e-3]");
    RadialGrid g;
    g.nodes.resize(n);
    const double q = std::exp(std::log(1.0 / first_frac) / (n - 1));
    double r = first_frac * R;
    for (int i = 0; i < n; ++i) {
        g.nodes[i] = r;
        r *= q;
    }
    g.nodes.back() = R;
    return g;
}

RadialGrid RadialGrid::uniform(double R, int n) {
    if (n < 3 || R <= 0.0) throw GeometryError("RadialGrid::uniform: need n >= 3, R > 0");
    RadialGrid g;
    g.nodes.resize(n);
    for (int i = 0; i < n; ++i) g.nodes[i] = R * (i + 1) / n;
    return g;
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 3) throw GeometryError("RadialGrid: need at least 3 nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] <= 0.0 || (i > 0 && nodes[i] <= nodes[i - 1]))
            throw GeometryError("RadialGrid: nodes must be positive and strictly increasing");
    }
    RadialGrid g;
    g.nodes = std::move(nodes);
    return g;
}

// ============================================================================
// Grid3D
// ============================================================================

std::shared_ptr<const Grid3D> Grid3D::cover(const Domain& domain, double spacing) {
    if (spacing <= 0.0) throw GeometryError("Grid3D::cover: spacing must be positive");
    auto grid = std::make_shared<Grid3D>();
    Grid3D& g = *grid;
    g.h = spacing;
    const double R = domain.bounding_radius() + 2.5 * spacing;
    const int n = 2 * static_cast<int>(std::ceil(R / spacing)) + 1;
    g.nx = g.ny = g.nz = n;
    const double half = spacing * ((n - 1) / 2);
    g.lo = {-half, -half, -half};

    g.node_kind.assign(g.node_count(), 0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (domain.contains(g.point(i, j, k))) g.node_kind[g.index(i, j, k)] = 1;

    const int di[6] = {1, -1, 0, 0, 0, 0};
    const int dj[6] = {0, 0, 1, -1, 0, 0};
    const int dk[6] = {0, 0, 0, 0, 1, -1};
    int interior = 0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const std::size_t idx = g.index(i, j, k);
                if (g.node_kind[idx] == 1) {
                    ++interior;
                    continue;
                }
                for (int s = 0; s < 6; ++s) {
                    const int ii = i + di[s], jj = j + dj[s], kk = k + dk[s];
                    if (g.in_range(ii, jj, kk) && g.node_kind[g.index(ii, jj, kk)] == 1) {
                        g.node_kind[idx] = 2;
                        break;
                    }
                }
            }
    g.n_interior = interior;
    return grid;
}

// ============================================================================
// SphereRule
// ============================================================================

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton on the Legendre
// recurrence.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double p0 = 0.0, p1 = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            const double dp = n * (t * p0 - p1) / (t * t - 1.0);
            const double dt = p0 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        p0 = 1.0;
        p1 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
        }
        const double dp = n * (t * p0 - p1) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

}  // namespace

SphereRule SphereRule::product(int n_theta, int n_phi) {
    SphereRule rule;
    std::vector<double> ct, wt;
    gauss_legendre(n_theta, ct, wt);
    rule.dirs.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    rule.weights.reserve(rule.dirs.capacity());
    for (int i = 0; i < n_theta; ++i) {
        const double cos_t = ct[i];
        const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
        for (int j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * kPi * (j + 0.5) / n_phi;
            rule.dirs.push_back({sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t});
            // GL weight integrates d(cos theta) over [-1,1] (total 2); the
            // mean over the sphere divides by 2 and by n_phi.
            rule.weights.push_back(wt[i] / (2.0 * n_phi));
        }
    }
    return rule;
}

const SphereRule& SphereRule::standard() {
    static const SphereRule rule = SphereRule::product(32, 64);
    return rule;
}

const SphereRule& SphereRule::coarse() {
    static const SphereRule rule = SphereRule::product(16, 32);
    return rule;
}

// ============================================================================
// 1D quadrature
// ============================================================================

double integrate_nonuniform(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw GeometryError("integrate_nonuniform: bad sizes");
    if (n == 2) return 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
    double total = 0.0;
    // Pairs of intervals: quadratic through (x_i, x_{i+1}, x_{i+2}).
    std::size_t i = 0;
    while (i + 2 < n) {
        const double h0 = x[i + 1] - x[i];
        const double h1 = x[i + 2] - x[i + 1];
        const double H = h0 + h1;
        // Exact integral of the Lagrange quadratic over [x_i, x_{i+2}].
        const double w0 = H * (2.0 * h0 - h1) / (6.0 * h0);
        const double w1 = H * H * H / (6.0 * h0 * h1);
        const double w2 = H * (2.0 * h1 - h0) / (6.0 * h1);
        total += w0 * y[i] + w1 * y[i + 1] + w2 * y[i + 2];
        i += 2;
    }
    if (i + 2 == n) {
        // One interval left: quadratic through the last three points,
        // integrated over the final interval only.
        const double h0 = x[n - 2] - x[n - 3];
        const double h1 = x[n - 1] - x[n - 2];
        const double a = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        const double b = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        const double c = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        total += a * y[n - 1] + b * y[n - 2] - c * y[n - 3];
    }
    return total;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double m, double b,
                   double fa, double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, m, b, fa, fm, fb, whole, abs_tol, max_depth);
}

}  // namespace poholab
