#include "poholab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "poholab/errors.hpp"
#include "poholab/io.hpp"

namespace poholab {

// ============================================================================
// ScalarFieldRadial
// ============================================================================

ScalarFieldRadial ScalarFieldRadial::sample(const std::function<double(double)>& f,
                                            RadialGrid grid, std::optional<double> origin) {
    ScalarFieldRadial out;
    out.grid = std::move(grid);
    out.values.resize(out.grid.nodes.size());
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = f(out.grid.nodes[i]);
    out.origin_value = origin;
    return out;
}

void ScalarFieldRadial::ensure_slopes() const {
    if (!slopes_.empty()) return;
    const auto& r = grid.nodes;
    const auto& y = values;
    const std::size_t n = r.size();
    if (y.size() != n) throw NumericError("ScalarFieldRadial: value/grid size mismatch");
    slopes_.resize(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = r[i] - r[i - 1], hr = r[i + 1] - r[i];
        const double dl = (y[i] - y[i - 1]) / hl, dr = (y[i + 1] - y[i]) / hr;
        slopes_[i] = (dl * hr + dr * hl) / (hl + hr);
    }
    // One-sided second-order end slopes.
    {
        const double h0 = r[1] - r[0], h1 = r[2] - r[1];
        const double d0 = (y[1] - y[0]) / h0, d1 = (y[2] - y[1]) / h1;
        slopes_[0] = d0 + (d0 - d1) * h0 / (h0 + h1);
        const std::size_t n1 = n - 1;
        const double g0 = r[n1] - r[n1 - 1], g1 = r[n1 - 1] - r[n1 - 2];
        const double e0 = (y[n1] - y[n1 - 1]) / g0, e1 = (y[n1 - 1] - y[n1 - 2]) / g1;
        slopes_[n1] = e0 + (e0 - e1) * g0 / (g0 + g1);
    }
}

namespace {

inline void hermite(double t, double h, double& b0, double& b1, double& bm0, double& bm1,
                    bool derivative) {
    const double s = t / h;
    if (!derivative) {
        b0 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        b1 = s * s * (3.0 - 2.0 * s);
        bm0 = h * s * (1.0 - s) * (1.0 - s);
        bm1 = h * s * s * (s - 1.0);
    } else {
        b0 = 6.0 * s * (s - 1.0) / h;
        b1 = -b0;
        bm0 = (1.0 - s) * (1.0 - 3.0 * s);
        bm1 = s * (3.0 * s - 2.0);
    }
}

}  // namespace

double ScalarFieldRadial::eval(double r) const {
    ensure_slopes();
    const auto& x = grid.nodes;
    if (r >= x.back()) return values.back() + slopes_.back() * (r - x.back());
    if (r < x.front()) {
        if (!origin_value)
            throw ExtrapolationError("ScalarFieldRadial: evaluation below the first node");
        // Hermite segment [0, r_1] with zero slope at the origin (radial
        // symmetry).
        const double h = x.front();
        double b0, b1, bm0, bm1;
        hermite(r, h, b0, b1, bm0, bm1, false);
        return b0 * (*origin_value) + b1 * values.front() + bm1 * slopes_.front();
    }
    const auto it = std::upper_bound(x.begin(), x.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const std::size_t j = std::min(i, x.size() - 2);
    const double h = x[j + 1] - x[j];
    double b0, b1, bm0, bm1;
    hermite(r - x[j], h, b0, b1, bm0, bm1, false);
    return b0 * values[j] + b1 * values[j + 1] + bm0 * slopes_[j] + bm1 * slopes_[j + 1];
}

double ScalarFieldRadial::deriv(double r) const {
    ensure_slopes();
    const auto& x = grid.nodes;
    if (r >= x.back()) return slopes_.back();
    if (r < x.front()) {
        if (!origin_value)
            throw ExtrapolationError("ScalarFieldRadial: evaluation below the first node");
        const double h = x.front();
        double b0, b1, bm0, bm1;
        hermite(r, h, b0, b1, bm0, bm1, true);
        return b0 * (*origin_value) + b1 * values.front() + bm1 * slopes_.front();
    }
    const auto it = std::upper_bound(x.begin(), x.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const std::size_t j = std::min(i, x.size() - 2);
    const double h = x[j + 1] - x[j];
    double b0, b1, bm0, bm1;
    hermite(r - x[j], h, b0, b1, bm0, bm1, true);
    return b0 * values[j] + b1 * values[j + 1] + bm0 * slopes_[j] + bm1 * slopes_[j + 1];
}

// ============================================================================
// ScalarField3D
// ============================================================================

ScalarField3D ScalarField3D::zeros(std::shared_ptr<const Grid3D> grid) {
    ScalarField3D f;
    f.values.assign(grid->node_count(), 0.0);
    f.grid = std::move(grid);
    return f;
}

ScalarField3D ScalarField3D::sample(const std::function<double(const Vec3&)>& fn,
                                    std::shared_ptr<const Grid3D> grid) {
    ScalarField3D f = zeros(grid);
    const Grid3D& g = *f.grid;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t idx = g.index(i, j, k);
                if (g.node_kind[idx] != 0) f.values[idx] = fn(g.point(i, j, k));
            }
    return f;
}

double ScalarField3D::eval(const Vec3& x) const {
    const Grid3D& g = *grid;
    const double fx = (x.x - g.lo.x) / g.h;
    const double fy = (x.y - g.lo.y) / g.h;
    const double fz = (x.z - g.lo.z) / g.h;
    int i = static_cast<int>(std::floor(fx));
    int j = static_cast<int>(std::floor(fy));
    int k = static_cast<int>(std::floor(fz));
    i = std::clamp(i, 0, g.nx - 2);
    j = std::clamp(j, 0, g.ny - 2);
    k = std::clamp(k, 0, g.nz - 2);
    const double tx = std::clamp(fx - i, 0.0, 1.0);
    const double ty = std::clamp(fy - j, 0.0, 1.0);
    const double tz = std::clamp(fz - k, 0.0, 1.0);
    double acc = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                const double w = (di ? tx : 1.0 - tx) * (dj ? ty : 1.0 - ty) * (dk ? tz : 1.0 - tz);
                acc += w * values[g.index(i + di, j + dj, k + dk)];
            }
    return acc;
}

Vec3 ScalarField3D::grad_fd(const Vec3& x) const {
    const double s = grid->h;
    return {(eval({x.x + s, x.y, x.z}) - eval({x.x - s, x.y, x.z})) / (2.0 * s),
            (eval({x.x, x.y + s, x.z}) - eval({x.x, x.y - s, x.z})) / (2.0 * s),
            (eval({x.x, x.y, x.z + s}) - eval({x.x, x.y, x.z - s})) / (2.0 * s)};
}

// ============================================================================
// Views
// ============================================================================

FieldView make_view(const ScalarField3D& f) {
    return {[&f](const Vec3& x) { return f.eval(x); }, [&f](const Vec3& x) { return f.grad_fd(x); }};
}

FieldView make_view(const ScalarFieldRadial& f, Vec3 center) {
    return {[&f, center](const Vec3& x) { return f.eval(norm(x - center)); },
            [&f, center](const Vec3& x) {
                const Vec3 d = x - center;
                const double r = norm(d);
                if (r == 0.0) return Vec3{0, 0, 0};
                return d * (f.deriv(r) / r);
            }};
}

FieldView make_view(std::function<double(const Vec3&)> value, double fd_step) {
    auto v = std::make_shared<std::function<double(const Vec3&)>>(std::move(value));
    return {[v](const Vec3& x) { return (*v)(x); },
            [v, fd_step](const Vec3& x) -> Vec3 {
                const double s = fd_step;
                return {((*v)({x.x + s, x.y, x.z}) - (*v)({x.x - s, x.y, x.z})) / (2 * s),
                        ((*v)({x.x, x.y + s, x.z}) - (*v)({x.x, x.y - s, x.z})) / (2 * s),
                        ((*v)({x.x, x.y, x.z + s}) - (*v)({x.x, x.y, x.z - s})) / (2 * s)};
            }};
}

FieldView make_view(std::function<double(const Vec3&)> value,
                    std::function<Vec3(const Vec3&)> gradient) {
    return {std::move(value), std::move(gradient)};
}

// ============================================================================
// Quadrature over fields
// ============================================================================

double sphere_average(const FieldView& u, const Domain& domain, const Vec3& center, double r,
                      const SphereRule& rule) {
    if (r <= 0.0) throw GeometryError("sphere_average: radius must be positive");
    for (const Vec3& w : rule.dirs) {
        if (!domain.contains(center + w * r))
            throw GeometryError("sphere_average: sphere exits the domain");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.dirs.size(); ++i)
        acc += rule.weights[i] * u.value(center + rule.dirs[i] * r);
    return acc;
}

double sphere_average(const ScalarField3D& u, const Domain& domain, const Vec3& center, double r,
                      const SphereRule& rule) {
    return sphere_average(make_view(u), domain, center, r, rule);
}

double sphere_average(const ScalarFieldRadial& u, const Domain& domain, const Vec3& center,
                      double r, const SphereRule& rule) {
    if (norm(center) == 0.0) {
        if (!domain.contains({r, 0, 0}))
            throw GeometryError("sphere_average: sphere exits the domain");
        return u.eval(r);  // radial field equals its spherical mean
    }
    return sphere_average(make_view(u), domain, center, r, rule);
}

double volume_integral(const ScalarFieldRadial& u, const std::function<double(double)>& weight) {
    const auto& r = u.grid.nodes;
    std::vector<double> integrand(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double w = weight ? weight(r[i]) : 1.0;
        integrand[i] = kOmega2 * r[i] * r[i] * u.values[i] * w;
    }
    double total = integrate_nonuniform(r, integrand);
    // Core [0, r_1]: the integrand is O(r^2); one quadratic panel with the
    // value pinned at r_1 covers it to the grading accuracy.
    total += integrand.front() * r.front() / 3.0;
    return total;
}

double volume_integral(const FieldView& u, const Domain& domain, int radial_points,
                       const SphereRule& rule) {
    double acc = 0.0;
    std::vector<double> xs(radial_points), ys(radial_points);
    for (std::size_t d = 0; d < rule.dirs.size(); ++d) {
        const Vec3& w = rule.dirs[d];
        const double R = domain.boundary_radius(w);
        for (int i = 0; i < radial_points; ++i) {
            const double r = R * (i + 1.0) / radial_points;
            xs[i] = r;
            ys[i] = r * r * u.value(w * r);
        }
        double ray = integrate_nonuniform(xs, ys);
        ray += ys.front() * xs.front() / 3.0;
        acc += rule.weights[d] * ray;
    }
    return kOmega2 * acc;
}

double volume_integral(const ScalarField3D& u, const Domain& domain,
                       const std::function<double(const Vec3&)>& weight) {
    FieldView view = make_view(u);
    if (weight) {
        FieldView weighted{[&u, &weight](const Vec3& x) { return u.eval(x) * weight(x); }, nullptr};
        const int pts = std::max(96, static_cast<int>(3.0 * domain.bounding_radius() / u.grid->h));
        return volume_integral(weighted, domain, pts);
    }
    const int pts = std::max(96, static_cast<int>(3.0 * domain.bounding_radius() / u.grid->h));
    return volume_integral(view, domain, pts);
}

double surface_integral(const std::function<double(const Vec3&, const Vec3&)>& f,
                        const Domain& domain, const SphereRule& rule) {
    if (domain.is_ball()) {
        const double R = domain.ball_radius();
        double acc = 0.0;
        for (std::size_t d = 0; d < rule.dirs.size(); ++d)
            acc += rule.weights[d] * f(rule.dirs[d] * R, rule.dirs[d]);
        return kOmega2 * R * R * acc;
    }
    // Star-shaped graph: area element rho sqrt(rho^2 + |grad_S rho|^2) with
    // the normal nu proportional to (n_hat - grad_S rho / rho).
    double acc = 0.0;
    const double eps = 1e-5;
    for (std::size_t d = 0; d < rule.dirs.size(); ++d) {
        const Vec3 n = rule.dirs[d];
        const double rho = domain.boundary_radius(n);
        // Angular gradient by FD in two tangent directions.
        Vec3 t1 = std::abs(n.z) < 0.9 ? normalized(Vec3{-n.y, n.x, 0}) : normalized(Vec3{0, -n.z, n.y});
        Vec3 t2 = {n.y * t1.z - n.z * t1.y, n.z * t1.x - n.x * t1.z, n.x * t1.y - n.y * t1.x};
        const double d1 =
            (domain.boundary_radius(normalized(n + t1 * eps)) - domain.boundary_radius(normalized(n - t1 * eps))) /
            (2.0 * eps);
        const double d2 =
            (domain.boundary_radius(normalized(n + t2 * eps)) - domain.boundary_radius(normalized(n - t2 * eps))) /
            (2.0 * eps);
        const Vec3 grad_s = t1 * d1 + t2 * d2;
        const Vec3 nu = normalized(n - grad_s / rho);
        const double area = rho * std::sqrt(rho * rho + norm2(grad_s));
        acc += rule.weights[d] * area * f(n * rho, nu);
    }
    return kOmega2 * acc;
}

// ============================================================================
// CSV round trip
// ============================================================================

void write_radial_csv(const ScalarFieldRadial& f, const std::string& path) {
    CsvTable t;
    t.header = {"r", "value"};
    if (f.origin_value) t.add_row({"0", format_double(*f.origin_value)});
    for (std::size_t i = 0; i < f.values.size(); ++i)
        t.add_row({format_double(f.grid.nodes[i]), format_double(f.values[i])});
    write_csv_atomic(path, t);
}

ScalarFieldRadial read_radial_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    if (t.header.size() < 2 || t.header[0] != "r")
        throw ConfigError("radial field CSV: expected header r,value");
    ScalarFieldRadial f;
    std::vector<double> nodes;
    for (const auto& row : t.rows) {
        const double r = std::stod(row.at(0));
        const double v = std::stod(row.at(1));
        if (r == 0.0) {
            f.origin_value = v;
            continue;
        }
        nodes.push_back(r);
        f.values.push_back(v);
    }
    f.grid = RadialGrid::from_nodes(std::move(nodes));
    return f;
}

void write_field3d_csv(const ScalarField3D& f, const std::string& path) {
    CsvTable t;
    t.header = {"x", "y", "z", "value"};
    const Grid3D& g = *f.grid;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t idx = g.index(i, j, k);
                if (g.node_kind[idx] == 0) continue;
                const Vec3 p = g.point(i, j, k);
                t.add_row({format_double(p.x), format_double(p.y), format_double(p.z),
                           format_double(f.values[idx])});
            }
    write_csv_atomic(path, t);
}

ScalarField3D read_field3d_csv(const std::string& path, const Domain& domain) {
    CsvTable t = read_csv(path);
    if (t.header.size() < 4) throw ConfigError("3D field CSV: expected header x,y,z,value");
    // Infer the spacing from the sorted distinct x coordinates.
    std::vector<double> xs;
    xs.reserve(t.rows.size());
    for (const auto& row : t.rows) xs.push_back(std::stod(row.at(0)));
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             xs.end());
    if (xs.size() < 2) throw ConfigError("3D field CSV: cannot infer grid spacing");
    double h = std::numeric_limits<double>::max();
    for (std::size_t i = 1; i < xs.size(); ++i) h = std::min(h, xs[i] - xs[i - 1]);
    auto grid = Grid3D::cover(domain, h);
    ScalarField3D f = ScalarField3D::zeros(grid);
    const Grid3D& g = *grid;
    for (const auto& row : t.rows) {
        const Vec3 p{std::stod(row.at(0)), std::stod(row.at(1)), std::stod(row.at(2))};
        const int i = static_cast<int>(std::llround((p.x - g.lo.x) / g.h));
        const int j = static_cast<int>(std::llround((p.y - g.lo.y) / g.h));
        const int k = static_cast<int>(std::llround((p.z - g.lo.z) / g.h));
        if (!g.in_range(i, j, k)) throw ConfigError("3D field CSV: node outside the covering grid");
        f.values[g.index(i, j, k)] = std::stod(row.at(3));
    }
    return f;
}

}  // namespace poholab
