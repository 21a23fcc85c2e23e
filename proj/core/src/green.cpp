#include "poholab/green.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "poholab/errors.hpp"

namespace poholab {

// ============================================================================
// Method-of-images closed forms on the ball (h = 0, scaled normalization)
// ============================================================================

double laplace_green_ball(const Vec3& x, const Vec3& y, double radius) {
    const double d = norm(x - y);
    if (d < 1e-14) throw SingularityError("laplace_green_ball: x = y");
    const double ax = norm(x);
    if (ax < 1e-14) return 1.0 / norm(y) - 1.0 / radius;
    const Vec3 image = x * (radius * radius / (ax * ax));
    return 1.0 / d - radius / (ax * norm(y - image));
}

Vec3 laplace_green_ball_grad(const Vec3& x, const Vec3& y, double radius) {
    const Vec3 dxy = y - x;
    const double d = norm(dxy);
    if (d < 1e-14) throw SingularityError("laplace_green_ball_grad: x = y");
    const double ax = norm(x);
    if (ax < 1e-14) {
        const double ay = norm(y);
        return y * (-1.0 / (ay * ay * ay));
    }
    const Vec3 image = x * (radius * radius / (ax * ax));
    const Vec3 dyi = y - image;
    const double di = norm(dyi);
    return dxy * (-1.0 / (d * d * d)) + dyi * (radius / (ax * di * di * di));
}

double laplace_green_ball_mass(const Vec3& x, double radius) {
    const double r2 = norm2(x);
    return -radius / (radius * radius - r2);
}

Vec3 laplace_green_ball_mass_gradient(const Vec3& x, double radius) {
    const double denom = radius * radius - norm2(x);
    return x * (-radius / (denom * denom));
}

GreenExpansion convert(const GreenExpansion& e, GreenNorm target) {
    if (e.normalization == target) return e;
    GreenExpansion out = e;
    const double f = target == GreenNorm::Unit ? 1.0 / kOmega2 : kOmega2;
    out.mass *= f;
    out.grad_regular = out.grad_regular * f;
    out.normalization = target;
    return out;
}

// ============================================================================
// Radial path: v'' = h v on (0, R), v(0) = 1, v(R) = 0; G = v/r.
// ============================================================================

namespace {

struct Sample {
    double r;
    double v, vp;
};

// Adaptive integrator for the scalar linear ODE v'' = h(r) v, step-doubling
// RK4 with Richardson control; kept local so the Green path stays
// independent of the nonlinear shooting machinery.
template <typename F>
void rk45_linear(F&& f, double r0, double r1, double y0, double y1, std::vector<Sample>& out) {
    double r = r0, v = y0, vp = y1;
    out.push_back({r, v, vp});
    double h = (r1 - r0) * 1e-3;
    const double atol = 1e-13, rtol = 1e-12;
    auto rk4 = [&f](double rr, double vv, double pp, double hh) {
        auto dv = [&f](double r2, double v2, double p2) {
            return std::pair<double, double>{p2, f(r2) * v2};
        };
        auto [k1v, k1p] = dv(rr, vv, pp);
        auto [k2v, k2p] = dv(rr + hh / 2, vv + hh / 2 * k1v, pp + hh / 2 * k1p);
        auto [k3v, k3p] = dv(rr + hh / 2, vv + hh / 2 * k2v, pp + hh / 2 * k2p);
        auto [k4v, k4p] = dv(rr + hh, vv + hh * k3v, pp + hh * k3p);
        return std::pair<double, double>{vv + hh / 6 * (k1v + 2 * k2v + 2 * k3v + k4v),
                                         pp + hh / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)};
    };
    while (r < r1) {
        h = std::min(h, r1 - r);
        auto [vf, pf] = rk4(r, v, vp, h);
        auto [vh1, ph1] = rk4(r, v, vp, h / 2);
        auto [vh2, ph2] = rk4(r + h / 2, vh1, ph1, h / 2);
        const double err = std::max(std::abs(vf - vh2), std::abs(pf - ph2));
        const double sc = atol + rtol * std::max({std::abs(v), std::abs(vf), 1.0});
        if (err <= sc) {
            r += h;
            v = vh2 + (vh2 - vf) / 15.0;
            vp = ph2 + (ph2 - pf) / 15.0;
            out.push_back({r, v, vp});
        }
        const double fac = std::clamp(0.9 * std::pow(sc / std::max(err, 1e-300), 0.2), 0.3, 4.0);
        h *= fac;
        if (h < (r1 - r0) * 1e-14) throw NumericError("radial Green integration stalled");
    }
}

}  // namespace

double GreenField::RadialData::eval_v(double rr) const {
    if (rr <= r.front()) return v.front() + vp.front() * (rr - r.front());
    if (rr >= r.back()) return v.back();
    auto it = std::upper_bound(r.begin(), r.end(), rr);
    const std::size_t i1 = static_cast<std::size_t>(it - r.begin());
    const std::size_t i0 = i1 - 1;
    const double dt = r[i1] - r[i0];
    const double t = (rr - r[i0]) / dt;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * v[i0] + dt * h10 * vp[i0] + h01 * v[i1] + dt * h11 * vp[i1];
}

double GreenField::RadialData::eval_vp(double rr) const {
    if (rr <= r.front()) return vp.front();
    if (rr >= r.back()) return vp.back();
    auto it = std::upper_bound(r.begin(), r.end(), rr);
    const std::size_t i1 = static_cast<std::size_t>(it - r.begin());
    const std::size_t i0 = i1 - 1;
    const double dt = r[i1] - r[i0];
    const double t = (rr - r[i0]) / dt;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    const double a0 = h.value_radial(r[i0]) * v[i0];
    const double a1 = h.value_radial(r[i1]) * v[i1];
    return h00 * vp[i0] + dt * h10 * a0 + h01 * vp[i1] + dt * h11 * a1;
}

// ============================================================================
// GreenField
// ============================================================================

GreenField::GreenField(Vec3 source, GreenNorm n, Domain domain, CoefficientH h, Path path,
                       std::shared_ptr<const RadialData> radial,
                       std::optional<ScalarField3D> correction)
    : source_(source),
      normalization_(n),
      domain_(std::move(domain)),
      h_(std::move(h)),
      path_(path),
      radial_(std::move(radial)),
      correction_(std::move(correction)) {}

double GreenField::value_radial(double r) const {
    if (path_ != Path::Radial && path_ != Path::ClosedForm)
        throw NumericError("GreenField: radial access on a 3D path");
    double scaled;
    if (path_ == Path::ClosedForm) {
        scaled = 1.0 / r - 1.0 / domain_.ball_radius();
    } else {
        scaled = radial_->eval_v(r) / r;
    }
    return normalization_ == GreenNorm::Scaled ? scaled : scaled / kOmega2;
}

double GreenField::derivative_radial(double r) const {
    if (path_ != Path::Radial && path_ != Path::ClosedForm)
        throw NumericError("GreenField: radial access on a 3D path");
    double scaled;
    if (path_ == Path::ClosedForm) {
        scaled = -1.0 / (r * r);
    } else {
        const double v = radial_->eval_v(r);
        const double vp = radial_->eval_vp(r);
        scaled = vp / r - v / (r * r);
    }
    return normalization_ == GreenNorm::Scaled ? scaled : scaled / kOmega2;
}

double GreenField::second_derivative_radial(double r) const {
    if (path_ != Path::Radial && path_ != Path::ClosedForm)
        throw NumericError("GreenField: radial access on a 3D path");
    double scaled;
    if (path_ == Path::ClosedForm) {
        scaled = 2.0 / (r * r * r);
    } else {
        const double v = radial_->eval_v(r);
        const double vp = radial_->eval_vp(r);
        const double vpp = h_.value_radial(r) * v;
        scaled = vpp / r - 2.0 * vp / (r * r) + 2.0 * v / (r * r * r);
    }
    return normalization_ == GreenNorm::Scaled ? scaled : scaled / kOmega2;
}

double GreenField::radial_mass() const {
    double scaled;
    if (path_ == Path::ClosedForm) {
        scaled = -1.0 / domain_.ball_radius();
    } else if (path_ == Path::Radial) {
        scaled = radial_->mass;
    } else {
        throw NumericError("GreenField: radial_mass on a 3D path");
    }
    return normalization_ == GreenNorm::Scaled ? scaled : scaled / kOmega2;
}

double GreenField::value(const Vec3& y) const {
    double scaled = 0.0;
    switch (path_) {
        case Path::Radial: {
            const double r = norm(y - source_);
            scaled = radial_->eval_v(r) / r;
            break;
        }
        case Path::ClosedForm:
            scaled = laplace_green_ball(source_, y, domain_.ball_radius());
            break;
        case Path::Images3D:
            scaled = laplace_green_ball(source_, y, domain_.ball_radius()) + correction_->eval(y);
            break;
        case Path::FreeSpace3D:
            scaled = 1.0 / norm(y - source_) + correction_->eval(y);
            break;
    }
    return normalization_ == GreenNorm::Scaled ? scaled : scaled / kOmega2;
}

Vec3 GreenField::gradient(const Vec3& y) const {
    Vec3 scaled{};
    switch (path_) {
        case Path::Radial: {
            const Vec3 d = y - source_;
            const double r = norm(d);
            const double v = radial_->eval_v(r);
            const double vp = radial_->eval_vp(r);
            scaled = d * ((vp / r - v / (r * r)) / r);
            break;
        }
        case Path::ClosedForm:
            scaled = laplace_green_ball_grad(source_, y, domain_.ball_radius());
            break;
        case Path::Images3D:
            scaled = laplace_green_ball_grad(source_, y, domain_.ball_radius()) +
                     correction_->grad_fd(y);
            break;
        case Path::FreeSpace3D: {
            const Vec3 d = y - source_;
            const double r = norm(d);
            scaled = d * (-1.0 / (r * r * r)) + correction_->grad_fd(y);
            break;
        }
    }
    return normalization_ == GreenNorm::Scaled ? scaled : scaled / kOmega2;
}

double GreenField::laplacian(const Vec3& y) const { return -h_.value(y) * value(y); }

// ============================================================================
// solve_green
// ============================================================================

GreenField solve_green(const CoefficientH& h, const Vec3& source, const Domain& domain,
                       const GreenOptions& opts) {
    using Mode = GreenOptions::Mode;
    if (!domain.contains(source)) throw GeometryError("solve_green: source is not interior");

    const bool h_zero = h.is_constant() && h.value({0, 0, 0}) == 0.0;
    Mode mode = opts.mode;
    if (mode == Mode::Auto) {
        if (h_zero && domain.is_ball()) {
            mode = Mode::ClosedForm;
        } else if (h.is_radial() && domain.is_ball() && norm(source) < 1e-14) {
            mode = Mode::Radial;
        } else if (domain.is_ball()) {
            mode = Mode::Images3D;
        } else {
            mode = Mode::FreeSpace3D;
        }
    }

    if (mode == Mode::ClosedForm) {
        if (!domain.is_ball() || !h_zero)
            throw NumericError("solve_green: closed form requires h = 0 on a ball");
        return GreenField(source, opts.normalization, domain, h, GreenField::Path::ClosedForm,
                          nullptr, std::nullopt);
    }

    if (mode == Mode::Radial) {
        if (!h.is_radial() || !domain.is_ball() || norm(source) > 1e-14)
            throw NumericError("solve_green: radial path requires radial h and source 0");
        if (!opts.assume_coercive) {
            const CoercivityReport rep = coercivity_check(h, domain);
            if (!rep.coercive)
                throw IndefiniteSystemError("solve_green: operator is not coercive");
        }
        const double R = domain.ball_radius();
        auto hr = [&h](double r) { return h.value_radial(r); };
        std::vector<Sample> v1, v2;
        rk45_linear(hr, 0.0, R, 1.0, 0.0, v1);
        rk45_linear(hr, 0.0, R, 0.0, 1.0, v2);
        const double denom = v2.back().v;
        if (std::abs(denom) < 1e-13)
            throw IndefiniteSystemError("solve_green: radial operator is singular");
        const double c = -v1.back().v / denom;
        auto data = std::make_shared<GreenField::RadialData>();
        std::vector<Sample> tr;
        rk45_linear(hr, 0.0, R, 1.0, c, tr);
        data->r.reserve(tr.size());
        for (const auto& s : tr) {
            data->r.push_back(s.r);
            data->v.push_back(s.v);
            data->vp.push_back(s.vp);
        }
        data->mass = c;
        data->h = h;
        for (const auto& s : tr)
            if (s.r < R * (1.0 - 1e-9) && s.v <= 0.0)
                throw NumericError("solve_green: Green function lost positivity (not coercive?)");
        return GreenField(source, opts.normalization, domain, h, GreenField::Path::Radial,
                          std::move(data), std::nullopt);
    }

    // 3D paths.
    if (domain.distance_to_boundary(source) < 2.0 * opts.spacing)
        throw GeometryError("solve_green: source closer than two grid spacings to the boundary");
    auto grid = Grid3D::cover(domain, opts.spacing);

    const bool images = (mode == Mode::Images3D);
    if (images && !domain.is_ball())
        throw NumericError("solve_green: images decomposition requires a ball");

    const double R = domain.ball_radius();
    const double clamp_dist = 0.4 * opts.spacing;
    auto singular_part = [&](const Vec3& y) {
        Vec3 d = y - source;
        double r = norm(d);
        if (r < clamp_dist) {
            // Pull the evaluation off the source node; the cell-local error
            // is below the scheme's resolution floor anyway.
            d = r == 0.0 ? Vec3{clamp_dist, 0, 0} : d * (clamp_dist / r);
            r = clamp_dist;
        }
        const Vec3 yy = source + d;
        return images ? laplace_green_ball(source, yy, R) : 1.0 / r;
    };

    ScalarField3D rhs = ScalarField3D::zeros(grid);
    {
        const Grid3D& g = *grid;
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const std::size_t idx = g.index(i, j, k);
                    if (g.node_kind[idx] != 1) continue;
                    const Vec3 p = g.point(i, j, k);
                    rhs.values[idx] = -h.value(p) * singular_part(p);
                }
    }

    SolveOptions so;
    so.tol = opts.solver_tol;
    if (!images)
        so.boundary_data = [&](const Vec3& y) {
            // Snap to the radially projected boundary point; the data there
            // equals the true correction, so the mismatch is one order down.
            const Vec3 p = domain.is_ball() ? y * (R / norm(y)) : y;
            return -1.0 / norm(p - source);
        };
    ScalarField3D correction = solve_dirichlet(h, rhs, domain, so);

    return GreenField(source, opts.normalization, domain, h,
                      images ? GreenField::Path::Images3D : GreenField::Path::FreeSpace3D, nullptr,
                      std::move(correction));
}

// ============================================================================
// Expansion extraction: fit G(x, x+z) - 1/|z| - h(x)|z|/2 ~ c0 + c.z + q|z|^2
// ============================================================================

GreenExpansion extract_expansion(const GreenField& g, const CoefficientH& h,
                                 const ExpansionFitOptions& opts) {
    const Vec3 x = g.source();
    const double dist = g.domain().distance_to_boundary(x);
    const double r0 = opts.r0_fraction * dist;
    if (r0 <= 0.0) throw GeometryError("extract_expansion: source has no interior margin");

    const SphereRule rule = SphereRule::product(opts.n_theta, opts.n_phi);
    const int rows_per_shell = static_cast<int>(rule.dirs.size());
    const int rows = rows_per_shell * opts.shells;

    Eigen::MatrixXd A(rows, 5);
    Eigen::VectorXd b(rows);
    const double hx = h.value(x);
    int row = 0;
    for (int k = 0; k < opts.shells; ++k) {
        const double rk = r0 * std::pow(2.0, -k);
        for (int d = 0; d < rows_per_shell; ++d, ++row) {
            const Vec3 z = rule.dirs[d] * rk;
            double val = g.value(x + z);
            if (g.normalization() == GreenNorm::Unit) val *= kOmega2;  // fit in the scaled frame
            val -= 1.0 / rk + 0.5 * hx * rk;
            A(row, 0) = 1.0;
            A(row, 1) = z.x;
            A(row, 2) = z.y;
            A(row, 3) = z.z;
            A(row, 4) = rk * rk;
            b(row) = val;
        }
    }
    const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
    const Eigen::VectorXd resid = A * sol - b;
    const double rms = std::sqrt(resid.squaredNorm() / rows);

    GreenExpansion e;
    e.source = x;
    e.mass = sol(0);
    e.grad_regular = {sol(1), sol(2), sol(3)};
    e.h_at_source = hx;
    e.normalization = GreenNorm::Scaled;
    e.fit_residual = rms / (std::abs(sol(0)) + 1e-12);
    if (e.fit_residual > opts.residual_tol)
        throw NumericError("extract_expansion: fit residual above tolerance (grid too coarse)");
    return convert(e, g.normalization());
}

MassScanResult mass_sign_scan(const CoefficientH& h, const Domain& domain,
                              const std::vector<Vec3>& points, const GreenOptions& opts) {
    MassScanResult out;
    out.samples.reserve(points.size());
    double most_negative = std::numeric_limits<double>::max();
    for (const Vec3& p : points) {
        GreenOptions go = opts;
        go.normalization = GreenNorm::Scaled;
        const GreenField gf = solve_green(h, p, domain, go);
        const GreenExpansion e = extract_expansion(gf, h);
        out.samples.push_back({p, e.mass});
        if (e.mass < most_negative) {
            most_negative = e.mass;
            out.most_negative_index = static_cast<int>(out.samples.size()) - 1;
        }
    }
    return out;
}

}  // namespace poholab
