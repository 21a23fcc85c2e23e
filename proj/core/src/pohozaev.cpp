#include "poholab/pohozaev.hpp"

#include <algorithm>
#include <cmath>

#include "poholab/errors.hpp"

namespace poholab {

namespace {

double residual_of(double lhs, double rhs, double scale_lhs, double scale_rhs, double floor) {
    return std::abs(lhs - rhs) / (scale_lhs + scale_rhs + floor);
}

/// Gradient of u at a boundary point: one-sided second-order normal
/// derivative (the boundary terms dominate P1/P3 accuracy) plus the
/// tangential part of the interior gradient.
Vec3 boundary_gradient(const FieldView& u, const Vec3& b, const Vec3& nu, double s) {
    const double u0 = u.value(b);
    const double u1 = u.value(b - nu * s);
    const double u2 = u.value(b - nu * (2.0 * s));
    const double dn = (3.0 * u0 - 4.0 * u1 + u2) / (2.0 * s);
    const Vec3 g_in = u.gradient(b - nu * s);
    const Vec3 tang = g_in - nu * dot(g_in, nu);
    return tang + nu * dn;
}

double max_abs_radial(const ScalarFieldRadial& u) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::abs(v));
    if (u.origin_value) m = std::max(m, std::abs(*u.origin_value));
    return m;
}

}  // namespace

// ============================================================================
// Structural condition h + <x, grad h>/2 >= 0
// ============================================================================

StructuralCertificate check_structural_condition(const CoefficientH& h, const Domain& domain,
                                                 double tolerance, int n_radial,
                                                 const SphereRule& rule) {
    StructuralCertificate cert;
    cert.gradient_from_fd = h.gradient_is_fd();
    cert.min_value = std::numeric_limits<double>::max();

    if (h.is_radial() && domain.is_ball()) {
        const double R = domain.ball_radius();
        for (int i = 0; i <= n_radial; ++i) {
            const double r = R * i / n_radial;
            const double v = h.value_radial(r) + 0.5 * r * h.radial_derivative(r);
            if (v < cert.min_value) {
                cert.min_value = v;
                cert.argmin = {r, 0, 0};
            }
        }
    } else {
        for (const Vec3& w : rule.dirs) {
            const double R = domain.boundary_radius(w);
            for (int i = 0; i <= n_radial; ++i) {
                const Vec3 x = w * (R * i / n_radial);
                const double v = h.value(x) + 0.5 * dot(x, h.gradient(x));
                if (v < cert.min_value) {
                    cert.min_value = v;
                    cert.argmin = x;
                }
            }
        }
    }
    cert.satisfied = cert.min_value >= -tolerance;
    return cert;
}

// ============================================================================
// Radial paths (ball): the surface terms are exact in u(R), u'(R).
// ============================================================================

namespace {

struct RadialPieces {
    double volume_P1 = 0.0;  // 1/2 int (h u^2 + h <x, grad u^2>)
    double volume_P3 = 0.0;  // int (h + <x, grad h>/2) u^2
    double scale_P1 = 0.0;   // integral of |P1 integrand|
    double scale_P3 = 0.0;
    double uR = 0.0, duR = 0.0;
};

RadialPieces radial_pieces(const ScalarFieldRadial& u, const CoefficientH& h, double R, int n) {
    RadialPieces p;
    std::vector<double> xs(n), y1(n), y3(n), a1(n), a3(n);
    for (int i = 0; i < n; ++i) {
        const double r = R * (i + 1.0) / n;
        const double uv = u.eval(r);
        const double du = u.deriv(r);
        const double hv = h.value_radial(r);
        const double dh = h.radial_derivative(r);
        const double w = kOmega2 * r * r;
        xs[i] = r;
        y1[i] = 0.5 * (hv * uv * uv + hv * r * 2.0 * uv * du) * w;
        y3[i] = (hv + 0.5 * r * dh) * uv * uv * w;
        a1[i] = std::abs(y1[i]);
        a3[i] = std::abs(y3[i]);
    }
    p.volume_P1 = integrate_nonuniform(xs, y1) + y1.front() * xs.front() / 3.0;
    p.volume_P3 = integrate_nonuniform(xs, y3) + y3.front() * xs.front() / 3.0;
    p.scale_P1 = integrate_nonuniform(xs, a1) + a1.front() * xs.front() / 3.0;
    p.scale_P3 = integrate_nonuniform(xs, a3) + a3.front() * xs.front() / 3.0;
    p.uR = u.eval(R);
    p.duR = u.deriv(R);
    return p;
}

}  // namespace

PohozaevReport evaluate_identity_P1(const ScalarFieldRadial& u, const CoefficientH& h,
                                    const Domain& domain, const PohozaevOptions& opts) {
    if (!domain.is_ball()) throw GeometryError("P1 radial path needs a ball domain");
    const double R = domain.ball_radius();
    const RadialPieces p = radial_pieces(u, h, R, opts.radial_quadrature_nodes);
    const double area = kOmega2 * R * R;

    PohozaevReport rep;
    rep.identity_id = "P1";
    rep.volume_term = p.volume_P1;
    // grad u = u'(R) nu on the sphere: <x,grad u> d_nu u = R u'(R)^2.
    rep.boundary_B1 = area * (R * p.duR * p.duR / 2.0 + p.uR * p.duR / 2.0);
    rep.boundary_B2 = area * R * std::pow(p.uR, 6) / 6.0;
    rep.lhs = rep.volume_term;
    rep.rhs = rep.boundary_B1 + rep.boundary_B2;
    rep.identity_residual =
        residual_of(rep.lhs, rep.rhs, p.scale_P1,
                    std::abs(rep.boundary_B1) + std::abs(rep.boundary_B2), opts.residual_floor);
    return rep;
}

PohozaevReport evaluate_identity_P3(const ScalarFieldRadial& u, const CoefficientH& h,
                                    const Domain& domain, const PohozaevOptions& opts) {
    if (!domain.is_ball()) throw GeometryError("P3 radial path needs a ball domain");
    const double R = domain.ball_radius();
    const RadialPieces p = radial_pieces(u, h, R, opts.radial_quadrature_nodes);

    const double scale = max_abs_radial(u);
    if (std::abs(p.uR) > opts.boundary_trace_tol * std::max(scale, 1.0))
        throw NumericError("P3: boundary trace of u above tolerance");

    PohozaevReport rep;
    rep.identity_id = "P3";
    rep.volume_term = p.volume_P3;
    rep.boundary_B1 = -0.5 * kOmega2 * R * R * R * p.duR * p.duR;  // -1/2 oint <x,nu>(d_nu u)^2
    rep.boundary_B2 = 0.0;
    rep.lhs = rep.volume_term;
    rep.rhs = rep.boundary_B1;
    rep.identity_residual = residual_of(rep.lhs, rep.rhs, p.scale_P3, std::abs(rep.boundary_B1),
                                        opts.residual_floor);
    const double tiny = opts.residual_floor * std::max(1.0, scale);
    rep.obstruction_contradiction = rep.lhs > tiny && rep.rhs <= tiny;
    if (rep.obstruction_contradiction) rep.contradiction_margin = rep.lhs - rep.rhs;
    return rep;
}

// ============================================================================
// View paths (general fields)
// ============================================================================

namespace {

struct SurfacePieces {
    double B1 = 0.0;
    double B2 = 0.0;
    double flux = 0.0;       // oint <x,nu>(d_nu u)^2
    double B_scale = 0.0;    // magnitude scale of the boundary integrands
    double trace_max = 0.0;  // max |u| over the sampled boundary
};

SurfacePieces surface_pieces(const FieldView& u, const Domain& domain,
                             const PohozaevOptions& opts) {
    SurfacePieces s;
    const double step = opts.normal_step > 0.0 ? opts.normal_step : 1e-3;
    double trace = 0.0;
    s.B1 = surface_integral(
        [&](const Vec3& b, const Vec3& nu) {
            const Vec3 g = boundary_gradient(u, b, nu, step);
            const double un = dot(g, nu);
            const double uv = u.value(b);
            trace = std::max(trace, std::abs(uv));
            return dot(b, g) * un + 0.5 * uv * un - dot(b, nu) * norm2(g) / 2.0;
        },
        domain, *opts.rule);
    s.B2 = surface_integral(
        [&](const Vec3& b, const Vec3& nu) { return dot(b, nu) * std::pow(u.value(b), 6) / 6.0; },
        domain, *opts.rule);
    s.flux = surface_integral(
        [&](const Vec3& b, const Vec3& nu) {
            const Vec3 g = boundary_gradient(u, b, nu, step);
            const double un = dot(g, nu);
            return dot(b, nu) * un * un;
        },
        domain, *opts.rule);
    s.B_scale = surface_integral(
        [&](const Vec3& b, const Vec3& nu) {
            const Vec3 g = boundary_gradient(u, b, nu, step);
            const double un = dot(g, nu);
            const double uv = u.value(b);
            return std::abs(dot(b, g) * un) + std::abs(0.5 * uv * un) +
                   std::abs(dot(b, nu)) * norm2(g) / 2.0 +
                   std::abs(dot(b, nu)) * std::pow(uv, 6) / 6.0;
        },
        domain, *opts.rule);
    s.trace_max = trace;
    return s;
}

double volume_P1_view(const FieldView& u, const CoefficientH& h, const Domain& domain,
                      const PohozaevOptions& opts, double& scale_out) {
    FieldView integrand{[&](const Vec3& x) {
                            const double uv = u.value(x);
                            const Vec3 g = u.gradient(x);
                            return 0.5 * h.value(x) * (uv * uv + 2.0 * uv * dot(x, g));
                        },
                        nullptr};
    FieldView mag{[&](const Vec3& x) {
                      const double uv = u.value(x);
                      const Vec3 g = u.gradient(x);
                      return std::abs(0.5 * h.value(x)) *
                             (uv * uv + 2.0 * std::abs(uv * dot(x, g)));
                  },
                  nullptr};
    scale_out = volume_integral(mag, domain, opts.volume_radial_points, *opts.rule);
    return volume_integral(integrand, domain, opts.volume_radial_points, *opts.rule);
}

}  // namespace

PohozaevReport evaluate_identity_P1(const FieldView& u, const CoefficientH& h,
                                    const Domain& domain, const PohozaevOptions& opts) {
    PohozaevReport rep;
    rep.identity_id = "P1";
    double vol_scale = 0.0;
    rep.volume_term = volume_P1_view(u, h, domain, opts, vol_scale);
    const SurfacePieces s = surface_pieces(u, domain, opts);
    rep.boundary_B1 = s.B1;
    rep.boundary_B2 = s.B2;
    rep.lhs = rep.volume_term;
    rep.rhs = s.B1 + s.B2;
    rep.identity_residual = residual_of(rep.lhs, rep.rhs, vol_scale, s.B_scale,
                                        opts.residual_floor);
    return rep;
}

PohozaevReport evaluate_identity_P2(const FieldView& u, const CoefficientH& h,
                                    const Domain& domain, const PohozaevOptions& opts) {
    PohozaevReport rep;
    rep.identity_id = "P2";
    double vol_scale = 0.0;
    rep.volume_term = volume_P1_view(u, h, domain, opts, vol_scale);
    const SurfacePieces s = surface_pieces(u, domain, opts);
    if (s.trace_max > opts.boundary_trace_tol)
        throw NumericError("P2: boundary trace of u above tolerance");
    rep.boundary_B1 = 0.5 * s.flux;
    rep.boundary_B2 = 0.0;
    rep.lhs = rep.volume_term;
    rep.rhs = rep.boundary_B1;
    rep.identity_residual = residual_of(rep.lhs, rep.rhs, vol_scale, std::abs(rep.boundary_B1),
                                        opts.residual_floor);
    return rep;
}

PohozaevReport evaluate_identity_P3(const FieldView& u, const CoefficientH& h,
                                    const Domain& domain, const PohozaevOptions& opts) {
    PohozaevReport rep;
    rep.identity_id = "P3";
    FieldView integrand{[&](const Vec3& x) {
                            const double uv = u.value(x);
                            return (h.value(x) + 0.5 * dot(x, h.gradient(x))) * uv * uv;
                        },
                        nullptr};
    FieldView mag{[&](const Vec3& x) {
                      const double uv = u.value(x);
                      return std::abs(h.value(x) + 0.5 * dot(x, h.gradient(x))) * uv * uv;
                  },
                  nullptr};
    rep.volume_term = volume_integral(integrand, domain, opts.volume_radial_points, *opts.rule);
    const double vol_scale =
        volume_integral(mag, domain, opts.volume_radial_points, *opts.rule);
    const SurfacePieces s = surface_pieces(u, domain, opts);
    if (s.trace_max > opts.boundary_trace_tol)
        throw NumericError("P3: boundary trace of u above tolerance");
    rep.boundary_B1 = -0.5 * s.flux;
    rep.lhs = rep.volume_term;
    rep.rhs = rep.boundary_B1;
    rep.identity_residual = residual_of(rep.lhs, rep.rhs, vol_scale, std::abs(rep.boundary_B1),
                                        opts.residual_floor);
    rep.obstruction_contradiction =
        rep.lhs > opts.residual_floor && rep.rhs <= opts.residual_floor;
    if (rep.obstruction_contradiction) rep.contradiction_margin = rep.lhs - rep.rhs;
    return rep;
}

PohozaevReportVec evaluate_identity_P4(const FieldView& u, const CoefficientH& h,
                                       const Domain& domain, const PohozaevOptions& opts) {
    PohozaevReportVec rep;
    rep.identity_id = "P4";
    const double step = opts.normal_step > 0.0 ? opts.normal_step : 1e-3;

    for (int comp = 0; comp < 3; ++comp) {
        rep.lhs[comp] = surface_integral(
            [&](const Vec3& b, const Vec3& nu) {
                const Vec3 g = boundary_gradient(u, b, nu, step);
                const double un = dot(g, nu);
                const double u6 = std::pow(u.value(b), 6);
                return un * g[comp] - 0.5 * norm2(g) * nu[comp] + u6 / 6.0 * nu[comp];
            },
            domain, *opts.rule);
        FieldView integrand{[&, comp](const Vec3& x) {
                                return h.value(x) * u.value(x) * u.gradient(x)[comp];
                            },
                            nullptr};
        rep.rhs[comp] = volume_integral(integrand, domain, opts.volume_radial_points, *opts.rule);
    }
    const double lhs_scale = surface_integral(
        [&](const Vec3& b, const Vec3& nu) {
            (void)nu;
            const Vec3 g = boundary_gradient(u, b, nu, step);
            return std::abs(dot(g, nu)) * norm(g) + 0.5 * norm2(g) + std::pow(u.value(b), 6) / 6.0;
        },
        domain, *opts.rule);
    FieldView rhs_mag{
        [&](const Vec3& x) { return std::abs(h.value(x) * u.value(x)) * norm(u.gradient(x)); },
        nullptr};
    const double rhs_scale =
        volume_integral(rhs_mag, domain, opts.volume_radial_points, *opts.rule);

    double worst = 0.0;
    for (int comp = 0; comp < 3; ++comp)
        worst = std::max(worst, std::abs(rep.lhs[comp] - rep.rhs[comp]));
    rep.identity_residual = worst / (lhs_scale + rhs_scale + opts.residual_floor);
    return rep;
}

// ============================================================================
// Green-function Pohozaev sum (Unit normalization)
// ============================================================================

double green_pohozaev_sum(const BubbleConfiguration& config,
                          const std::vector<GreenExpansion>& expansions,
                          const std::vector<GreenField>& fields) {
    const std::size_t n = config.points.size();
    if (config.weights.size() != n || expansions.size() != n || fields.size() != n)
        throw NumericError("green_pohozaev_sum: configuration sizes disagree");
    for (double l : config.weights)
        if (l <= 0.0) throw NumericError("green_pohozaev_sum: weights must be positive");
    for (const auto& e : expansions)
        if (e.normalization != GreenNorm::Unit)
            throw NormalizationError("green_pohozaev_sum: expansions must be Unit-normalized");

    auto unit_value = [&](std::size_t j, const Vec3& y) {
        const double v = fields[j].value(y);
        return fields[j].normalization() == GreenNorm::Unit ? v : v / kOmega2;
    };
    auto unit_gradient = [&](std::size_t j, const Vec3& y) {
        const Vec3 g = fields[j].gradient(y);
        return fields[j].normalization() == GreenNorm::Unit ? g : g / kOmega2;
    };

    // m_i and gamma_i are the expansion data of the full sum at x_i: the own
    // term contributes lambda_i (mass, grad); every other source is smooth
    // there and contributes its value/gradient directly.
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 xi = config.points[i];
        double m_i = config.weights[i] * expansions[i].mass;
        Vec3 grad_i = expansions[i].grad_regular * config.weights[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            m_i += config.weights[j] * unit_value(j, xi);
            grad_i += unit_gradient(j, xi) * config.weights[j];
        }
        total += config.weights[i] * (m_i + 2.0 * dot(xi, grad_i));
    }
    return total;
}

}  // namespace poholab
