#include "poholab/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "poholab/errors.hpp"

namespace poholab {

// ============================================================================
// Profiles
// ============================================================================

namespace profiles {

namespace {

/// Evaluate f on the local variable at r.v, then compose with r.
template <typename F>
Jet1 via_variable(F&& f, const Jet1& r) {
    const Jet1 w = f(Jet1::variable(r.v));
    return compose(w.v, w.d, w.dd, r);
}

}  // namespace

Jet1 bubble_profile(const Jet1& r) {
    return via_variable(
        [](const Jet1& t) { return t * pow(1.0 + t * t, -0.5); }, r);
}

Jet1 corrector_profile(const Jet1& r) {
    return via_variable(
        [](const Jet1& t) { return 1.0 - pow(1.0 + t * t, -1.5); }, r);
}

Jet1 log_interpolant(const Jet1& r, double eps) {
    const double denom = std::log(eps * eps);
    return via_variable(
        [denom](const Jet1& t) {
            // log1p(t^-2) keeps the large-t branch exact.
            const Jet1 u = pow_int(t, -2);
            const Jet1 l = compose(std::log1p(u.v), 1.0 / (1.0 + u.v),
                                   -1.0 / ((1.0 + u.v) * (1.0 + u.v)), u);
            return 1.0 + l * (1.0 / denom);
        },
        r);
}

Jet1 flat_correction_profile(const Jet1& r, double small_switch, double large_switch) {
    const double t = r.v;
    if (t < small_switch) {
        // W = -pi - (5/4) t - 8 t ln t + O(t^2 ln t).
        const double lt = std::log(t);
        const double w = -kPi - 1.25 * t - 8.0 * t * lt;
        const double wp = -1.25 - 8.0 * (lt + 1.0);
        const double wpp = -8.0 / t;
        return compose(w, wp, wpp, r);
    }
    if (t > large_switch) {
        // W = -21/4 + (319/24) t^-2 + O(t^-4).
        const double s = 1.0 / (t * t);
        const double w = -5.25 + (319.0 / 24.0) * s;
        const double wp = -(319.0 / 12.0) * s / t;
        const double wpp = (319.0 / 4.0) * s * s;
        return compose(w, wp, wpp, r);
    }
    return via_variable(
        [](const Jet1& tt) {
            const Jet1 U = tt * pow(1.0 + tt * tt, -0.5);
            const Jet1 lnU = log(U);
            const Jet1 atan_inv = atan(inv(tt));
            return (-13.0 / 4.0) * U + 8.0 * (2.0 * pow_int(U, 3) - U) * lnU -
                   2.0 * (inv(U) - 8.0 * U + 8.0 * pow_int(U, 3)) * tt * atan_inv;
        },
        r);
}

Jet1 bump(const Jet1& r, double inner, double outer) {
    if (r.v <= inner) return Jet1::constant(1.0);
    if (r.v >= outer) return Jet1::constant(0.0);
    const double w = outer - inner;
    return via_variable(
        [inner, w](const Jet1& t) {
            const Jet1 s = (t - inner) * (1.0 / w);
            // Quintic smoothstep complement: C^2 at both junctions.
            return 1.0 - (10.0 * pow_int(s, 3) - 15.0 * pow_int(s, 4) + 6.0 * pow_int(s, 5));
        },
        r);
}

}  // namespace profiles

// ============================================================================
// Radial family
// ============================================================================

RadialFamilyParams make_radial_family_params(const CoefficientH& h, const Domain& ball,
                                             double eps, const GreenOptions& green_opts) {
    if (!ball.is_ball()) throw ConstructionError("radial family: domain must be a ball");
    if (eps >= 0.1 || eps <= 0.0)
        throw ConstructionError("radial family: requires 0 < eps < 0.1");
    GreenOptions go = green_opts;
    go.normalization = GreenNorm::Scaled;
    GreenField g = solve_green(h, {0, 0, 0}, ball, go);
    const double mass = g.radial_mass();
    return RadialFamilyParams{eps, mass, std::move(g), 0.25, 0.5};
}

RadialFamily::RadialFamily(RadialFamilyParams params) : params_(std::move(params)) {
    if (params_.green.normalization() != GreenNorm::Scaled)
        throw NormalizationError("RadialFamily: Green data must be in the scaled normalization");
}

Jet1 RadialFamily::green_jet(double r) const {
    return {params_.green.value_radial(r), params_.green.derivative_radial(r),
            params_.green.second_derivative_radial(r)};
}

Jet1 RadialFamily::eval_jet(double r) const {
    const double eps = params_.eps;
    const Jet1 rj = Jet1::variable(r);
    const Jet1 G = green_jet(r);
    const Jet1 t = G * eps;

    // U_eps = eps^{-1/2} U(eps G); V_eps = -mass eps^{1/2} (1+t^2)^{-3/2}.
    const Jet1 U_eps = profiles::bubble_profile(t) * (1.0 / std::sqrt(eps));
    const Jet1 V_eps = pow(1.0 + t * t, -1.5) * (-params_.mass * std::sqrt(eps));

    // eta_eps(r) = eta(r) ln(eps^2 + r^2)/ln(eps^2).
    const Jet1 eta = profiles::bump(rj, params_.cutoff_inner, params_.cutoff_outer);
    const Jet1 eta_eps = eta * (log(eps * eps + rj * rj) * (1.0 / std::log(eps * eps)));

    return U_eps + eta_eps * V_eps;
}

double RadialFamily::laplacian(double r) const { return radial_laplacian(eval_jet(r), r); }

double RadialFamily::value_at_origin() const { return 1.0 / std::sqrt(params_.eps); }

ScalarFieldRadial RadialFamily::sample(const RadialGrid& grid) const {
    ScalarFieldRadial f;
    f.grid = grid;
    f.values.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        f.values[i] = value(grid.nodes[i]);
        if (f.values[i] <= 0.0 && grid.nodes[i] < grid.outer() * (1.0 - 1e-12)) {
            throw ConstructionError("radial family: positivity fails at r = " +
                                    std::to_string(grid.nodes[i]) + " (eps too large)");
        }
    }
    f.origin_value = value_at_origin();
    return f;
}

// ============================================================================
// Residual potential
// ============================================================================

namespace {

ResidualScanRadial scan_radial(const std::function<double(double)>& value,
                               const std::function<double(double)>& laplacian,
                               std::optional<double> origin_value,
                               const CoefficientH& h_target, const RadialGrid& grid) {
    ResidualScanRadial out;
    const int n = grid.size();
    std::vector<double> htl(n), diff3(n);
    out.u.grid = grid;
    out.u.values.resize(n);
    out.h_tilde.grid = grid;
    out.h_tilde.values.resize(n);
    out.min_u = std::numeric_limits<double>::max();
    out.linf_norm = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = grid.nodes[i];
        const double uv = value(r);
        out.u.values[i] = uv;
        out.min_u = std::min(out.min_u, uv);
        if (uv <= 0.0)
            throw NumericError("residual_potential: u is not positive on the evaluation set");
        const double lap = laplacian(r);
        const double ht = (3.0 * std::pow(uv, 5) - lap) / uv;
        out.h_tilde.values[i] = ht;
        const double d = ht - h_target.value_radial(r);
        out.linf_norm = std::max(out.linf_norm, std::abs(d));
        diff3[i] = kOmega2 * r * r * std::abs(d) * std::abs(d) * std::abs(d);
    }
    out.l3_norm = std::cbrt(integrate_nonuniform(grid.nodes, diff3) +
                            diff3.front() * grid.nodes.front() / 3.0);
    out.u.origin_value = origin_value;
    out.u_rescaled = out.u;
    const double k = std::pow(3.0, 0.25);
    for (double& v : out.u_rescaled.values) v *= k;
    if (out.u_rescaled.origin_value) *out.u_rescaled.origin_value *= k;
    return out;
}

}  // namespace

ResidualScanRadial residual_potential(const RadialFamily& u, const CoefficientH& h_target,
                                      const RadialGrid& eval_grid) {
    return scan_radial([&u](double r) { return u.value(r); },
                       [&u](double r) { return u.laplacian(r); }, u.value_at_origin(), h_target,
                       eval_grid);
}

ResidualScanRadial residual_potential(const ScalarFieldRadial& u, const CoefficientH& h_target) {
    const ScalarFieldRadial lap = apply_laplacian(u);
    return scan_radial([&u](double r) { return u.eval(r); },
                       [&lap](double r) { return lap.eval(r); }, u.origin_value, h_target,
                       u.grid);
}

// ============================================================================
// Balancing configuration
// ============================================================================

namespace {

/// Scaled mass gamma_x(x) at an arbitrary interior point.
double mass_at(const CoefficientH& h, const Domain& domain, const Vec3& x,
               const GreenOptions& go, const ExpansionFitOptions& fit) {
    if (h.is_constant() && h.value({0, 0, 0}) == 0.0 && domain.is_ball())
        return laplace_green_ball_mass(x, domain.ball_radius());
    GreenOptions opts = go;
    opts.normalization = GreenNorm::Scaled;
    const GreenField g = solve_green(h, x, domain, opts);
    return extract_expansion(g, h, fit).mass;
}

}  // namespace

TwoBubbleParams balance_configuration(const CoefficientH& h, const Domain& domain,
                                      const BalanceOptions& opts) {
    const bool closed_form = h.is_constant() && h.value({0, 0, 0}) == 0.0 && domain.is_ball();

    // x1: explicit override, or the most negative mass among the scan points.
    Vec3 x1;
    if (opts.x1_override) {
        x1 = *opts.x1_override;
    } else {
        std::vector<Vec3> pts = opts.scan_points;
        if (pts.empty()) {
            const double R = domain.is_ball() ? domain.ball_radius() : domain.bounding_radius();
            for (double f : {0.0, 0.3, 0.55}) {
                if (f == 0.0) {
                    pts.push_back({0, 0, 0});
                    continue;
                }
                pts.push_back({f * R, 0, 0});
                pts.push_back({-f * R, 0, 0});
                pts.push_back({0, f * R, 0});
                pts.push_back({0, 0, f * R});
            }
        }
        const MassScanResult scan = mass_sign_scan(h, domain, pts, opts.green);
        if (scan.most_negative_index < 0 ||
            scan.samples[scan.most_negative_index].mass >= 0.0)
            throw ConstructionError("balance_configuration: no sample point with negative mass");
        x1 = scan.samples[scan.most_negative_index].point;
    }

    GreenOptions go = opts.green;
    go.normalization = GreenNorm::Scaled;
    const GreenField g1 = solve_green(h, x1, domain, go);
    const GreenExpansion e1 = extract_expansion(g1, h, opts.fit);
    const double m1 = e1.mass;
    if (m1 >= 0.0)
        throw ConstructionError("balance_configuration: gamma_{x1}(x1) is not negative");

    auto F = [&](const Vec3& x) {
        const double G1x = g1.value(x);
        return G1x * G1x - m1 * mass_at(h, domain, x, opts.green, opts.fit);
    };

    std::vector<Vec3> rays = opts.ray_directions;
    if (rays.empty())
        rays = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

    const double margin = closed_form ? 1e-7 : 2.5 * opts.green.spacing;
    for (const Vec3& dir0 : rays) {
        const Vec3 dir = normalized(dir0);
        // Boundary of the ray segment: |x1 + s dir| = rho - margin.
        double s_max = 0.0;
        {
            double lo = 0.0, hi = 2.0 * domain.bounding_radius();
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const Vec3 p = x1 + dir * mid;
                if (domain.contains(p) && domain.distance_to_boundary(p) > margin)
                    lo = mid;
                else
                    hi = mid;
            }
            s_max = lo;
        }
        const double s_min = std::max(1e-4, 1e-3 * s_max);
        // March toward the boundary looking for the sign change of F
        // (F -> +inf at x1, F -> -inf at the boundary).
        const int steps = 24;
        double prev_s = s_min;
        double prev_F = F(x1 + dir * prev_s);
        bool bracketed = false;
        double lo = 0.0, hi = 0.0;
        for (int i = 1; i <= steps; ++i) {
            const double s = s_min * std::pow(s_max / s_min, static_cast<double>(i) / steps);
            const double Fs = F(x1 + dir * s);
            if (prev_F > 0.0 && Fs <= 0.0) {
                lo = prev_s;
                hi = s;
                bracketed = true;
                break;
            }
            prev_s = s;
            prev_F = Fs;
        }
        if (!bracketed) continue;

        for (int it = 0; it < 200 && (hi - lo) > opts.root_tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (F(x1 + dir * mid) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double s_root = 0.5 * (lo + hi);
        const Vec3 x2 = x1 + dir * s_root;

        const GreenField g2 = solve_green(h, x2, domain, go);
        const GreenExpansion e2 = extract_expansion(g2, h, opts.fit);
        const double G12 = g1.value(x2);
        const double lambda = (m1 / G12) * (m1 / G12);
        const double sql = std::sqrt(lambda);

        TwoBubbleParams params{
            x1,
            x2,
            lambda,
            0.0,
            g1,
            g2,
            e1,
            e2,
            g2.gradient(x1),
            g1.gradient(x2),
            std::abs(sql * g2.value(x1) + e1.mass),
            std::abs(G12 + sql * e2.mass),
        };
        const double d1 = domain.distance_to_boundary(x1);
        const double d2 = domain.distance_to_boundary(x2);
        params.delta = opts.delta_fraction * std::min({d1, d2, norm(x2 - x1)});
        return params;
    }
    throw ConstructionError("balance_configuration: no scanned ray brackets a root of F");
}

// ============================================================================
// Two-bubble family
// ============================================================================

TwoBubbleField::TwoBubbleField(TwoBubbleParams params, double eps, const CoefficientH& h)
    : params_(std::move(params)), eps_(eps), h_(h) {
    if (params_.g1.normalization() != GreenNorm::Scaled ||
        params_.g2.normalization() != GreenNorm::Scaled)
        throw NormalizationError("TwoBubbleField: Green data must be scaled");
    if (eps_ <= 0.0) throw ConstructionError("TwoBubbleField: eps must be positive");
}

Jet3 TwoBubbleField::green_jet(const GreenField& g, const Vec3& x) const {
    const double v = g.value(x);
    return {v, g.gradient(x), -h_.value(x) * v};
}

Jet3 TwoBubbleField::eval_jet(const Vec3& x) const {
    const TwoBubbleParams& P = params_;
    const double eps = eps_;
    const double lam = P.lambda;
    const double sql = std::sqrt(lam);
    const double g1m = P.e1.mass;  // gamma_1(x_1)
    const double g2m = P.e2.mass;  // gamma_2(x_2)

    const Jet3 G1 = green_jet(P.g1, x);
    const Jet3 G2 = green_jet(P.g2, x);
    const Jet3 t1 = G1 * eps;
    const Jet3 t2 = G2 * (lam * eps);

    auto prof = [](const Jet1& f, const Jet3& arg) { return compose(f, arg); };
    auto at = [](double v) { return Jet1::variable(v); };

    // Leading bubbles.
    const Jet3 T1 = prof(profiles::bubble_profile(at(t1.v)), t1) * (1.0 / std::sqrt(eps));
    const Jet3 T2 = prof(profiles::bubble_profile(at(t2.v)), t2) * (1.0 / std::sqrt(lam * eps));

    // Cutoffs around each point.
    const Jet3 rho1 = distance_jet(x, P.x1);
    const Jet3 rho2 = distance_jet(x, P.x2);
    const Jet3 eta1 = prof(profiles::bump(at(rho1.v), P.delta, 2.0 * P.delta), rho1);
    const Jet3 eta2 = prof(profiles::bump(at(rho2.v), P.delta, 2.0 * P.delta), rho2);

    // Flat correctors.
    const Jet3 T3 = eta1 * prof(profiles::corrector_profile(at(t1.v)), t1) * (g1m * std::sqrt(eps));
    const Jet3 T4 =
        eta2 * prof(profiles::corrector_profile(at(t2.v)), t2) * (g2m * std::sqrt(lam * eps));

    // Gradient correctors.
    const Jet3 psi1 = prof(profiles::log_interpolant(at(t1.v), eps), t1);
    const Jet3 psi2 = prof(profiles::log_interpolant(at(t2.v), eps), t2);
    const Vec3 d1 = x - P.x1;
    const Vec3 d2 = x - P.x2;
    const Jet3 s1 = prof(pow(1.0 + at(t1.v) * at(t1.v), -1.5), t1);
    const Jet3 s2 = prof(pow(1.0 + at(t2.v) * at(t2.v), -1.5), t2);
    const Vec3 a1 = P.e1.grad_regular;
    const Vec3 b1 = P.grad_g2_at_x1 * sql;
    const Vec3 a2 = P.e2.grad_regular;
    const Vec3 b2 = P.grad_g1_at_x2 * (1.0 / sql);
    const Jet3 lin_a1 = Jet3::linear(dot(d1, a1), a1);
    const Jet3 lin_b1 = Jet3::linear(dot(d1, b1), b1);
    const Jet3 lin_a2 = Jet3::linear(dot(d2, a2), a2);
    const Jet3 lin_b2 = Jet3::linear(dot(d2, b2), b2);
    const Jet3 T5 = -1.0 * (eta1 * psi1 * (s1 * lin_a1 + lin_b1)) * std::sqrt(eps);
    const Jet3 T6 = -1.0 * (eta2 * psi2 * (s2 * lin_a2 + lin_b2)) * std::sqrt(lam * eps);

    // h W and U^5 flat corrections.
    const double h1 = h_.value(P.x1);
    const double h2 = h_.value(P.x2);
    const Jet3 W1 = prof(profiles::flat_correction_profile(at(t1.v)), t1);
    const Jet3 W2 = prof(profiles::flat_correction_profile(at(t2.v)), t2);
    const Jet3 U1 = prof(profiles::bubble_profile(at(t1.v)), t1);
    const Jet3 U2 = prof(profiles::bubble_profile(at(t2.v)), t2);
    const Jet3 T7 = eta1 * psi1 * (W1 * h1 - pow_int(U1, 5) * (1.5 * g1m * g1m)) *
                    std::pow(eps, 1.5);
    const Jet3 T8 = eta2 * psi2 * (W2 * h2 - pow_int(U2, 5) * (1.5 * g2m * g2m)) *
                    std::pow(lam * eps, 1.5);

    return T1 + T2 + T3 + T4 + T5 + T6 + T7 + T8;
}

double TwoBubbleField::leading_terms(const Vec3& x) const {
    const double eps = eps_;
    const double lam = params_.lambda;
    const double t1 = eps * params_.g1.value(x);
    const double t2 = lam * eps * params_.g2.value(x);
    auto U = [](double t) { return t / std::sqrt(1.0 + t * t); };
    return U(t1) / std::sqrt(eps) + U(t2) / std::sqrt(lam * eps);
}

ResidualScan3D residual_potential(const TwoBubbleField& u, const CoefficientH& h_target,
                                  const std::vector<Vec3>& samples) {
    ResidualScan3D out;
    out.min_u = std::numeric_limits<double>::max();
    for (const Vec3& x : samples) {
        const Jet3 j = u.eval_jet(x);
        out.min_u = std::min(out.min_u, j.v);
        if (j.v <= 0.0) {
            out.linf_norm = std::numeric_limits<double>::infinity();
            out.argmax = x;
            continue;
        }
        const double ht = (3.0 * std::pow(j.v, 5) - j.lap) / j.v;
        const double d = std::abs(ht - h_target.value(x));
        if (d > out.linf_norm) {
            out.linf_norm = d;
            out.argmax = x;
        }
    }
    return out;
}

std::vector<Vec3> stratified_samples(const Domain& ball, const Vec3& x1, const Vec3& x2,
                                     double inner_scale, int count, std::uint64_t seed) {
    if (!ball.is_ball()) throw GeometryError("stratified_samples: ball domains only");
    const double R = ball.ball_radius();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto rand_dir = [&]() {
        // Marsaglia rejection on the sphere.
        for (;;) {
            const double a = 2.0 * unit(rng) - 1.0, b = 2.0 * unit(rng) - 1.0,
                         c = 2.0 * unit(rng) - 1.0;
            const double n2 = a * a + b * b + c * c;
            if (n2 > 1e-12 && n2 <= 1.0) return Vec3{a, b, c} / std::sqrt(n2);
        }
    };

    std::vector<Vec3> pts;
    pts.reserve(count);
    const int n_uniform = count * 2 / 5;
    const int n_x1 = count / 4;
    const int n_x2 = count / 4;
    const int n_bdry = count - n_uniform - n_x1 - n_x2;

    while (static_cast<int>(pts.size()) < n_uniform) {
        const Vec3 p{R * (2 * unit(rng) - 1), R * (2 * unit(rng) - 1), R * (2 * unit(rng) - 1)};
        if (norm(p) < R) pts.push_back(p);
    }
    auto refine_around = [&](const Vec3& c, int n) {
        const double r_out = 0.5 * (R - norm(c));
        const double lo = std::log(std::max(inner_scale, 1e-12));
        const double hi = std::log(std::max(r_out, 2.0 * inner_scale));
        for (int i = 0; i < n;) {
            const double rr = std::exp(lo + (hi - lo) * unit(rng));
            const Vec3 p = c + rand_dir() * rr;
            if (norm(p) < R) {
                pts.push_back(p);
                ++i;
            }
        }
    };
    refine_around(x1, n_x1);
    refine_around(x2, n_x2);
    for (int i = 0; i < n_bdry; ++i) {
        const double v = -5.0 + (5.0 - 0.3) * unit(rng);
        const double rr = R * (1.0 - std::pow(10.0, v));
        pts.push_back(rand_dir() * rr);
    }
    return pts;
}

// ============================================================================
// Displayed-identity checks
// ============================================================================

namespace {

double rel_mismatch(double lhs, double rhs) {
    return std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-300);
}

}  // namespace

PieceIdentityReport verify_piece_identities(const RadialFamilyParams& radial,
                                            const TwoBubbleParams& two_bubble,
                                            const CoefficientH& h, double eps,
                                            const PieceOptions& opts) {
    PieceIdentityReport rep;
    const double m = radial.mass;

    // --- Radial pieces: exact identities of U_eps and V_eps. ---------------
    {
        RadialFamilyParams p = radial;
        p.eps = eps;
        const RadialFamily fam(p);
        double worst_U = 0.0, worst_V = 0.0;
        const int n = 160;
        for (int i = 0; i < n; ++i) {
            const double r = 0.02 + (0.9 - 0.02) * i / (n - 1.0);
            const Jet1 G{radial.green.value_radial(r), radial.green.derivative_radial(r),
                         radial.green.second_derivative_radial(r)};
            const Jet1 t = G * eps;
            const double hv = h.value_radial(r);

            const Jet1 U_eps = profiles::bubble_profile(t) * (1.0 / std::sqrt(eps));
            const double lhs_U = radial_laplacian(U_eps, r) + hv * U_eps.v;
            // |grad G^{-1}|^2 = (G'/G^2)^2 radially.
            const double gradinv = G.d / (G.v * G.v);
            const double rhs_U = 3.0 * std::pow(U_eps.v, 5) * gradinv * gradinv +
                                 hv * eps * std::pow(U_eps.v, 3);
            worst_U = std::max(worst_U, rel_mismatch(lhs_U, rhs_U));

            const Jet1 V_eps = pow(1.0 + t * t, -1.5) * (-m * std::sqrt(eps));
            const double lhs_V = radial_laplacian(V_eps, r) + hv * V_eps.v;
            const double A = 1.0 + eps * eps * G.v * G.v;
            const double rhs_V =
                15.0 * std::pow(U_eps.v, 4) * V_eps.v +
                12.0 * m * std::pow(eps, 2.5) * std::pow(G.v, 4) * std::pow(A, -2.5) -
                std::sqrt(eps) * m * hv * std::pow(A, -2.5) *
                    (1.0 + 4.0 * eps * eps * G.v * G.v) -
                3.0 * m * std::pow(eps, 2.5) * std::pow(G.v, 4) * std::pow(A, -3.5) *
                    (1.0 - 4.0 * eps * eps * G.v * G.v) * (gradinv * gradinv - 1.0);
            worst_V = std::max(worst_V, rel_mismatch(lhs_V, rhs_V));
        }
        rep.bubble_piece_residual = worst_U;
        rep.corrector_piece_residual = worst_V;
    }

    // --- Two-bubble expansion lines around x1. ------------------------------
    {
        const TwoBubbleParams& P = two_bubble;
        const TwoBubbleField fam(P, eps, h);
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        auto rand_dir = [&]() {
            for (;;) {
                const double a = 2 * unit(rng) - 1, b = 2 * unit(rng) - 1, c = 2 * unit(rng) - 1;
                const double n2 = a * a + b * b + c * c;
                if (n2 > 1e-12 && n2 <= 1.0) return Vec3{a, b, c} / std::sqrt(n2);
            }
        };
        std::vector<Vec3> sample;
        while (static_cast<int>(sample.size()) < opts.annulus_samples) {
            const double rr = P.delta * (opts.annulus_inner +
                                         (opts.annulus_outer - opts.annulus_inner) * unit(rng));
            const Vec3 p = P.x1 + rand_dir() * rr;
            if (!fam.params().g1.domain().contains(p)) continue;
            if (norm(p - P.x2) < 0.5 * P.delta) continue;
            sample.push_back(p);
        }

        const double lam = P.lambda;
        const double sql = std::sqrt(lam);
        const double g1m = P.e1.mass;
        const Vec3 grad_gamma1 = P.e1.grad_regular;
        const double h1 = h.value(P.x1);

        struct Acc {
            const char* name;
            double worst = 0.0;
        };
        Acc acc[5] = {{"U_eps"}, {"V_eps"}, {"W_eps"}, {"Y_eps"}, {"Z_eps"}};

        for (const Vec3& x : sample) {
            const double G1v = P.g1.value(x);
            const Vec3 G1g = P.g1.gradient(x);
            const double hv = h.value(x);
            const Jet3 G1{G1v, G1g, -hv * G1v};
            const Jet3 t1 = G1 * eps;
            const Jet1 tvar = Jet1::variable(t1.v);
            const Jet3 U_eps = compose(profiles::bubble_profile(tvar), t1) * (1.0 / std::sqrt(eps));
            const double U = U_eps.v;
            const double Ginv = 1.0 / G1v;
            const Vec3 d1 = x - P.x1;

            // U_eps line.
            {
                const double lhs = U_eps.lap + hv * U;
                const double rhs = 3.0 * std::pow(U, 5) - 12.0 * g1m * Ginv * std::pow(U, 5) -
                                   18.0 * Ginv * dot(d1, grad_gamma1) * std::pow(U, 5) +
                                   18.0 * g1m * g1m * Ginv * Ginv * std::pow(U, 5) +
                                   h1 * (eps * eps - 8.0 * Ginv * Ginv) * std::pow(U, 5);
                acc[0].worst = std::max(acc[0].worst, std::abs(lhs - rhs) / U);
            }
            // V_eps line (V_eps = eps^{1/2} V(eps G)).
            {
                const Jet3 V_eps = compose(profiles::corrector_profile(tvar), t1) * std::sqrt(eps);
                const double lhs = V_eps.lap + hv * V_eps.v;
                const double rhs = 15.0 * std::pow(U, 4) * V_eps.v -
                                   15.0 * std::sqrt(eps) * std::pow(U, 4) +
                                   12.0 * Ginv * std::pow(U, 5) +
                                   12.0 * g1m *
                                       (5.0 / eps * std::pow(Ginv, 4) * std::pow(U, 7) -
                                        4.0 * Ginv * Ginv * std::pow(U, 5));
                acc[1].worst = std::max(acc[1].worst, std::abs(lhs - rhs) / U);
            }
            // W_eps line.
            {
                const Jet3 W_eps =
                    compose(profiles::flat_correction_profile(tvar), t1) * std::pow(eps, 1.5);
                const double lhs = W_eps.lap + hv * W_eps.v;
                const double rhs = 15.0 * std::pow(U, 4) * W_eps.v + 8.0 * eps * std::pow(U, 3) -
                                   9.0 * eps * eps * std::pow(U, 5);
                acc[2].worst = std::max(acc[2].worst, std::abs(lhs - rhs) / U);
            }
            // Y_eps line.
            {
                const Jet3 Y_eps = compose(pow_int(profiles::bubble_profile(tvar), 5), t1) *
                                   (-1.5 * std::pow(eps, 1.5));
                const double lhs = Y_eps.lap + hv * Y_eps.v;
                const double rhs = 15.0 * std::pow(U, 4) * Y_eps.v +
                                   30.0 * std::pow(eps, 3) * std::pow(U, 7) -
                                   30.0 * std::pow(eps, 4) * std::pow(U, 9);
                acc[3].worst = std::max(acc[3].worst, std::abs(lhs - rhs) / U);
            }
            // Z_eps line.
            {
                const Jet3 s1 = compose(pow(1.0 + tvar * tvar, -1.5), t1);
                const Jet3 lin_a = Jet3::linear(dot(d1, grad_gamma1), grad_gamma1);
                const Vec3 bb = P.grad_g2_at_x1 * sql;
                const Jet3 lin_b = Jet3::linear(dot(d1, bb), bb);
                const Jet3 Z_eps = -1.0 * (s1 * lin_a + lin_b) * std::sqrt(eps);
                const double lhs = Z_eps.lap + hv * Z_eps.v;
                const double rhs = 15.0 * std::pow(U, 4) * Z_eps.v +
                                   18.0 * std::pow(U, 5) * Ginv * dot(d1, grad_gamma1) +
                                   15.0 * std::sqrt(lam * eps) * std::pow(U, 4) *
                                       dot(d1, P.grad_g2_at_x1);
                acc[4].worst = std::max(acc[4].worst, std::abs(lhs - rhs) / U);
            }
        }
        for (const auto& a : acc) rep.expansion_lines.push_back({a.name, a.worst});
    }
    return rep;
}

// ============================================================================
// Instability sweeps
// ============================================================================

ResidualSweep instability_sweep(SweepMode mode, const CoefficientH& h, const Domain& domain,
                                const std::vector<double>& eps_list, const SweepOptions& opts) {
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (eps_list[i] >= eps_list[i - 1])
            throw ConstructionError("instability_sweep: eps list must be strictly decreasing");

    ResidualSweep sweep;
    sweep.mode = mode;

    if (mode == SweepMode::Radial) {
        // Green data does not depend on eps: build once. The evaluation grid
        // stops short of the boundary, where u_eps vanishes by construction
        // and h_tilde becomes 0/0; the omitted sliver carries O(eps^6) of
        // the L^3 mass.
        RadialFamilyParams base = make_radial_family_params(h, domain, eps_list.front());
        const RadialGrid grid = RadialGrid::graded(
            domain.ball_radius() * (1.0 - 1e-6), opts.radial_nodes, opts.radial_first_frac);
        for (double eps : eps_list) {
            RadialFamilyParams p = base;
            p.eps = eps;
            const RadialFamily fam(p);
            ResidualScanRadial scan = residual_potential(fam, h, grid);
            sweep.rows.push_back({eps, scan.l3_norm, scan.linf_norm, scan.min_u, 0.0, 0.0,
                                  scan.min_u > 0.0});
        }
        return sweep;
    }

    BalanceOptions bopts = opts.balance;
    const TwoBubbleParams params = balance_configuration(h, domain, bopts);
    std::uint64_t k = 0;
    for (double eps : eps_list) {
        const TwoBubbleField fam(params, eps, h);
        const std::vector<Vec3> samples = stratified_samples(
            domain, params.x1, params.x2, 1e-2 * eps, opts.samples_3d, opts.seed + k++);
        const ResidualScan3D scan = residual_potential(fam, h, samples);
        sweep.rows.push_back({eps, 0.0, scan.linf_norm, scan.min_u, params.balance_residual_1,
                              params.balance_residual_2, scan.min_u > 0.0});
    }
    return sweep;
}

}  // namespace poholab
