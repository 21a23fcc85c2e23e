#include "doctest.h"
#include "poholab/bubbles.hpp"
#include "poholab/elliptic.hpp"
#include "poholab/errors.hpp"
#include "poholab/pohozaev.hpp"

#include <cmath>
#include <random>

using namespace poholab;

namespace {
const Domain kBall = Domain::unit_ball();
}

TEST_CASE("structural condition: constants, |x|^2, and a failing profile") {
    const StructuralCertificate a =
        check_structural_condition(CoefficientH::constant(2.0), kBall);
    CHECK(a.satisfied);
    CHECK(a.min_value == doctest::Approx(2.0));

    // h = |x|^2: h + <x, grad h>/2 = 2|x|^2 >= 0.
    const StructuralCertificate b =
        check_structural_condition(CoefficientH::radial_polynomial({0.0, 0.0, 1.0}), kBall);
    CHECK(b.satisfied);
    CHECK(b.min_value == doctest::Approx(0.0).epsilon(1e-12));

    // h = 1 - 2|x|^2: h + <x, grad h>/2 = 1 - 4|x|^2, minimum -3 at |x| = 1.
    const StructuralCertificate c =
        check_structural_condition(CoefficientH::radial_polynomial({1.0, 0.0, -2.0}), kBall);
    CHECK_FALSE(c.satisfied);
    CHECK(c.min_value == doctest::Approx(-3.0).epsilon(1e-9));
}

TEST_CASE("P1 on the zero field") {
    const auto u = ScalarFieldRadial::sample([](double) { return 0.0; },
                                             RadialGrid::graded(1.0, 200), 0.0);
    const PohozaevReport rep = evaluate_identity_P1(u, CoefficientH::constant(1.0), kBall);
    CHECK(rep.volume_term == 0.0);
    CHECK(rep.boundary_B1 == 0.0);
    CHECK(rep.boundary_B2 == 0.0);
    CHECK(rep.identity_residual == doctest::Approx(0.0));
}

TEST_CASE("P1 on the standard bubble restricted to the ball (h = 0)") {
    // Frozen closed forms: U(1) = sqrt(3)/2, U'(1) = -sqrt(3)/8, so
    // B1 = -4 pi 9/128 and B2 = +4 pi 9/128; the identity holds without any
    // boundary condition on u.
    const auto u = ScalarFieldRadial::sample(
        [](double r) { return 1.0 / std::sqrt(1.0 + r * r / 3.0); },
        RadialGrid::uniform(1.0, 4000), 1.0);
    const PohozaevReport rep = evaluate_identity_P1(u, CoefficientH::constant(0.0), kBall);
    const double frozen = 4.0 * kPi * 9.0 / 128.0;
    CHECK(rep.boundary_B1 == doctest::Approx(-frozen).epsilon(1e-3));
    CHECK(rep.boundary_B2 == doctest::Approx(frozen).epsilon(1e-3));
    CHECK(rep.volume_term == 0.0);
    CHECK(rep.identity_residual < 1e-2);
}

TEST_CASE("P3 on the Brezis-Nirenberg solution (criterion-5 shape)") {
    const double lambda = kPi * kPi / 2.0;
    const auto h = CoefficientH::constant(-lambda);
    const RadialSolveOutcome out = find_radial_solution(h);
    REQUIRE(out.solution.has_value());

    PohozaevOptions opts;
    opts.radial_quadrature_nodes = 10000;
    const PohozaevReport rep = evaluate_identity_P3(*out.solution, h, kBall, opts);
    CHECK(rep.identity_residual < 1e-2);

    // The identity reduces to lambda int u^2 = 1/2 oint (d_nu u)^2.
    const double lhs = -rep.volume_term;  // = lambda int u^2
    const double rhs = 0.5 * kOmega2 * out.boundary_derivative * out.boundary_derivative;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-2));

    // P1 agrees with P3 after the integration-by-parts rearrangement:
    // 1/2 int h(u^2 + <x, grad u^2>) = -int (h + <x,grad h>/2) u^2.
    const PohozaevReport rep1 = evaluate_identity_P1(*out.solution, h, kBall, opts);
    CHECK(rep1.volume_term == doctest::Approx(-rep.volume_term).epsilon(2e-6));
    CHECK(rep1.identity_residual < 1e-2);
}

TEST_CASE("P3 scaling covariance under the critical rescaling") {
    const double lambda = kPi * kPi / 2.0;
    const auto h = CoefficientH::constant(-lambda);
    const RadialSolveOutcome out = find_radial_solution(h);
    REQUIRE(out.solution.has_value());
    const ScalarFieldRadial& u = *out.solution;

    PohozaevOptions opts;
    opts.radial_quadrature_nodes = 10000;
    const double res_base = evaluate_identity_P3(u, h, kBall, opts).identity_residual;

    // u_k(x) = k^{1/2} u(kx) on the ball of radius 1/k with h_k = k^2 h.
    const double k = 2.0;
    const auto uk = ScalarFieldRadial::sample(
        [&](double r) { return std::sqrt(k) * u.eval(std::min(k * r, 1.0)); },
        RadialGrid::uniform(1.0 / k, 4000),
        std::sqrt(k) * (u.origin_value ? *u.origin_value : 0));
    const auto hk = CoefficientH::constant(-lambda * k * k);
    const double res_scaled =
        evaluate_identity_P3(uk, hk, Domain::unit_ball(1.0 / k), opts).identity_residual;
    CHECK(std::abs(res_scaled - res_base) < 5e-3);
}

TEST_CASE("P3 reports the obstruction contradiction for h = 1") {
    const auto u = ScalarFieldRadial::sample([](double r) { return 1.0 - r * r; },
                                             RadialGrid::uniform(1.0, 2000), 1.0);
    const PohozaevReport rep = evaluate_identity_P3(u, CoefficientH::constant(1.0), kBall);
    CHECK(rep.lhs > 0.0);
    CHECK(rep.rhs <= 0.0);
    CHECK(rep.obstruction_contradiction);
    CHECK(rep.contradiction_margin == doctest::Approx(rep.lhs - rep.rhs));
    CHECK(rep.identity_residual > 0.1);  // the identity can only fail here
}

TEST_CASE("P3 precondition: boundary trace must vanish") {
    const auto u = ScalarFieldRadial::sample([](double) { return 1.0; },
                                             RadialGrid::uniform(1.0, 100), 1.0);
    CHECK_THROWS_AS(evaluate_identity_P3(u, CoefficientH::constant(1.0), kBall),
                    NumericError);
}

TEST_CASE("P4 vanishes for radial fields and the zero field") {
    FieldView bubble_view{
        [](const Vec3& x) { return standard_bubble(x, {0, 0, 0}, 1.0); },
        [](const Vec3& x) {
            const double b = 1.0 + norm2(x) / 3.0;
            return x * (-1.0 / (3.0 * std::pow(b, 1.5)));
        }};
    const PohozaevReportVec rep =
        evaluate_identity_P4(bubble_view, CoefficientH::constant(0.0), kBall);
    for (int c = 0; c < 3; ++c) {
        CHECK(std::abs(rep.lhs[c]) < 1e-10);
        CHECK(std::abs(rep.rhs[c]) < 1e-12);
    }
    CHECK(rep.identity_residual < 1e-8);

    FieldView zero{[](const Vec3&) { return 0.0; }, [](const Vec3&) { return Vec3{}; }};
    const PohozaevReportVec rz = evaluate_identity_P4(zero, CoefficientH::constant(1.0), kBall);
    for (int c = 0; c < 3; ++c) CHECK(rz.lhs[c] == 0.0);
}

TEST_CASE("P4 for an off-center bubble vs a brute-force surface oracle") {
    const Vec3 center{0.2, 0, 0};
    auto value = [center](const Vec3& x) { return standard_bubble(x, center, 1.0); };
    auto gradient = [center](const Vec3& x) {
        const double b = 1.0 + norm2(x - center) / 3.0;
        return (x - center) * (-1.0 / (3.0 * std::pow(b, 1.5)));
    };
    const FieldView u{value, gradient};
    const PohozaevReportVec rep = evaluate_identity_P4(u, CoefficientH::constant(0.0), kBall);

    // Independent oracle: the same surface integral with the analytic
    // gradient on a denser product rule.
    const SphereRule dense = SphereRule::product(64, 128);
    for (int c = 0; c < 3; ++c) {
        const double oracle = surface_integral(
            [&](const Vec3& b, const Vec3& nu) {
                const Vec3 g = gradient(b);
                const double un = dot(g, nu);
                return un * g[c] - 0.5 * norm2(g) * nu[c] +
                       std::pow(value(b), 6) / 6.0 * nu[c];
            },
            kBall, dense);
        CHECK(rep.rhs[c] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::abs(rep.lhs[c] - oracle) < 1e-3);
        // The exact identity makes both sides zero for this entire solution
        // of Delta u = u^5.
        CHECK(std::abs(oracle) < 1e-6);
    }
    CHECK(rep.identity_residual < 1e-3);
}

TEST_CASE("P2 equals the boundary-vanishing reduction of P1") {
    const double lambda = kPi * kPi / 2.0;
    const auto h = CoefficientH::constant(-lambda);
    const RadialSolveOutcome out = find_radial_solution(h);
    REQUIRE(out.solution.has_value());
    const ScalarFieldRadial& u = *out.solution;
    FieldView view = make_view(u);
    PohozaevOptions opts;
    opts.normal_step = 2e-3;
    opts.boundary_trace_tol = 1e-4;
    const PohozaevReport p2 = evaluate_identity_P2(view, h, kBall, opts);
    CHECK(p2.identity_residual < 2e-2);
    CHECK(p2.rhs > 0.0);  // + 1/2 flux on the star-shaped ball
}

// ----------------------------------------------------------------------------
// Green-function Pohozaev sum
// ----------------------------------------------------------------------------

TEST_CASE("green_pohozaev_sum: frozen single-source values on the ball") {
    GreenOptions unit;
    unit.normalization = GreenNorm::Unit;
    const auto h0 = CoefficientH::constant(0.0);

    {
        BubbleConfiguration cfg{{{0, 0, 0}}, {1.0}, 0.0};
        const GreenField g = solve_green(h0, {0, 0, 0}, kBall, unit);
        const GreenExpansion e = extract_expansion(g, h0);
        const double s = green_pohozaev_sum(cfg, {e}, {g});
        CHECK(s == doctest::Approx(-1.0 / kOmega2).epsilon(1e-6));
        CHECK(s < 0.0);
    }
    {
        BubbleConfiguration cfg{{{0.5, 0, 0}}, {1.0}, 0.0};
        const GreenField g = solve_green(h0, {0.5, 0, 0}, kBall, unit);
        const GreenExpansion e = extract_expansion(g, h0);
        const double s = green_pohozaev_sum(cfg, {e}, {g});
        // lambda (m + 2<x, grad gamma>) = (-4/3 - 8/9) / omega_2.
        CHECK(s == doctest::Approx((-4.0 / 3.0 - 8.0 / 9.0) / kOmega2).epsilon(1e-4));
        CHECK(s < 0.0);
    }
}

TEST_CASE("green_pohozaev_sum rejects mixed normalizations") {
    const auto h0 = CoefficientH::constant(0.0);
    BubbleConfiguration cfg{{{0, 0, 0}}, {1.0}, 0.0};
    const GreenField g = solve_green(h0, {0, 0, 0}, kBall);  // scaled
    GreenExpansion e = extract_expansion(g, h0);             // scaled tag
    CHECK_THROWS_AS(green_pohozaev_sum(cfg, {e}, {g}), NormalizationError);
}

TEST_CASE("green_pohozaev_sum negative for random two-point configurations, h = |x|^2") {
    const auto h = CoefficientH::radial_polynomial({0.0, 0.0, 1.0});
    GreenOptions opts;
    opts.mode = GreenOptions::Mode::Images3D;
    opts.spacing = 1.0 / 16.0;
    opts.normalization = GreenNorm::Unit;
    ExpansionFitOptions fit;
    fit.residual_tol = 0.1;

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> c(-0.45, 0.45);
    std::uniform_real_distribution<double> w(0.05, 1.0);
    for (int draw = 0; draw < 5; ++draw) {
        const Vec3 x1{c(rng), c(rng), c(rng)};
        Vec3 x2{c(rng), c(rng), c(rng)};
        if (norm(x1 - x2) < 0.2) x2.x += 0.3;
        BubbleConfiguration cfg{{x1, x2}, {w(rng), w(rng)}, 0.0};
        std::vector<GreenField> fields;
        std::vector<GreenExpansion> exps;
        for (const Vec3& p : cfg.points) {
            fields.push_back(solve_green(h, p, kBall, opts));
            exps.push_back(extract_expansion(fields.back(), h, fit));
        }
        const double s = green_pohozaev_sum(cfg, exps, fields);
        CHECK(s < 0.0);
    }
}

TEST_CASE("P1 view path on a sampled 3D field agrees with the radial path") {
    // Sampled lattice field of a smooth radial function with h = 1.
    const auto h = CoefficientH::constant(1.0);
    auto fn = [](double r) { return std::cos(0.8 * r) - std::cos(0.8); };
    const auto radial = ScalarFieldRadial::sample(fn, RadialGrid::uniform(1.0, 4000), fn(0.0));
    const PohozaevReport base = evaluate_identity_P1(radial, h, kBall);

    auto grid = Grid3D::cover(kBall, 1.0 / 24.0);
    const ScalarField3D lattice =
        ScalarField3D::sample([&](const Vec3& x) { return fn(norm(x)); }, grid);
    FieldView view = make_view(lattice);
    PohozaevOptions opts;
    opts.normal_step = 1.0 / 24.0;
    const PohozaevReport sampled = evaluate_identity_P1(view, h, kBall, opts);
    CHECK(sampled.volume_term == doctest::Approx(base.volume_term).epsilon(5e-2));
    CHECK(sampled.rhs == doctest::Approx(base.rhs).epsilon(0.15));
}
