#include "doctest.h"
#include "poholab/errors.hpp"
#include "poholab/fields.hpp"
#include "poholab/geometry.hpp"

#include <cmath>

using namespace poholab;

TEST_CASE("radial grid invariants") {
    const RadialGrid g = RadialGrid::graded(2.0, 64);
    CHECK(g.nodes.front() <= 1e-3 * 2.0);
    CHECK(g.nodes.back() == doctest::Approx(2.0));
    for (int i = 1; i < g.size(); ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
    CHECK_THROWS_AS(RadialGrid::graded(1.0, 64, 0.5), GeometryError);
    CHECK_THROWS_AS(RadialGrid::from_nodes({0.5, 0.4, 0.6}), GeometryError);
}

TEST_CASE("nonuniform simpson integrates quadratics exactly") {
    const RadialGrid g = RadialGrid::graded(1.0, 41);
    std::vector<double> y(g.nodes.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = g.nodes[i] * g.nodes[i];
    const double got = integrate_nonuniform(g.nodes, y);
    const double a = g.nodes.front();
    CHECK(got == doctest::Approx((1.0 - a * a * a) / 3.0).epsilon(1e-12));
}

TEST_CASE("adaptive simpson oracle") {
    const double got = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, kPi, 1e-13);
    CHECK(got == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("sphere averages: constant, radial, odd") {
    const Domain ball = Domain::unit_ball();
    FieldView c{[](const Vec3&) { return 3.5; }, nullptr};
    CHECK(sphere_average(c, ball, {0.1, 0.2, 0.0}, 0.3) == doctest::Approx(3.5).epsilon(1e-13));

    FieldView r2{[](const Vec3& x) { return norm2(x); }, nullptr};
    CHECK(sphere_average(r2, ball, {0, 0, 0}, 0.5) == doctest::Approx(0.25).epsilon(1e-12));

    FieldView lin{[](const Vec3& x) { return x.x; }, nullptr};
    CHECK(sphere_average(lin, ball, {0, 0, 0}, 0.7) == doctest::Approx(0.0).epsilon(1e-13));

    CHECK_THROWS_AS(sphere_average(c, ball, {0.8, 0, 0}, 0.5), GeometryError);
}

TEST_CASE("sphere average of a radial field matches the field value") {
    const Domain ball = Domain::unit_ball();
    const auto f = ScalarFieldRadial::sample([](double r) { return std::cos(3.0 * r); },
                                             RadialGrid::graded(1.0, 1600), 1.0);
    for (double r : {0.05, 0.3, 0.8})
        CHECK(sphere_average(f, ball, {0, 0, 0}, r) ==
              doctest::Approx(std::cos(3.0 * r)).epsilon(1e-5));
    // Off-center averaging goes through interpolation of the radial samples.
    FieldView view = make_view(f);
    const double direct = sphere_average(view, ball, {0.2, 0, 0}, 0.1);
    CHECK(std::isfinite(direct));
}

TEST_CASE("volume integrals: ball volume, |x|, bubble^6 vs adaptive oracle") {
    const Domain ball = Domain::unit_ball();
    const auto one = ScalarFieldRadial::sample([](double) { return 1.0; },
                                               RadialGrid::graded(1.0, 600), 1.0);
    CHECK(volume_integral(one) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-8));

    const auto absx = ScalarFieldRadial::sample([](double r) { return r; },
                                                RadialGrid::graded(1.0, 600), 0.0);
    CHECK(volume_integral(absx) == doctest::Approx(kPi).epsilon(1e-6));

    // Independent oracle: adaptive quadrature of 4 pi r^2 (1 + r^2/3)^{-3}.
    const double oracle = adaptive_simpson(
        [](double r) {
            const double b = 1.0 + r * r / 3.0;
            return kOmega2 * r * r / (b * b * b);
        },
        0.0, 10.0, 1e-12);
    const auto bubble6 = ScalarFieldRadial::sample(
        [](double r) {
            const double b = 1.0 + r * r / 3.0;
            return 1.0 / (b * b * b);
        },
        RadialGrid::graded(10.0, 4000), 1.0);
    CHECK(volume_integral(bubble6) == doctest::Approx(oracle).epsilon(1e-6));
    (void)ball;
}

TEST_CASE("3D volume quadrature converges at second order or better") {
    const Domain ball = Domain::unit_ball();
    auto smooth = [](const Vec3& x) { return std::exp(-norm2(x)) + x.x * x.y; };
    const double exact = adaptive_simpson(
        [](double r) { return kOmega2 * r * r * std::exp(-r * r); }, 0.0, 1.0, 1e-13);

    auto error_at = [&](double spacing) {
        auto grid = Grid3D::cover(ball, spacing);
        const ScalarField3D f = ScalarField3D::sample(smooth, grid);
        return std::abs(volume_integral(f, ball) - exact);
    };
    const double e1 = error_at(1.0 / 8.0);
    const double e2 = error_at(1.0 / 16.0);
    CHECK(e2 * 3.0 <= e1);
}

TEST_CASE("surface integral on the ball") {
    const Domain ball = Domain::unit_ball();
    const double area = surface_integral([](const Vec3&, const Vec3&) { return 1.0; }, ball);
    CHECK(area == doctest::Approx(kOmega2).epsilon(1e-12));
    // <x, nu> = 1 on the unit sphere.
    const double mom = surface_integral([](const Vec3& x, const Vec3& nu) { return dot(x, nu); },
                                        ball);
    CHECK(mom == doctest::Approx(kOmega2).epsilon(1e-12));
}

TEST_CASE("star-shape certificate: ball passes, dumbbell radius function fails") {
    CHECK(check_star_shaped(Domain::unit_ball()).passed);

    // Two lobes along z pinched through zero at the equator.
    const Domain dumbbell = Domain::star_shaped(
        [](const Vec3& w) { return 0.3 + (2.0 * w.z * w.z - 1.0); });
    const StarShapeCertificate cert = check_star_shaped(dumbbell);
    CHECK_FALSE(cert.passed);
    CHECK(cert.min_boundary_radius <= 0.0);

    // A valid (wavy but positive) radial graph is star-shaped by construction.
    const Domain wavy = Domain::star_shaped(
        [](const Vec3& w) { return 0.8 + 0.15 * (2.0 * w.z * w.z - 1.0); });
    const StarShapeCertificate ok = check_star_shaped(wavy);
    CHECK(ok.passed);
    CHECK(ok.min_inner_product > 0.0);
}

TEST_CASE("grid3d classification invariants") {
    const Domain ball = Domain::unit_ball();
    auto grid = Grid3D::cover(ball, 1.0 / 10.0);
    // Every interior node has its 6 axis neighbors classified (interior or
    // boundary, never exterior).
    const Grid3D& g = *grid;
    int interior = 0;
    for (int k = 1; k + 1 < g.nz; ++k)
        for (int j = 1; j + 1 < g.ny; ++j)
            for (int i = 1; i + 1 < g.nx; ++i) {
                if (g.node_kind[g.index(i, j, k)] != 1) continue;
                ++interior;
                CHECK(g.node_kind[g.index(i + 1, j, k)] != 0);
                CHECK(g.node_kind[g.index(i - 1, j, k)] != 0);
                CHECK(g.node_kind[g.index(i, j + 1, k)] != 0);
                CHECK(g.node_kind[g.index(i, j - 1, k)] != 0);
                CHECK(g.node_kind[g.index(i, j, k + 1)] != 0);
                CHECK(g.node_kind[g.index(i, j, k - 1)] != 0);
            }
    CHECK(interior == g.n_interior);
    CHECK(interior > 0);
}

TEST_CASE("star-shaped volume and area against 1D adaptive oracles") {
    // Axisymmetric graph rho(theta) = 0.8 + 0.15 (2 cos^2 theta - 1).
    auto rho_of = [](double cos_t) { return 0.8 + 0.15 * (2.0 * cos_t * cos_t - 1.0); };
    const Domain dom = Domain::star_shaped([&](const Vec3& w) { return rho_of(w.z); });

    const double vol_oracle = adaptive_simpson(
        [&](double th) {
            const double rho = rho_of(std::cos(th));
            return 2.0 * kPi * std::sin(th) * rho * rho * rho / 3.0;
        },
        0.0, kPi, 1e-12);
    FieldView one{[](const Vec3&) { return 1.0; }, nullptr};
    CHECK(volume_integral(one, dom, 200) == doctest::Approx(vol_oracle).epsilon(1e-8));

    // Surface area element rho sqrt(rho^2 + rho_theta^2) sin(theta).
    const double area_oracle = adaptive_simpson(
        [&](double th) {
            const double c = std::cos(th), s = std::sin(th);
            const double rho = rho_of(c);
            const double drho = -0.6 * c * s;  // d/dtheta of 0.3 cos^2
            return 2.0 * kPi * s * rho * std::sqrt(rho * rho + drho * drho);
        },
        0.0, kPi, 1e-12);
    const double area =
        surface_integral([](const Vec3&, const Vec3&) { return 1.0; }, dom);
    CHECK(area == doctest::Approx(area_oracle).epsilon(1e-5));
}

TEST_CASE("nonuniform simpson: odd interval count stays exact on quadratics") {
    // Even node count leaves a final single interval for the one-sided panel.
    const RadialGrid g = RadialGrid::graded(1.0, 40);
    std::vector<double> y(g.nodes.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = 2.0 - g.nodes[i] + 3.0 * g.nodes[i] * g.nodes[i];
    const double a = g.nodes.front();
    auto F = [](double t) { return 2.0 * t - t * t / 2.0 + t * t * t; };
    CHECK(integrate_nonuniform(g.nodes, y) == doctest::Approx(F(1.0) - F(a)).epsilon(1e-13));
}
