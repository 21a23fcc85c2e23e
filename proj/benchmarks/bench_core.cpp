#include <benchmark/benchmark.h>

#include "poholab/blowup.hpp"
#include "poholab/bubbles.hpp"
#include "poholab/elliptic.hpp"
#include "poholab/green.hpp"

using namespace poholab;

namespace {

const Domain kBall = Domain::unit_ball();

void BM_SphereAverage(benchmark::State& state) {
    FieldView u{[](const Vec3& x) { return standard_bubble(x, {0, 0, 0}, 0.1); }, nullptr};
    for (auto _ : state)
        benchmark::DoNotOptimize(sphere_average(u, kBall, {0.1, 0, 0}, 0.3));
}
BENCHMARK(BM_SphereAverage);

void BM_RadialGreenSolve(benchmark::State& state) {
    const auto h = CoefficientH::constant(1.0);
    for (auto _ : state) {
        const GreenField g = solve_green(h, {0, 0, 0}, kBall);
        benchmark::DoNotOptimize(g.radial_mass());
    }
}
BENCHMARK(BM_RadialGreenSolve);

void BM_DirichletCG(benchmark::State& state) {
    const double spacing = 1.0 / state.range(0);
    auto grid = Grid3D::cover(kBall, spacing);
    const ScalarField3D rhs = ScalarField3D::sample([](const Vec3&) { return 1.0; }, grid);
    const auto h = CoefficientH::constant(1.0);
    for (auto _ : state) {
        const ScalarField3D v = solve_dirichlet(h, rhs, kBall);
        benchmark::DoNotOptimize(v.values.data());
    }
}
BENCHMARK(BM_DirichletCG)->Arg(16)->Arg(24)->Arg(32);

void BM_RadialShoot(benchmark::State& state) {
    const auto h = CoefficientH::constant(-kPi * kPi / 2.0);
    for (auto _ : state) {
        const ShootResult r = radial_shoot(h, 3.0);
        benchmark::DoNotOptimize(r.endpoint_value);
    }
}
BENCHMARK(BM_RadialShoot);

void BM_TwoBubbleEval(benchmark::State& state) {
    BalanceOptions opts;
    opts.x1_override = Vec3{0, 0, 0};
    static const TwoBubbleParams params =
        balance_configuration(CoefficientH::constant(0.0), kBall, opts);
    const TwoBubbleField fam(params, 1e-2, CoefficientH::constant(0.0));
    Vec3 x{0.21, 0.05, -0.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(fam.eval_jet(x));
    }
}
BENCHMARK(BM_TwoBubbleEval);

void BM_Extraction(benchmark::State& state) {
    auto grid = Grid3D::cover(kBall, 1.0 / 16.0);
    const ScalarField3D u = ScalarField3D::sample(
        [](const Vec3& x) {
            return standard_bubble(x, {0.4, 0, 0}, 1e-2) + standard_bubble(x, {-0.4, 0, 0}, 1e-2);
        },
        grid);
    for (auto _ : state) {
        const ExtractionResult res = extract_concentration_points(u, kBall);
        benchmark::DoNotOptimize(res.covering_margin);
    }
}
BENCHMARK(BM_Extraction);

void BM_RadialFamilyResidual(benchmark::State& state) {
    static const RadialFamilyParams params =
        make_radial_family_params(CoefficientH::constant(0.0), kBall, 1e-3);
    const RadialFamily fam(params);
    const RadialGrid grid = RadialGrid::graded(1.0 - 1e-6, 2000, 1e-7);
    for (auto _ : state) {
        const ResidualScanRadial scan =
            residual_potential(fam, CoefficientH::constant(0.0), grid);
        benchmark::DoNotOptimize(scan.l3_norm);
    }
}
BENCHMARK(BM_RadialFamilyResidual);

}  // namespace

BENCHMARK_MAIN();
