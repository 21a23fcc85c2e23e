#include "poholab/bubbles.hpp"

#include <algorithm>
#include <cmath>

#include "poholab/errors.hpp"

namespace poholab {

double standard_bubble(const Vec3& x, const Vec3& center, double mu) {
    if (mu <= 0.0) throw NumericError("standard_bubble: mu must be positive");
    const double r2 = norm2(x - center);
    return 1.0 / std::sqrt(mu * (1.0 + r2 / (3.0 * mu * mu)));
}

std::vector<std::pair<double, double>> spherical_profile(const FieldView& u, const Domain& domain,
                                                         const Vec3& center,
                                                         const std::vector<double>& radii,
                                                         const SphereRule& rule) {
    std::vector<std::pair<double, double>> out;
    out.reserve(radii.size());
    for (double r : radii)
        out.emplace_back(r, std::sqrt(r) * sphere_average(u, domain, center, r, rule));
    return out;
}

double critical_radius(const std::vector<std::pair<double, double>>& profile,
                       double inner_cutoff) {
    std::vector<std::pair<double, double>> kept;
    for (const auto& p : profile)
        if (p.first >= inner_cutoff) kept.push_back(p);
    if (kept.size() < 3) throw NumericError("critical_radius: fewer than 3 samples past cutoff");
    for (std::size_t i = 0; i + 1 < kept.size(); ++i) {
        if (kept[i + 1].first <= kept[i].first)
            throw NumericError("critical_radius: profile radii must increase");
        if (kept[i + 1].second > kept[i].second) return kept[i].first;  // psi' turned positive
    }
    return kept.back().first;  // outer limit
}

// ============================================================================
// Greedy concentration-point extraction
// ============================================================================

ExtractionResult extract_concentration_points(const ScalarField3D& u, const Domain& domain,
                                              double threshold) {
    const Grid3D& g = *u.grid;
    ExtractionResult res;
    res.threshold = threshold;

    struct Candidate {
        Vec3 x;
        double value;
        long long order;  // lexicographic grid order for the tie-break
    };
    std::vector<Candidate> k0;

    // Discrete strict local maxima over the 26-neighborhood, at least 2 cells
    // of interior on every side.
    for (int k = 2; k + 2 < g.nz; ++k)
        for (int j = 2; j + 2 < g.ny; ++j)
            for (int i = 2; i + 2 < g.nx; ++i) {
                const std::size_t idx = g.index(i, j, k);
                if (g.node_kind[idx] != 1) continue;
                bool deep = true;
                for (int dk = -2; dk <= 2 && deep; ++dk)
                    for (int dj = -2; dj <= 2 && deep; ++dj)
                        for (int di = -2; di <= 2 && deep; ++di)
                            if (g.node_kind[g.index(i + di, j + dj, k + dk)] != 1) deep = false;
                if (!deep) continue;
                const double v = u.values[idx];
                bool strict_max = true;
                for (int dk = -1; dk <= 1 && strict_max; ++dk)
                    for (int dj = -1; dj <= 1 && strict_max; ++dj)
                        for (int di = -1; di <= 1 && strict_max; ++di) {
                            if (di == 0 && dj == 0 && dk == 0) continue;
                            if (u.values[g.index(i + di, j + dj, k + dk)] >= v) strict_max = false;
                        }
                if (!strict_max) continue;
                const Vec3 x = g.point(i, j, k);
                if (domain.distance_to_boundary(x) * v * v < threshold) continue;
                k0.push_back({x, v, static_cast<long long>(idx)});
            }

    // Greedy selection: argmax of u (smallest grid index on ties), then prune
    // every candidate separated by less than threshold / u(candidate)^2 from
    // the new point. Termination: each accepted point removes a ball of
    // radius at least threshold / (max u)^2 from a bounded candidate set.
    std::vector<Candidate> pool = std::move(k0);
    while (!pool.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < pool.size(); ++i) {
            if (pool[i].value > pool[best].value ||
                (pool[i].value == pool[best].value && pool[i].order < pool[best].order))
                best = i;
        }
        const Candidate chosen = pool[best];
        res.points.push_back(chosen.x);
        res.heights.push_back(chosen.value);
        std::vector<Candidate> next;
        next.reserve(pool.size());
        for (const auto& c : pool) {
            if (c.order == chosen.order) continue;
            const double sep = norm(c.x - chosen.x);
            if (sep * c.value * c.value < threshold) continue;
            if (sep * chosen.value * chosen.value < threshold) continue;
            next.push_back(c);
        }
        pool = std::move(next);
    }

    // Covering margin over the full grid (diagnostic).
    if (!res.points.empty()) {
        double margin = 0.0;
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const std::size_t idx = g.index(i, j, k);
                    if (g.node_kind[idx] != 1) continue;
                    const Vec3 x = g.point(i, j, k);
                    double dmin = std::numeric_limits<double>::max();
                    for (const Vec3& p : res.points) dmin = std::min(dmin, norm(x - p));
                    margin = std::max(margin, dmin * u.values[idx] * u.values[idx]);
                }
        res.covering_margin = margin;
    }
    return res;
}

double rescale_and_compare(const FieldView& u, const Domain& domain, const Vec3& point, double mu,
                           double R, int n_radial, const SphereRule& rule) {
    if (mu <= 0.0) throw NumericError("rescale_and_compare: mu must be positive");
    if (domain.distance_to_boundary(point) < R * mu)
        throw GeometryError("rescale_and_compare: comparison ball exits the domain");
    const double smu = std::sqrt(mu);
    double worst = std::abs(smu * u.value(point) - 1.0);  // z = 0
    for (int i = 1; i <= n_radial; ++i) {
        const double rz = R * i / n_radial;
        const double target = 1.0 / std::sqrt(1.0 + rz * rz / 3.0);
        for (const Vec3& w : rule.dirs) {
            const double val = smu * u.value(point + w * (mu * rz));
            worst = std::max(worst, std::abs(val - target));
        }
    }
    return worst;
}

}  // namespace poholab
