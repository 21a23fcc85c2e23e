#include "poholab/elliptic.hpp"

#include <algorithm>
#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "poholab/errors.hpp"

namespace poholab {

// ============================================================================
// Laplacians (analyst sign)
// ============================================================================

ScalarFieldRadial apply_laplacian(const ScalarFieldRadial& u) {
    const auto& r = u.grid.nodes;
    const auto& y = u.values;
    const int n = u.grid.size();
    if (n < 3) throw NumericError("apply_laplacian: need at least 3 radial nodes");

    ScalarFieldRadial out;
    out.grid = u.grid;
    out.values.resize(n);

    auto stencil = [&](double hm, double hp, double ym, double y0, double yp, double rr) {
        const double upp =
            2.0 * (ym / (hm * (hm + hp)) - y0 / (hm * hp) + yp / (hp * (hm + hp)));
        const double up = (-hp / (hm * (hm + hp))) * ym + ((hp - hm) / (hm * hp)) * y0 +
                          (hm / (hp * (hm + hp))) * yp;
        return -(upp + 2.0 * up / rr);
    };

    for (int i = 1; i + 1 < n; ++i)
        out.values[i] = stencil(r[i] - r[i - 1], r[i + 1] - r[i], y[i - 1], y[i], y[i + 1], r[i]);

    // First node: symmetry ghost at -r_0 carrying u(r_0) (u'(0) = 0).
    out.values[0] = stencil(2.0 * r[0], r[1] - r[0], y[0], y[0], y[1], r[0]);

    // Last node: cubic through the final four samples (second-order
    // one-sided derivatives).
    if (n >= 4) {
        const int i = n - 1;
        Eigen::Matrix4d V;
        Eigen::Vector4d rhs;
        for (int k = 0; k < 4; ++k) {
            const double t = r[i - 3 + k] - r[i];
            V(k, 0) = 1.0;
            V(k, 1) = t;
            V(k, 2) = t * t;
            V(k, 3) = t * t * t;
            rhs(k) = y[i - 3 + k];
        }
        const Eigen::Vector4d c = V.fullPivLu().solve(rhs);
        out.values[i] = -(2.0 * c(2) + 2.0 * c(1) / r[i]);
    } else {
        const int i = n - 1;
        const double h1 = r[i - 1] - r[i - 2], h2 = r[i] - r[i - 1];
        const double d1 = (y[i - 1] - y[i - 2]) / h1, d2 = (y[i] - y[i - 1]) / h2;
        const double upp = 2.0 * (d2 - d1) / (h1 + h2);
        const double up = d2 + (d2 - d1) * h2 / (h1 + h2);
        out.values[i] = -(upp + 2.0 * up / r[i]);
    }
    return out;
}

ScalarField3D apply_laplacian(const ScalarField3D& u) {
    const Grid3D& g = *u.grid;
    ScalarField3D out = ScalarField3D::zeros(u.grid);
    const double ih2 = 1.0 / (g.h * g.h);
    for (int k = 1; k + 1 < g.nz; ++k)
        for (int j = 1; j + 1 < g.ny; ++j)
            for (int i = 1; i + 1 < g.nx; ++i) {
                const std::size_t idx = g.index(i, j, k);
                if (g.node_kind[idx] != 1) continue;
                const double c = u.values[idx];
                const double s = u.values[g.index(i + 1, j, k)] + u.values[g.index(i - 1, j, k)] +
                                 u.values[g.index(i, j + 1, k)] + u.values[g.index(i, j - 1, k)] +
                                 u.values[g.index(i, j, k + 1)] + u.values[g.index(i, j, k - 1)];
                out.values[idx] = (6.0 * c - s) * ih2;
            }
    return out;
}

// ============================================================================
// Conjugate gradient on the negated 7-point stencil plus h
// ============================================================================

namespace {

struct CompactGrid {
    const Grid3D* g = nullptr;
    std::vector<int> compact;      // node -> interior index or -1
    std::vector<int> node_of;      // interior index -> node
    std::vector<double> diag_h;    // h(x) at the interior nodes

    CompactGrid(const Grid3D& grid, const CoefficientH& h) : g(&grid) {
        compact.assign(grid.node_count(), -1);
        node_of.reserve(grid.n_interior);
        for (int k = 0; k < grid.nz; ++k)
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i) {
                    const std::size_t idx = grid.index(i, j, k);
                    if (grid.node_kind[idx] == 1) {
                        compact[idx] = static_cast<int>(node_of.size());
                        node_of.push_back(static_cast<int>(idx));
                    }
                }
        diag_h.resize(node_of.size());
        for (std::size_t m = 0; m < node_of.size(); ++m) {
            const int idx = node_of[m];
            const int i = idx % grid.nx;
            const int j = (idx / grid.nx) % grid.ny;
            const int k = idx / (grid.nx * grid.ny);
            diag_h[m] = h.value(grid.point(i, j, k));
        }
    }

    // y = (Delta + h) v on the interior (Dirichlet zero outside).
    void apply(const std::vector<double>& v, std::vector<double>& y) const {
        const Grid3D& grid = *g;
        const double ih2 = 1.0 / (grid.h * grid.h);
        const int nx = grid.nx;
        const int nxy = grid.nx * grid.ny;
        for (std::size_t m = 0; m < node_of.size(); ++m) {
            const int idx = node_of[m];
            double s = 0.0;
            const int nb[6] = {idx + 1, idx - 1, idx + nx, idx - nx, idx + nxy, idx - nxy};
            for (int t = 0; t < 6; ++t) {
                const int c = compact[nb[t]];
                if (c >= 0) s += v[c];
            }
            y[m] = (6.0 * v[m] - s) * ih2 + diag_h[m] * v[m];
        }
    }
};

}  // namespace

ScalarField3D solve_dirichlet(const CoefficientH& h, const ScalarField3D& rhs,
                              const Domain& domain, const SolveOptions& opts) {
    (void)domain;
    const Grid3D& g = *rhs.grid;
    CompactGrid A(g, h);
    const int n = static_cast<int>(A.node_of.size());
    const double ih2 = 1.0 / (g.h * g.h);

    // Boundary values (snapped at the node positions) enter the load vector.
    std::vector<double> bval(g.node_count(), 0.0);
    if (opts.boundary_data) {
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const std::size_t idx = g.index(i, j, k);
                    if (g.node_kind[idx] == 2) bval[idx] = opts.boundary_data(g.point(i, j, k));
                }
    }

    std::vector<double> b(n), x(n, 0.0), r(n), z(n), p(n), Ap(n);
    const int nx = g.nx, nxy = g.nx * g.ny;
    for (int m = 0; m < n; ++m) {
        const int idx = A.node_of[m];
        double lift = 0.0;
        const int nb[6] = {idx + 1, idx - 1, idx + nx, idx - nx, idx + nxy, idx - nxy};
        for (int t = 0; t < 6; ++t)
            if (g.node_kind[nb[t]] == 2) lift += bval[nb[t]];
        b[m] = rhs.values[idx] + lift * ih2;
    }

    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    ScalarField3D out = ScalarField3D::zeros(rhs.grid);
    if (bnorm == 0.0) {
        for (std::size_t idx = 0; idx < g.node_count(); ++idx)
            if (g.node_kind[idx] == 2) out.values[idx] = bval[idx];
        return out;
    }

    // Jacobi-preconditioned CG.
    std::vector<double> inv_diag(n);
    for (int m = 0; m < n; ++m) {
        const double d = 6.0 * ih2 + A.diag_h[m];
        if (d <= 0.0) throw IndefiniteSystemError("solve_dirichlet: non-positive diagonal");
        inv_diag[m] = 1.0 / d;
    }
    r = b;
    for (int m = 0; m < n; ++m) z[m] = inv_diag[m] * r[m];
    p = z;
    double rz = 0.0;
    for (int m = 0; m < n; ++m) rz += r[m] * z[m];

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        A.apply(p, Ap);
        double pAp = 0.0;
        for (int m = 0; m < n; ++m) pAp += p[m] * Ap[m];
        if (pAp <= 0.0)
            throw IndefiniteSystemError("solve_dirichlet: operator is not positive definite");
        const double alpha = rz / pAp;
        double rnorm = 0.0;
        for (int m = 0; m < n; ++m) {
            x[m] += alpha * p[m];
            r[m] -= alpha * Ap[m];
            rnorm += r[m] * r[m];
        }
        if (std::sqrt(rnorm) <= opts.tol * bnorm) break;
        double rz_new = 0.0;
        for (int m = 0; m < n; ++m) {
            z[m] = inv_diag[m] * r[m];
            rz_new += r[m] * z[m];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int m = 0; m < n; ++m) p[m] = z[m] + beta * p[m];
    }
    if (it >= opts.max_iterations)
        throw IterationLimitError("solve_dirichlet: CG did not converge");

    for (int m = 0; m < n; ++m) out.values[A.node_of[m]] = x[m];
    for (std::size_t idx = 0; idx < g.node_count(); ++idx)
        if (g.node_kind[idx] == 2) out.values[idx] = bval[idx];
    return out;
}

// ============================================================================
// RK45 (Dormand-Prince) on 2-state radial systems
// ============================================================================

namespace {

using State = std::array<double, 2>;

struct OdeSample {
    double r;
    State y;
    State f;
};

/// Integrates y' = f(r, y) from r0 to r1 with dense accepted-step storage.
/// Returns false if the blow-up guard fired (trajectory left the window).
template <typename F>
bool rk45(F&& f, double r0, double r1, State y0, double abs_tol, double rel_tol, double guard,
          std::vector<OdeSample>& out, double max_step = 0.0) {
    // Dormand-Prince 5(4) tableau.
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    double r = r0;
    State y = y0;
    State k1 = f(r, y);
    out.push_back({r, y, k1});
    double hstep = std::min(1e-3, (r1 - r0) * 0.01);
    const double hmin = (r1 - r0) * 1e-15;

    while (r < r1) {
        if (max_step > 0.0) hstep = std::min(hstep, max_step);
        hstep = std::min(hstep, r1 - r);
        State y2, y3, y4, y5, y6, y7;
        for (int i = 0; i < 2; ++i) y2[i] = y[i] + hstep * a21 * k1[i];
        State k2 = f(r + c2 * hstep, y2);
        for (int i = 0; i < 2; ++i) y3[i] = y[i] + hstep * (a31 * k1[i] + a32 * k2[i]);
        State k3 = f(r + c3 * hstep, y3);
        for (int i = 0; i < 2; ++i)
            y4[i] = y[i] + hstep * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        State k4 = f(r + c4 * hstep, y4);
        for (int i = 0; i < 2; ++i)
            y5[i] = y[i] + hstep * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        State k5 = f(r + c5 * hstep, y5);
        for (int i = 0; i < 2; ++i)
            y6[i] = y[i] +
                    hstep * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        State k6 = f(r + hstep, y6);
        for (int i = 0; i < 2; ++i)
            y7[i] = y[i] + hstep * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        State k7 = f(r + hstep, y7);

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double e = hstep * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                      e6 * k6[i] + e7 * k7[i]);
            const double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y7[i]));
            err = std::max(err, std::abs(e) / sc);
        }
        if (err <= 1.0) {
            r += hstep;
            y = y7;
            k1 = k7;  // FSAL
            out.push_back({r, y, k1});
            if (std::abs(y[0]) > guard || !std::isfinite(y[0]) || !std::isfinite(y[1]))
                return false;
        }
        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
        hstep *= fac;
        if (hstep < hmin) return false;
    }
    return true;
}

/// Cubic Hermite read-out of a stored trajectory component.
double dense_eval(const std::vector<OdeSample>& tr, double r, int comp) {
    if (r <= tr.front().r) return tr.front().y[comp];
    if (r >= tr.back().r) return tr.back().y[comp];
    auto it = std::upper_bound(tr.begin(), tr.end(), r,
                               [](double a, const OdeSample& s) { return a < s.r; });
    const OdeSample& s1 = *it;
    const OdeSample& s0 = *(it - 1);
    const double h = s1.r - s0.r;
    const double t = (r - s0.r) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * s0.y[comp] + h * h10 * s0.f[comp] + h01 * s1.y[comp] + h * h11 * s1.f[comp];
}

}  // namespace

// ============================================================================
// Radial Dirichlet solve by superposition: w = r v, -w'' + h w = r f.
// ============================================================================

ScalarFieldRadial solve_dirichlet_radial(const CoefficientH& h,
                                         const std::function<double(double)>& rhs, double R,
                                         const RadialGrid& output_grid) {
    auto homogeneous = [&h](double r, const State& y) -> State {
        return {y[1], h.value_radial(r) * y[0]};
    };
    auto particular = [&h, &rhs](double r, const State& y) -> State {
        return {y[1], h.value_radial(r) * y[0] - r * rhs(r)};
    };
    std::vector<OdeSample> wh, wp;
    if (!rk45(homogeneous, 0.0, R, {0.0, 1.0}, 1e-12, 1e-11, 1e12, wh) ||
        !rk45(particular, 0.0, R, {0.0, 0.0}, 1e-12, 1e-11, 1e12, wp))
        throw NumericError("solve_dirichlet_radial: integration failed");
    const double whR = wh.back().y[0];
    if (std::abs(whR) < 1e-12)
        throw IndefiniteSystemError("solve_dirichlet_radial: operator is singular at this h");
    const double c = -wp.back().y[0] / whR;

    ScalarFieldRadial out;
    out.grid = output_grid;
    out.values.resize(output_grid.size());
    for (int i = 0; i < output_grid.size(); ++i) {
        const double r = output_grid.nodes[i];
        out.values[i] = (dense_eval(wp, r, 0) + c * dense_eval(wh, r, 0)) / r;
    }
    out.origin_value = c;  // v(0) = w'(0)
    return out;
}

// ============================================================================
// Coercivity
// ============================================================================

namespace {

/// Smallest eigenvalue of -w'' + h w on (0, R), w(0) = w(R) = 0, by shifted
/// inverse iteration on the uniform-grid tridiagonal matrix.
double radial_smallest_eigenvalue(const CoefficientH& h, double R, int n, int max_it) {
    const double dr = R / (n + 1);
    std::vector<double> diag(n), sub(n, -1.0 / (dr * dr));
    double hmin = std::numeric_limits<double>::max();
    for (int i = 0; i < n; ++i) {
        const double hv = h.value_radial(dr * (i + 1));
        diag[i] = 2.0 / (dr * dr) + hv;
        hmin = std::min(hmin, hv);
    }
    const double shift = hmin - 1.0;

    std::vector<double> v(n, 1.0), w(n), a(n), b(n, 0.0), c(n, 0.0);
    double lambda = 0.0, lambda_old = 1e300;
    for (int it = 0; it < max_it; ++it) {
        // Thomas solve (T - shift I) w = v.
        for (int i = 0; i < n; ++i) a[i] = diag[i] - shift;
        b.assign(n, 0.0);
        c.assign(n, 0.0);
        b[0] = sub[0] / a[0];
        c[0] = v[0] / a[0];
        for (int i = 1; i < n; ++i) {
            const double m = a[i] - sub[i] * b[i - 1];
            b[i] = sub[i] / m;
            c[i] = (v[i] - sub[i] * c[i - 1]) / m;
        }
        w[n - 1] = c[n - 1];
        for (int i = n - 2; i >= 0; --i) w[i] = c[i] - b[i] * w[i + 1];

        double nrm = 0.0;
        for (double x : w) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (int i = 0; i < n; ++i) v[i] = w[i] / nrm;

        // Rayleigh quotient of T.
        double num = 0.0;
        for (int i = 0; i < n; ++i) {
            double tv = diag[i] * v[i];
            if (i > 0) tv += sub[i] * v[i - 1];
            if (i + 1 < n) tv += sub[i] * v[i + 1];
            num += v[i] * tv;
        }
        lambda = num;
        if (std::abs(lambda - lambda_old) < 1e-12 * std::max(1.0, std::abs(lambda))) break;
        lambda_old = lambda;
    }
    return lambda;
}

}  // namespace

CoercivityReport coercivity_check(const CoefficientH& h, const Domain& domain,
                                  const CoercivityOptions& opts) {
    CoercivityReport rep;
    rep.sobolev_delta =
        opts.sobolev_delta > 0.0 ? opts.sobolev_delta : 3.0 * std::pow(kPi / 2.0, 4.0 / 3.0);

    if (h.is_radial() && domain.is_ball()) {
        rep.smallest_eigenvalue =
            radial_smallest_eigenvalue(h, domain.ball_radius(), opts.radial_nodes,
                                       opts.max_iterations);
    } else {
        auto grid = Grid3D::cover(domain, opts.spacing);
        CompactGrid A(*grid, h);
        const int n = static_cast<int>(A.node_of.size());
        if (n == 0) throw NumericError("coercivity_check: empty grid");
        double hmin = *std::min_element(A.diag_h.begin(), A.diag_h.end());
        const double shift = hmin - 1.0;

        // Inverse power iteration with CG on (A - shift I).
        std::vector<double> v(n, 1.0), w(n);
        auto apply_shifted = [&](const std::vector<double>& in, std::vector<double>& out2) {
            A.apply(in, out2);
            for (int m = 0; m < n; ++m) out2[m] -= shift * in[m];
        };
        std::vector<double> r(n), z(n), p(n), Ap(n), inv_diag(n);
        const double ih2 = 1.0 / (grid->h * grid->h);
        for (int m = 0; m < n; ++m) inv_diag[m] = 1.0 / (6.0 * ih2 + A.diag_h[m] - shift);
        double lambda = 0.0, lambda_old = 1e300;
        for (int outer = 0; outer < 60; ++outer) {
            // CG solve (A - shift) w = v.
            std::fill(w.begin(), w.end(), 0.0);
            r = v;
            for (int m = 0; m < n; ++m) z[m] = inv_diag[m] * r[m];
            p = z;
            double rz = 0.0;
            for (int m = 0; m < n; ++m) rz += r[m] * z[m];
            double bnorm = 0.0;
            for (double x : v) bnorm += x * x;
            bnorm = std::sqrt(bnorm);
            for (int it = 0; it < opts.max_iterations; ++it) {
                apply_shifted(p, Ap);
                double pAp = 0.0;
                for (int m = 0; m < n; ++m) pAp += p[m] * Ap[m];
                if (pAp <= 0.0) throw NumericError("coercivity_check: shifted system indefinite");
                const double alpha = rz / pAp;
                double rn = 0.0;
                for (int m = 0; m < n; ++m) {
                    w[m] += alpha * p[m];
                    r[m] -= alpha * Ap[m];
                    rn += r[m] * r[m];
                }
                if (std::sqrt(rn) <= 1e-9 * bnorm) break;
                double rz_new = 0.0;
                for (int m = 0; m < n; ++m) {
                    z[m] = inv_diag[m] * r[m];
                    rz_new += r[m] * z[m];
                }
                const double beta = rz_new / rz;
                rz = rz_new;
                for (int m = 0; m < n; ++m) p[m] = z[m] + beta * p[m];
            }
            double nrm = 0.0;
            for (double x : w) nrm += x * x;
            nrm = std::sqrt(nrm);
            for (int m = 0; m < n; ++m) v[m] = w[m] / nrm;
            A.apply(v, Ap);
            double num = 0.0;
            for (int m = 0; m < n; ++m) num += v[m] * Ap[m];
            lambda = num;
            if (std::abs(lambda - lambda_old) < 1e-10 * std::max(1.0, std::abs(lambda))) break;
            lambda_old = lambda;
        }
        rep.smallest_eigenvalue = lambda;
    }

    rep.coercive = rep.smallest_eigenvalue > 0.0;

    // Sufficient condition ||h_-||_{3/2} < delta; reported alongside, never
    // used as a disproof.
    FieldView hm{[&h](const Vec3& x) {
                     const double v = h.value(x);
                     return v < 0.0 ? std::pow(-v, 1.5) : 0.0;
                 },
                 nullptr};
    const double integral = volume_integral(hm, domain, 128, SphereRule::coarse());
    rep.h_minus_l32 = std::pow(std::max(integral, 0.0), 2.0 / 3.0);
    rep.sufficient_l32_bound = rep.h_minus_l32 < rep.sobolev_delta;
    return rep;
}

// ============================================================================
// Radial shooting: u'' + (2/r) u' = h u - u^5 (analyst Delta u + h u = u^5).
// ============================================================================

ShootResult radial_shoot(const CoefficientH& h, double a, const ShootOptions& opts) {
    if (a <= 0.0) throw NumericError("radial_shoot: initial height must be positive");
    const double h0 = h.value_radial(0.0);

    auto f = [&h](double r, const State& y) -> State {
        const double nl = h.value_radial(r) * y[0] - y[0] * y[0] * y[0] * y[0] * y[0];
        if (r == 0.0) return {y[1], nl / 3.0};
        return {y[1], nl - 2.0 * y[1] / r};
    };

    // Series start past the coordinate singularity: u = a + (h(0)a - a^5) r^2/6.
    const double curvature = h0 * a - a * a * a * a * a;
    const double feature = std::abs(curvature) > 0.0
                               ? std::sqrt(6.0 * std::abs(a / curvature))
                               : opts.r_end;
    const double r0 = std::min({1e-6, 1e-3 * feature, 0.5 * opts.r_end});
    State y{a + curvature * r0 * r0 / 6.0, curvature * r0 / 3.0};

    std::vector<OdeSample> tr;
    const bool ok = rk45(f, r0, opts.r_end, y, opts.abs_tol, opts.rel_tol, opts.blowup_guard, tr,
                         opts.max_step);

    ShootResult res;
    res.diverged = !ok;
    res.endpoint_value = tr.back().y[0];
    res.endpoint_derivative = tr.back().y[1];
    // Positivity on the open interval: the endpoint may graze zero (that is
    // exactly the Dirichlet root the bisection hunts for).
    bool positive = a > 0.0;
    for (const auto& s : tr)
        if (s.r < opts.r_end * (1.0 - 1e-12) && s.y[0] <= 0.0) positive = false;
    res.stayed_positive = positive && ok;

    std::vector<double> nodes;
    std::vector<double> vals;
    if (opts.dense_output_nodes > 0) {
        const int n = opts.dense_output_nodes;
        nodes.resize(n);
        vals.resize(n);
        for (int i = 0; i < n; ++i) {
            nodes[i] = opts.r_end * (i + 1.0) / n;
            vals[i] = dense_eval(tr, nodes[i], 0);
        }
    } else {
        nodes.reserve(tr.size());
        vals.reserve(tr.size());
        for (const auto& s : tr) {
            if (s.r <= 0.0) continue;
            if (!nodes.empty() && s.r <= nodes.back()) continue;
            nodes.push_back(s.r);
            vals.push_back(s.y[0]);
        }
    }
    if (nodes.size() >= 3) {
        res.profile.grid = RadialGrid::from_nodes(std::move(nodes));
        res.profile.values = std::move(vals);
        res.profile.origin_value = a;
    }
    return res;
}

RadialSolveOutcome find_radial_solution(const CoefficientH& h, const RadialSolveOptions& opts) {
    RadialSolveOutcome outcome;
    const double la = std::log(opts.a_min), lb = std::log(opts.a_max);

    auto endpoint = [&](double a) -> SweepProbe {
        ShootOptions so = opts.shoot;
        so.dense_output_nodes = 0;
        ShootResult r = radial_shoot(h, a, so);
        return {a, r.endpoint_value, r.diverged};
    };

    outcome.sweep_log.reserve(opts.probes);
    for (int i = 0; i < opts.probes; ++i) {
        const double a = std::exp(la + (lb - la) * i / (opts.probes - 1.0));
        outcome.sweep_log.push_back(endpoint(a));
    }

    for (std::size_t i = 0; i + 1 < outcome.sweep_log.size(); ++i) {
        const auto& p0 = outcome.sweep_log[i];
        const auto& p1 = outcome.sweep_log[i + 1];
        if (p0.diverged || p1.diverged) continue;
        if (p0.endpoint_value == 0.0 || p0.endpoint_value * p1.endpoint_value > 0.0) continue;

        double lo = p0.height, hi = p1.height;
        double flo = p0.endpoint_value;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const SweepProbe pm = endpoint(mid);
            if (pm.diverged) break;
            if (std::abs(pm.endpoint_value) < opts.root_tol * std::max(1.0, mid) ||
                hi - lo < 1e-15 * mid) {
                lo = hi = mid;
                break;
            }
            if (flo * pm.endpoint_value <= 0.0) {
                hi = mid;
            } else {
                lo = mid;
                flo = pm.endpoint_value;
            }
        }
        const double root = 0.5 * (lo + hi);
        // Dense, step-capped final profile: downstream quadrature and FD
        // consumers read it through interpolation.
        ShootOptions so = opts.shoot;
        so.dense_output_nodes = 8192;
        so.max_step = 2e-3;
        ShootResult sr = radial_shoot(h, root, so);
        if (!sr.stayed_positive) continue;  // zero crossed inside: not a positive solution
        outcome.solution = sr.profile;
        outcome.root_height = root;
        outcome.boundary_derivative = sr.endpoint_derivative;
        return outcome;
    }
    return outcome;  // NotFound with the sweep log
}

}  // namespace poholab
