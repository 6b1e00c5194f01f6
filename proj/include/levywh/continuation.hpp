#ifndef LEVYWH_CONTINUATION_HPP
#define LEVYWH_CONTINUATION_HPP

// Tracking roots of (q0 + iu) + Psi(i zeta) = 0 as u grows: embedded
// Cash-Karp 4(5) integration of d zeta/du = -1 / Psi'(i zeta), with a Newton
// polish after every accepted step and a pairwise collision monitor at the
// checkpoints.

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "models.hpp"
#include "roots.hpp"

namespace levywh {

struct StepControl {
    double rel_tol = 1e-8;
    double h_init = 1e-2;
    double h_min = 1e-12;
    double collision_tol = 1e-6;
    double checkpoint_du = 0.5;
};

struct ComplexRootPath {
    double q0 = 0.0;
    std::vector<double> u_grid;
    // path order: [zeta0-, zeta0+, zeta_1..zeta_N, zeta_{-1}..zeta_{-N}]
    std::vector<int> labels; // 0 -> zeta0-, 1 -> zeta0+, n>=2 encodes +-(n-1)
    std::vector<std::vector<Complex>> paths;
    double max_residual = 0.0;      // max |q + Psi(i zeta)| over all checkpoints
    double max_rel_residual = 0.0;  // same, normalized by (1 + |q|)

    std::size_t n_paths() const { return paths.size(); }
    static int label_pos(int n) { return n >= 1 ? 1 + n : 1 - n; } // index of zeta_n
};

namespace detail {

inline Complex path_velocity(const ProcessModel& m, const Complex& q, const Complex& z) {
    (void)q;
    const Complex G = dpsi_izeta(m, z); // d Psi(i zeta) / d zeta
    return Complex(0.0, -1.0) / G;
}

inline bool newton_polish(const ProcessModel& m, const Complex& q, Complex* zeta,
                          double tol, int max_it = 12) {
    for (int it = 0; it < max_it; ++it) {
        const Complex F = q + psi_izeta(m, *zeta);
        if (std::abs(F) <= tol) return true;
        const Complex G = dpsi_izeta(m, *zeta);
        if (std::abs(G) < 1e-300) return false;
        *zeta -= F / G;
    }
    return std::abs(q + psi_izeta(m, *zeta)) <= tol;
}

// One adaptive Cash-Karp segment from u to u_end.
inline void ck45_segment(const ProcessModel& m, double q0, double u, double u_end,
                         Complex* zeta, const StepControl& sc) {
    static const double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
    static const double b21 = 0.2;
    static const double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
    static const double b41 = 0.3, b42 = -0.9, b43 = 1.2;
    static const double b51 = -11.0 / 54.0, b52 = 2.5, b53 = -70.0 / 27.0,
                        b54 = 35.0 / 27.0;
    static const double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0,
                        b63 = 575.0 / 13824.0, b64 = 44275.0 / 110592.0,
                        b65 = 253.0 / 4096.0;
    static const double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                        c6 = 512.0 / 1771.0;
    static const double d1 = 2825.0 / 27648.0, d3 = 18575.0 / 48384.0,
                        d4 = 13525.0 / 55296.0, d5 = 277.0 / 14336.0, d6 = 0.25;
    (void)a2; (void)a3; (void)a4; (void)a5; (void)a6;
    double h = std::min(sc.h_init, u_end - u);
    Complex z = *zeta;
    while (u < u_end) {
        h = std::min(h, u_end - u);
        const Complex q(q0, u);
        const Complex k1 = path_velocity(m, q, z);
        const Complex k2 = path_velocity(m, Complex(q0, u + a2 * h), z + h * (b21 * k1));
        const Complex k3 =
            path_velocity(m, Complex(q0, u + a3 * h), z + h * (b31 * k1 + b32 * k2));
        const Complex k4 = path_velocity(m, Complex(q0, u + a4 * h),
                                         z + h * (b41 * k1 + b42 * k2 + b43 * k3));
        const Complex k5 =
            path_velocity(m, Complex(q0, u + a5 * h),
                          z + h * (b51 * k1 + b52 * k2 + b53 * k3 + b54 * k4));
        const Complex k6 = path_velocity(
            m, Complex(q0, u + a6 * h),
            z + h * (b61 * k1 + b62 * k2 + b63 * k3 + b64 * k4 + b65 * k5));
        const Complex z5 = z + h * (c1 * k1 + c3 * k3 + c4 * k4 + c6 * k6);
        const Complex z4 = z + h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6);
        const double err = std::abs(z5 - z4);
        const double tol = sc.rel_tol * (std::abs(z) + 1.0);
        if (err <= tol || h <= sc.h_min) {
            u += h;
            z = z5;
            Complex zc = z;
            if (newton_polish(m, Complex(q0, u), &zc, 1e-10 * (1.0 + std::hypot(q0, u))))
                z = zc;
        }
        const double fac = (err > 0.0) ? 0.9 * std::pow(tol / err, 0.2) : 4.0;
        h *= std::min(4.0, std::max(0.1, fac));
        if (h < sc.h_min)
            throw StiffnessError("continue_complex_q: step size underflow");
    }
    *zeta = z;
}

} // namespace detail

inline ComplexRootPath continue_complex_q(const ProcessModel& model,
                                          const RootGrid& grid, double u_max,
                                          const StepControl& sc = {}) {
    if (!(u_max > 0.0)) throw DomainError("continue_complex_q: u_max must be > 0");
    ComplexRootPath cp;
    cp.q0 = grid.q;
    const int N = grid.N;
    const std::size_t P = 2 + 2 * static_cast<std::size_t>(N);
    std::vector<Complex> z(P);
    z[0] = Complex(grid.zero_minus.zeta, 0.0);
    z[1] = Complex(grid.zero_plus.zeta, 0.0);
    cp.labels.assign(P, 0);
    cp.labels[1] = 1;
    for (int n = 1; n <= N; ++n) {
        z[1 + static_cast<std::size_t>(n)] = Complex(grid.pos[n - 1].zeta, 0.0);
        z[1 + static_cast<std::size_t>(N + n)] = Complex(grid.neg[n - 1].zeta, 0.0);
        cp.labels[1 + static_cast<std::size_t>(n)] = n;
        cp.labels[1 + static_cast<std::size_t>(N + n)] = -n;
    }
    const std::size_t n_checks =
        static_cast<std::size_t>(std::ceil(u_max / sc.checkpoint_du));
    cp.u_grid.resize(n_checks + 1);
    cp.paths.assign(P, std::vector<Complex>(n_checks + 1));
    for (std::size_t p = 0; p < P; ++p) cp.paths[p][0] = z[p];
    cp.u_grid[0] = 0.0;
    for (std::size_t j = 1; j <= n_checks; ++j) {
        const double u0 = cp.u_grid[j - 1];
        const double u1 = std::min(u_max, u0 + sc.checkpoint_du);
        cp.u_grid[j] = u1;
        for (std::size_t p = 0; p < P; ++p) {
            detail::ck45_segment(model, grid.q, u0, u1, &z[p], sc);
            const Complex q(grid.q, u1);
            const double floor = 16.0 * std::numeric_limits<double>::epsilon() *
                                 (std::abs(z[p]) + 1.0) *
                                 (std::abs(dpsi_izeta(model, z[p])) + 1.0);
            if (!detail::newton_polish(model, q, &z[p],
                                       std::max(1e-10 * (1.0 + std::abs(q)), floor))) {
                throw ConvergenceError(
                    "continue_complex_q: Newton correction failed along a path");
            }
            const double res = std::abs(q + psi_izeta(model, z[p]));
            cp.max_residual = std::max(cp.max_residual, res);
            cp.max_rel_residual = std::max(cp.max_rel_residual, res / (1.0 + std::abs(q)));
            cp.paths[p][j] = z[p];
        }
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t k = i + 1; k < P; ++k)
                if (std::abs(z[i] - z[k]) < sc.collision_tol)
                    throw CollisionError(
                        "continue_complex_q: two root paths within collision tolerance");
    }
    return cp;
}

} // namespace levywh

#endif
