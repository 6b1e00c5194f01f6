#ifndef LEVYWH_ROOTS_HPP
#define LEVYWH_ROOTS_HPP

// Solving q + Psi(i zeta) = 0 for real q: localization intervals, asymptotic
// seeds, bisection + Newton refinement, and the inverse-power-sum diagnostics.
//
// Roots are carried as (cell, offset) pairs: offset is the distance from the
// pole-side end of the localization cell. The reduced evaluators in
// models.hpp take the offset exactly, so residuals are meaningful even when
// zeta itself is in the thousands and hugging a pole.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "detail/em_tail.hpp"
#include "detail/threads.hpp"
#include "errors.hpp"
#include "models.hpp"

namespace levywh {

struct Interval {
    double lo = 0.0, hi = 0.0;
};

struct Localization {
    Interval zero_minus, zero_plus;
    std::vector<Interval> pos, neg; // [k] holds the cell of zeta_{k+1} / zeta_{-(k+1)}
};

namespace detail {

inline void check_q(const ProcessModel& m, double q) {
    if (!std::isfinite(q) || q < 0.0) throw DomainError("q must be >= 0");
    if (q == 0.0 && !(mean_x1(m) < 0.0))
        throw DomainError(
            "q=0 requires a process with negative mean (E X_1 < 0): "
            "alpha<0 for sech_poisson, mu<0 otherwise");
}

// eta = (2/pi) arccos(pi / (q + Lambda)); also valid at q=0 with alpha<0,
// where it reduces to |alpha|.
inline double sech_eta(const SechPoissonModel& m, double q) {
    return (2.0 / pi) * std::acos(pi / (q + m.jump_rate));
}

inline double sech_root(const SechPoissonModel& m, double q, int n) {
    const double eta = sech_eta(m, q);
    if (n == 0) return m.alpha; // not a root; callers use the 0+/0- forms
    const int a = std::abs(n);
    const int k = (a + 1) / 2;
    const double off = (a % 2 == 1) ? -eta : eta; // zeta_{2k-1} = alpha+4k-eta
    return n > 0 ? m.alpha + 4.0 * k + off : m.alpha - 4.0 * k - off;
}

} // namespace detail

// Localization: 2N+2 disjoint open intervals, one per root, interlacing the
// pole lattice of Psi(i zeta) (closed-form lattice for the sech model).
inline Localization localize(const ProcessModel& model, double q, int N) {
    detail::check_q(model, q);
    if (N < 0) throw DomainError("localize: N must be >= 0");
    Localization L;
    L.pos.resize(N);
    L.neg.resize(N);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SechPoissonModel>) {
                L.zero_minus = {m.alpha - 1.0, 0.0};
                L.zero_plus = {0.0, m.alpha + 1.0};
                for (int n = 1; n <= N; ++n) {
                    const int k = (n + 1) / 2;
                    const double base = m.alpha + 4.0 * k;
                    L.pos[n - 1] = (n % 2 == 1) ? Interval{base - 1.0, base}
                                                : Interval{base, base + 1.0};
                    const double nbase = m.alpha - 4.0 * k;
                    L.neg[n - 1] = (n % 2 == 1) ? Interval{nbase, nbase + 1.0}
                                                : Interval{nbase - 1.0, nbase};
                }
            } else if constexpr (std::is_same_v<T, SinhSquareModel>) {
                L.zero_minus = {m.alpha - 1.0, 0.0};
                L.zero_plus = {0.0, m.alpha + 1.0};
                for (int n = 1; n <= N; ++n) {
                    L.pos[n - 1] = {n + m.alpha, n + m.alpha + 1.0};
                    L.neg[n - 1] = {-n + m.alpha - 1.0, -n + m.alpha};
                }
            } else {
                if (!(m.s1.c > 0.0 && m.s2.c > 0.0))
                    throw DomainError(
                        "beta_family root grid requires two-sided jumps (c1 > 0 and c2 > 0)");
                L.zero_minus = {-m.s1.b * m.s1.a, 0.0};
                L.zero_plus = {0.0, m.s2.b * m.s2.a};
                for (int n = 1; n <= N; ++n) {
                    L.pos[n - 1] = {m.s2.b * (m.s2.a + n - 1.0), m.s2.b * (m.s2.a + n)};
                    L.neg[n - 1] = {m.s1.b * (-m.s1.a - n), m.s1.b * (-m.s1.a - n + 1.0)};
                }
            }
        },
        model);
    if (q == 0.0) L.zero_plus = {0.0, 0.0};
    return L;
}

// ---------------------------------------------------------- asymptotic seeds

// Newton seed from the large-|n| expansion of the root equation. Throws
// DomainError in regimes with no usable expansion (sigma=0 beta family with
// lambda1=2, or lambda2=2 with lambda1<2, or vanishing rho); callers fall
// back to interval midpoints.
inline double asymptotic_root(const ProcessModel& model, double q, int n) {
    if (n == 0) throw DomainError("asymptotic_root: n must be nonzero");
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SechPoissonModel>) {
                return detail::sech_root(m, q, n);
            } else if constexpr (std::is_same_v<T, SinhSquareModel>) {
                const double nu = n + m.alpha;
                if (m.sigma != 0.0) {
                    const double W1 = 8.0 / (m.sigma * m.sigma);
                    const double W2 = -W1 * (2.0 * m.rho_c / (m.sigma * m.sigma) + m.alpha);
                    return nu + W1 / nu + W2 / (nu * nu);
                }
                const double rho = m.rho_c;
                if (std::abs(rho) < 1e-8)
                    throw DomainError("asymptotic_root: sigma=0 with rho ~ 0 not covered");
                const double g4q = 4.0 * m.gamma_c - q;
                auto one_side = [&](double alpha, double r, double n_abs) {
                    const double w0 =
                        (0.5 * detail::pi - std::atan(r / (4.0 * detail::pi))) / detail::pi;
                    const double c0 = -4.0 * (g4q + alpha * r) /
                                      (16.0 * detail::pi * detail::pi + r * r);
                    const double M = n_abs + alpha + w0;
                    return M + c0 / M -
                           (c0 / r) * (g4q - 4.0 * detail::pi * detail::pi * c0) / (M * M);
                };
                if (n > 0) return one_side(m.alpha, rho, n);
                return -one_side(-m.alpha, -rho, -n);
            } else {
                // beta family
                auto side_sigma = [&](const BetaSide& s, double n_abs) {
                    const double nu = n_abs - 1.0 + s.a;
                    const double corr = 2.0 * s.c /
                                        (m.sigma * m.sigma * s.b * s.b *
                                         std::tgamma(s.lam)) *
                                        std::pow(nu, s.lam - 3.0);
                    return s.b * nu + corr;
                };
                auto side_zero = [&](const BetaSide& s2, const BetaSide& s1, double rho,
                                     double n_abs) {
                    // positive-side sigma=0 expansion for the (possibly
                    // reflected) model with sides (s1, s2) and drift constant rho
                    const double l1 = s1.lam, l2 = s2.lam;
                    if (std::abs(l1 - 2.0) <= 1e-9 || (l1 < 2.0 && std::abs(l2 - 2.0) <= 1e-9))
                        throw DomainError(
                            "asymptotic_root: no large-n expansion for this sigma=0 regime");
                    if (std::abs(rho) < 1e-8)
                        throw DomainError("asymptotic_root: sigma=0 with rho ~ 0 not covered");
                    double w0 = 0.0, A = 0.0, lam = 0.0;
                    if (l1 < 2.0 && l2 < 2.0) {
                        w0 = 0.0;
                        A = s2.c / (rho * s2.b * std::tgamma(l2));
                        lam = l2 - 2.0;
                    } else if (l1 < 2.0 && l2 > 2.0) {
                        w0 = 2.0 - l2;
                        A = -std::sin(detail::pi * l2) * std::pow(s2.b, 3) * rho /
                            (detail::pi * s2.c * std::tgamma(1.0 - l2));
                        lam = 2.0 - l2;
                    } else if (l2 < l1) {
                        w0 = 0.0;
                        A = s2.c * std::pow(s1.b, l1) /
                            (s1.c * std::pow(s2.b, l1 - 1.0) * std::tgamma(1.0 - l1) *
                             std::tgamma(l2));
                        lam = l2 - l1;
                    } else if (l2 > l1) {
                        w0 = 2.0 - l2;
                        A = -(std::sin(detail::pi * l2) / detail::pi) * s1.c *
                            std::pow(s2.b, l1 + 1.0) * std::tgamma(1.0 - l1) /
                            (s2.c * std::pow(s1.b, l1) * std::tgamma(1.0 - l2));
                        lam = l1 - l2;
                    } else { // l1 == l2 > 2
                        const double x0 =
                            std::atan(std::sin(detail::pi * l2) /
                                      (s1.c * std::pow(s2.b, l2) * std::tgamma(1.0 - l1) /
                                           (s2.c * std::pow(s1.b, l1) *
                                            std::tgamma(1.0 - l2)) -
                                       std::cos(detail::pi * l2))) /
                            detail::pi;
                        w0 = x0;
                        A = -rho * std::sin(detail::pi * x0) * std::sin(detail::pi * x0) /
                            (detail::pi * detail::pi) * std::pow(s2.b, 3) / s2.c *
                            std::tgamma(l2);
                        lam = 2.0 - l2;
                    }
                    const double M = n_abs + s2.a + w0;
                    return s2.b * M + A * std::pow(M, lam);
                };
                if (m.sigma != 0.0) {
                    if (n > 0) return side_sigma(m.s2, n);
                    return -side_sigma(m.s1, -n);
                }
                if (!m.rho_c)
                    throw DomainError(
                        "asymptotic_root: no large-n expansion for this sigma=0 regime");
                if (n > 0) return side_zero(m.s2, m.s1, *m.rho_c, n);
                return -side_zero(m.s1, m.s2, -*m.rho_c, -n);
            }
        },
        model);
}

// ------------------------------------------------------------- grid solving

struct RootRep {
    double zeta = 0.0;
    int cell = 0;        // 0: plain parametrization, offset == zeta
    double offset = 0.0; // distance into the cell from its pole-side end
    double residual = 0.0;
};

struct RootGrid {
    ProcessModel model;
    double q = 0.0;
    int N = 0;
    RootRep zero_minus, zero_plus;
    std::vector<RootRep> pos, neg; // [k] = zeta_{k+1} / zeta_{-(k+1)}
    Localization loc;

    double zeta(int n) const {
        if (n > 0) return pos.at(static_cast<std::size_t>(n) - 1).zeta;
        if (n < 0) return neg.at(static_cast<std::size_t>(-n) - 1).zeta;
        throw DomainError("RootGrid::zeta: n must be nonzero");
    }
};

namespace detail {

// Cell evaluations: F(q + Psi(i zeta)) with zeta parametrized by the offset t
// from the pole-side end of cell m (see header comment).

inline double sinh_cell_zeta(const SinhSquareModel& m, int side, int cell, double t) {
    return side > 0 ? cell + m.alpha + t : -cell + m.alpha - t;
}

inline double sinh_cell_f(const SinhSquareModel& m, double q, int side, int cell,
                          double t) {
    const double zeta = sinh_cell_zeta(m, side, cell, t);
    const double ct = cotpi_real(t);
    return q - 0.5 * m.sigma * m.sigma * zeta * zeta - m.rho_c * zeta +
           4.0 * pi * (cell + t) * ct - 4.0 * m.gamma_c;
}

inline double sinh_cell_df(const SinhSquareModel& m, int side, int cell, double t) {
    const double zeta = sinh_cell_zeta(m, side, cell, t);
    const double ct = cotpi_real(t);
    const double dz = side > 0 ? 1.0 : -1.0;
    return dz * (-m.sigma * m.sigma * zeta - m.rho_c) + 4.0 * pi * ct -
           4.0 * pi * pi * (cell + t) * (1.0 + ct * ct);
}

// B(x; 1-lam) at x = -k - t, k >= 0 integer, t in (0,1), via reflection with
// the integer part carried exactly.
inline double beta_B_reduced(int k, double t, double lam) {
    // the lgamma difference of two ~k-sized arguments needs extended precision
    // (double lgamma alone leaves ~|lnGamma| * eps absolute error in the log)
    const long double d = std::lgamma(static_cast<long double>(lam) + k + t) -
                          std::lgamma(1.0L + k + t);
    const double g_ratio = static_cast<double>(std::exp(d));
    return -std::tgamma(1.0 - lam) * sinpi_real(1.0 - lam - t) / sinpi_real(t) * g_ratio;
}

inline double digamma_reduced(int k, double t) {
    // psi(-k - t) = psi(1 + k + t) + pi cot(pi t)
    return digamma(Complex(1.0 + k + t, 0.0)).real() + pi * cotpi_real(t);
}

inline double trigamma_reduced(int k, double t) {
    // psi'(-k - t) = -psi'(1 + k + t) + pi^2 / sin^2(pi t)
    const double s = sinpi_real(t);
    return -trigamma_positive(1.0 + k + t) + pi * pi / (s * s);
}

// digamma(x + 1 - lam) at x = -k - t (needed by the generic derivative):
// argument w = 1 - lam - k - t; psi(w) = psi(1-w) - pi cot(pi w),
// cot(pi w) = cot(pi (1 - lam - t)) after dropping the integer -k.
inline double digamma_reduced_shift(int k, double t, double lam) {
    return digamma(Complex(lam + k + t, 0.0)).real() - pi * cotpi_real(1.0 - lam - t);
}

// J of the reduced side (the side whose pole lattice the cell lives on),
// evaluated at x = -k - t.
inline double beta_J_reduced(const BetaSide& s, int side_sign, double zeta, int k,
                             double t) {
    const double lin = zeta / (s.b * s.b);
    switch (s.lc) {
        case LambdaCase::generic: {
            const double Bx = beta_B_reduced(k, t, s.lam);
            return (Bx - s.B) / s.b - side_sign * lin * s.B * s.psi_diff;
        }
        case LambdaCase::one: {
            const double D = digamma_reduced(k, t) - digamma(Complex(s.a, 0.0)).real();
            return -D / s.b + side_sign * lin * s.trig;
        }
        case LambdaCase::two: {
            const double D = digamma_reduced(k, t) - digamma(Complex(s.a, 0.0)).real();
            if (side_sign > 0)
                return -(1.0 - s.a - zeta / s.b) * D / s.b + lin * (1.0 - s.a) * s.trig;
            return -(1.0 - s.a + zeta / s.b) * D / s.b - lin * (1.0 - s.a) * s.trig;
        }
    }
    return 0.0;
}

inline double beta_dJ_reduced(const BetaSide& s, int side_sign, double zeta, int k,
                              double t) {
    const double b2 = s.b * s.b;
    switch (s.lc) {
        case LambdaCase::generic: {
            const double Bx = beta_B_reduced(k, t, s.lam);
            const double dBx =
                Bx * (digamma_reduced(k, t) - digamma_reduced_shift(k, t, s.lam));
            return side_sign * (dBx - s.B * s.psi_diff) / b2;
        }
        case LambdaCase::one:
            return side_sign * (-trigamma_reduced(k, t) + s.trig) / b2;
        case LambdaCase::two: {
            const double D = digamma_reduced(k, t) - digamma(Complex(s.a, 0.0)).real();
            const double Tx = trigamma_reduced(k, t);
            if (side_sign > 0)
                return (D - (1.0 - s.a - zeta / s.b) * Tx) / b2 + (1.0 - s.a) * s.trig / b2;
            return (-D + (1.0 - s.a + zeta / s.b) * Tx) / b2 - (1.0 - s.a) * s.trig / b2;
        }
    }
    return 0.0;
}

inline double beta_cell_zeta(const BetaFamilyModel& m, int side, int cell, double t) {
    if (side > 0) return m.s2.b * (m.s2.a + cell - 1.0 + t);
    return -m.s1.b * (m.s1.a + cell - 1.0 + t);
}

inline double beta_cell_f(const BetaFamilyModel& m, double q, int side, int cell,
                          double t) {
    const double zeta = beta_cell_zeta(m, side, cell, t);
    const int k = cell - 1;
    double J1, J2;
    if (side > 0) {
        J1 = beta_J(m.s1, +1, Complex(zeta, 0.0)).real();
        J2 = beta_J_reduced(m.s2, -1, zeta, k, t);
    } else {
        J1 = beta_J_reduced(m.s1, +1, zeta, k, t);
        J2 = beta_J(m.s2, -1, Complex(zeta, 0.0)).real();
    }
    return q - 0.5 * m.sigma * m.sigma * zeta * zeta + m.mu * zeta - m.s1.c * J1 -
           m.s2.c * J2;
}

inline double beta_cell_df(const BetaFamilyModel& m, int side, int cell, double t) {
    const double zeta = beta_cell_zeta(m, side, cell, t);
    const int k = cell - 1;
    double dJ1, dJ2;
    if (side > 0) {
        dJ1 = beta_dJ(m.s1, +1, Complex(zeta, 0.0)).real();
        dJ2 = beta_dJ_reduced(m.s2, -1, zeta, k, t);
    } else {
        dJ1 = beta_dJ_reduced(m.s1, +1, zeta, k, t);
        dJ2 = beta_dJ(m.s2, -1, Complex(zeta, 0.0)).real();
    }
    const double dz = side > 0 ? m.s2.b : -m.s1.b;
    return dz * (-m.sigma * m.sigma * zeta + m.mu - m.s1.c * dJ1 - m.s2.c * dJ2);
}

struct CellFn {
    const ProcessModel* model;
    double q;
    int side; // +1 positive roots, -1 negative roots
    int cell; // 1-based |n|
    double f(double t) const {
        if (const auto* s = std::get_if<SinhSquareModel>(model))
            return sinh_cell_f(*s, q, side, cell, t);
        return beta_cell_f(std::get<BetaFamilyModel>(*model), q, side, cell, t);
    }
    double df(double t) const {
        if (const auto* s = std::get_if<SinhSquareModel>(model))
            return sinh_cell_df(*s, side, cell, t);
        return beta_cell_df(std::get<BetaFamilyModel>(*model), side, cell, t);
    }
    double zeta(double t) const {
        if (const auto* s = std::get_if<SinhSquareModel>(model))
            return sinh_cell_zeta(*s, side, cell, t);
        return beta_cell_zeta(std::get<BetaFamilyModel>(*model), side, cell, t);
    }
};

// Bracket a sign change of g on (lo, hi), insetting geometrically from the
// open ends (g blows up at both).
template <class G>
inline bool bracket_open(G&& g, double lo, double hi, double* a, double* b) {
    const double w = hi - lo;
    double eps = 1e-6;
    for (int k = 0; k < 40; ++k) {
        const double x1 = lo + eps * w, x2 = hi - eps * w;
        const double g1 = g(x1), g2 = g(x2);
        if (std::isfinite(g1) && std::isfinite(g2) && g1 * g2 < 0.0) {
            *a = x1;
            *b = x2;
            return true;
        }
        eps *= 0.25;
        if (eps < 1e-15) break;
    }
    // last resort: scan
    const int K = 257;
    double px = lo + 1e-9 * w, pg = g(px);
    for (int i = 1; i < K; ++i) {
        const double x = lo + w * (static_cast<double>(i) / K);
        const double gx = g(x);
        if (std::isfinite(pg) && std::isfinite(gx) && pg * gx < 0.0) {
            *a = px;
            *b = x;
            return true;
        }
        px = x;
        pg = gx;
    }
    return false;
}

template <class G>
inline double bisect_to(G&& g, double a, double b, double width) {
    double ga = g(a);
    while (b - a > width) {
        const double m = 0.5 * (a + b);
        const double gm = g(m);
        if ((ga < 0.0) == (gm < 0.0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

struct NewtonResult {
    double x = 0.0;
    double residual = 0.0;
    bool step_converged = false;
};

// Newton constrained to (lo, hi) with bisection fallback.
template <class G, class DG>
inline NewtonResult newton_in(G&& g, DG&& dg, double seed, double lo, double hi,
                              double f_tol) {
    double x = seed;
    if (!(x > lo && x < hi)) x = bisect_to(g, lo + 1e-12 * (hi - lo), hi - 1e-12 * (hi - lo), 1e-3 * (hi - lo));
    NewtonResult r;
    double prev_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 80; ++it) {
        const double fx = g(x);
        r.x = x;
        r.residual = std::abs(fx);
        if (r.residual <= f_tol) return r;
        const double d = dg(x);
        double step = (d != 0.0) ? fx / d : std::numeric_limits<double>::infinity();
        double xn = x - step;
        if (!(xn > lo && xn < hi) || !std::isfinite(xn)) {
            // re-bracket around the best estimate and try again
            double a, b;
            if (!bracket_open(g, lo, hi, &a, &b)) break;
            x = bisect_to(g, a, b, 1e-6 * (hi - lo));
            continue;
        }
        const double sz = std::abs(xn - x);
        x = xn;
        if (sz <= 4.0 * std::numeric_limits<double>::epsilon() *
                      std::max(std::abs(x), 1e-3) &&
            prev_step <= 8.0 * std::numeric_limits<double>::epsilon() *
                             std::max(std::abs(x), 1e-3)) {
            r.x = x;
            r.residual = std::abs(g(x));
            r.step_converged = true;
            return r;
        }
        prev_step = sz;
    }
    r.residual = std::abs(g(r.x));
    r.step_converged = false;
    return r;
}

} // namespace detail

struct SolveOptions {
    int n_min = 5;      // first index solved from an asymptotic seed
    int threads = 1;
    bool strict_residuals = true; // enforce 1e-10 (1+q) on the requested grid
};

namespace detail {

inline RootRep solve_plain(const ProcessModel& model, double q, const Interval& iv,
                           const char* what) {
    auto g = [&](double z) { return q + psi_izeta(model, Complex(z, 0.0)).real(); };
    auto dg = [&](double z) { return dpsi_izeta(model, Complex(z, 0.0)).real(); };
    double a, b;
    if (!bracket_open(g, iv.lo, iv.hi, &a, &b))
        throw ConvergenceError(std::string("solve_real_q: failed to bracket ") + what);
    const double seed = bisect_to(g, a, b, 1e-3 * (iv.hi - iv.lo));
    auto r = newton_in(g, dg, seed, iv.lo, iv.hi, 0.0);
    RootRep rep;
    rep.zeta = r.x;
    rep.cell = 0;
    rep.offset = r.x;
    rep.residual = r.residual;
    if (!(r.residual <= 1e-10 * (1.0 + q)) && !r.step_converged)
        throw ConvergenceError(std::string("solve_real_q: ") + what + " did not converge");
    return rep;
}

inline RootRep solve_cell(const ProcessModel& model, double q, int side, int cell,
                          int n_min, bool strict) {
    CellFn fn{&model, q, side, cell};
    auto g = [&](double t) { return fn.f(t); };
    auto dg = [&](double t) { return fn.df(t); };
    double seed = -1.0;
    if (cell >= n_min) {
        // asymptotic seed, snapped into this cell if an index-shifted
        // prediction lands here instead
        for (int shift = 0; shift <= 2 && seed < 0.0; ++shift) {
            for (int s2 = (shift == 0 ? 0 : -1); s2 <= 1 && seed < 0.0; s2 += 2) {
                const int idx = side * (cell + (shift == 0 ? 0 : s2 * shift));
                if (idx * side < 1) continue;
                double za;
                try {
                    za = asymptotic_root(model, q, idx);
                } catch (const DomainError&) {
                    shift = 3; // regime without seeds: bisection only
                    break;
                }
                double t = 0.0;
                if (const auto* s = std::get_if<SinhSquareModel>(&model))
                    t = side > 0 ? za - (cell + s->alpha) : (-cell + s->alpha) - za;
                else {
                    const auto& b = std::get<BetaFamilyModel>(model);
                    t = side > 0 ? za / b.s2.b - (b.s2.a + cell - 1.0)
                                 : -za / b.s1.b - (b.s1.a + cell - 1.0);
                }
                if (t > 1e-9 && t < 1.0 - 1e-9) seed = t;
            }
        }
    }
    if (seed < 0.0) {
        double a, b;
        if (!bracket_open(g, 0.0, 1.0, &a, &b)) {
            std::ostringstream os;
            os << "solve_real_q: failed to bracket root n=" << side * cell;
            throw ConvergenceError(os.str());
        }
        seed = bisect_to(g, a, b, 1e-3);
    }
    auto r = newton_in(g, dg, seed, 0.0, 1.0, 0.0);
    if (strict && !(r.residual <= 1e-10 * (1.0 + q)) && !r.step_converged) {
        std::ostringstream os;
        os << "solve_real_q: root n=" << side * cell << " did not converge (residual "
           << r.residual << ")";
        throw ConvergenceError(os.str());
    }
    RootRep rep;
    rep.cell = cell;
    rep.offset = r.x;
    rep.residual = r.residual;
    rep.zeta = fn.zeta(r.x);
    return rep;
}

} // namespace detail

inline RootGrid solve_real_q(const ProcessModel& model, double q, int N,
                             const SolveOptions& opts = {}) {
    RootGrid grid;
    grid.model = model;
    grid.q = q;
    grid.N = N;
    grid.loc = localize(model, q, N);
    if (const auto* sp = std::get_if<SechPoissonModel>(&model)) {
        const double eta = detail::sech_eta(*sp, q);
        auto rep = [&](double zeta, int cell, double off) {
            RootRep r;
            r.zeta = zeta;
            r.cell = cell;
            r.offset = off;
            const double c = std::cos(0.5 * detail::pi * off);
            r.residual = std::abs(q + sp->jump_rate - detail::pi / c);
            return r;
        };
        grid.zero_minus = rep(sp->alpha - eta, 0, -eta);
        grid.zero_plus = rep(q == 0.0 ? 0.0 : sp->alpha + eta, 0, eta);
        grid.pos.resize(N);
        grid.neg.resize(N);
        for (int n = 1; n <= N; ++n) {
            grid.pos[n - 1] = rep(detail::sech_root(*sp, q, n), (n + 1) / 2,
                                  (n % 2 == 1) ? -eta : eta);
            grid.neg[n - 1] = rep(detail::sech_root(*sp, q, -n), (n + 1) / 2,
                                  (n % 2 == 1) ? eta : -eta);
        }
        return grid;
    }
    grid.zero_minus = detail::solve_plain(model, q, grid.loc.zero_minus, "zeta0-");
    if (q == 0.0) {
        grid.zero_plus = RootRep{0.0, 0, 0.0, 0.0};
    } else {
        grid.zero_plus = detail::solve_plain(model, q, grid.loc.zero_plus, "zeta0+");
    }
    grid.pos.resize(N);
    grid.neg.resize(N);
    detail::parallel_for(static_cast<std::size_t>(2 * N), opts.threads, [&](std::size_t i) {
        const int side = i < static_cast<std::size_t>(N) ? +1 : -1;
        const int cell = static_cast<int>(i < static_cast<std::size_t>(N)
                                              ? i + 1
                                              : i - static_cast<std::size_t>(N) + 1);
        auto rep = detail::solve_cell(model, q, side, cell, opts.n_min,
                                      opts.strict_residuals);
        (side > 0 ? grid.pos : grid.neg)[cell - 1] = rep;
    });
    return grid;
}

// ------------------------------------------------- inverse power sums Omega_m

// Omega_m = alpha^{-m-1} + sum over all roots of zeta^{-m-1}, summed directly
// over the grid (internally extended) plus an Euler-Maclaurin tail from the
// root asymptotics. SinhSquare with alpha != 0 only; absolute accuracy ~1e-8.
inline double omega_direct(const RootGrid& grid, const ProcessModel& model, int m,
                           int n_tail_from = 2000) {
    const auto* sm = std::get_if<SinhSquareModel>(&model);
    if (!sm) throw DomainError("omega_direct: SinhSquare model required");
    if (sm->alpha == 0.0) throw DomainError("omega_direct: alpha must be nonzero");
    if (m < 0) throw DomainError("omega_direct: m must be >= 0");
    const int Neff = std::max(grid.N, n_tail_from);
    const double p = -(m + 1.0);
    long double sum = std::pow(sm->alpha, p);
    sum += std::pow(grid.zero_minus.zeta, p);
    sum += std::pow(grid.zero_plus.zeta, p);
    for (int n = 1; n <= Neff; ++n) {
        double zp, zn;
        if (n <= grid.N) {
            zp = grid.pos[n - 1].zeta;
            zn = grid.neg[n - 1].zeta;
        } else {
            zp = detail::solve_cell(model, grid.q, +1, n, 5, false).zeta;
            zn = detail::solve_cell(model, grid.q, -1, n, 5, false).zeta;
        }
        sum += std::pow(zp, p) + std::pow(zn, p);
    }
    // tails from Neff+1: zeta_n ~ (n + base) + C1/(n+base) + C2/(n+base)^2,
    // expanded to the orders that matter at n_tail_from = 2000
    const double from = Neff + 1.0;
    double base_p, base_n, C1p, C1n, C2p, C2n;
    if (sm->sigma != 0.0) {
        base_p = sm->alpha;
        base_n = -sm->alpha;
        C1p = C1n = 8.0 / (sm->sigma * sm->sigma);
        C2p = -C1p * (2.0 * sm->rho_c / (sm->sigma * sm->sigma) + sm->alpha);
        C2n = -C2p;
    } else {
        const double rho = sm->rho_c;
        const double g4q = 4.0 * sm->gamma_c - grid.q;
        const double denom = 16.0 * detail::pi * detail::pi + rho * rho;
        const double w0p = (0.5 * detail::pi - std::atan(rho / (4.0 * detail::pi))) / detail::pi;
        base_p = sm->alpha + w0p;
        base_n = -sm->alpha + 1.0 - w0p;
        C1p = -4.0 * (g4q + sm->alpha * rho) / denom;
        C1n = -4.0 * (g4q - sm->alpha * rho) / denom;
        C2p = C2n = 0.0;
    }
    const double sgn = ((m + 1) % 2 == 0) ? 1.0 : -1.0; // (-1)^{m+1}
    auto hz = [&](double s, double a) { return detail::hurwitz_tail<double>(s, a, from); };
    long double tail = 0.0;
    if (m == 0) {
        // sum 1/(n+base_p) - 1/(n+base_n) = psi(from+base_n) - psi(from+base_p)
        tail += (digamma(Complex(from + base_n, 0.0)) - digamma(Complex(from + base_p, 0.0)))
                    .real();
    } else {
        tail += hz(m + 1.0, base_p) + sgn * hz(m + 1.0, base_n);
    }
    tail += -(m + 1.0) * (C1p * hz(m + 3.0, base_p) + sgn * C1n * hz(m + 3.0, base_n));
    tail += -(m + 1.0) * (C2p * hz(m + 4.0, base_p) + sgn * C2n * hz(m + 4.0, base_n));
    tail += 0.5 * (m + 1.0) * (m + 2.0) *
            (C1p * C1p * hz(m + 5.0, base_p) + sgn * C1n * C1n * hz(m + 5.0, base_n));
    return static_cast<double>(sum + tail);
}

// Omega_m via the Maclaurin-coefficient recurrence of the entire function
// whose zeros are {alpha, zeta0+-, zeta_n}.
inline std::vector<double> omega_recurrence(const ProcessModel& model, double q,
                                            int m_max) {
    const auto* sm = std::get_if<SinhSquareModel>(&model);
    if (!sm) throw DomainError("omega_recurrence: SinhSquare model required");
    if (sm->alpha == 0.0) throw DomainError("omega_recurrence: alpha must be nonzero");
    if (!(q > 0.0)) throw DomainError("omega_recurrence: q must be > 0");
    if (m_max < 0) throw DomainError("omega_recurrence: m_max must be >= 0");
    const double a = sm->alpha, s2 = sm->sigma * sm->sigma, g = sm->gamma_c,
                 r = sm->rho_c;
    auto bn = [&](int n) -> double {
        if (n % 2 == 0) {
            const int k = n / 2;
            double fact = 1.0;
            for (int j = 2; j <= 2 * k; ++j) fact *= j;
            const double sign = (k % 2 == 1) ? 1.0 : -1.0; // (-1)^{k-1}
            return sign * std::pow(detail::pi, 2 * k - 1) / fact *
                   (k * (2.0 * k - 1.0) * a * s2 +
                    detail::pi * detail::pi * a * (q + 8.0 * k) - 2.0 * k * g * r);
        }
        const int k = (n - 1) / 2;
        double fact = 1.0;
        for (int j = 2; j <= 2 * k + 1; ++j) fact *= j;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0; // (-1)^k
        return sign * std::pow(detail::pi, 2 * k) / fact *
               (k * (2.0 * k + 1.0) * g * s2 / detail::pi -
                detail::pi *
                    (4.0 * detail::pi * detail::pi * a * a + 4.0 * g * g - g * q) +
                detail::pi * (2.0 * k + 1.0) * (4.0 * g + a * r));
    };
    std::vector<double> b(static_cast<std::size_t>(m_max) + 2);
    for (int n = 0; n <= m_max + 1; ++n) b[n] = bn(n);
    std::vector<double> omega(static_cast<std::size_t>(m_max) + 1);
    for (int mm = 0; mm <= m_max; ++mm) {
        double s = (mm + 1.0) * b[mm + 1];
        for (int n = 0; n < mm; ++n) s += omega[n] * b[mm - n];
        omega[mm] = -s / b[0];
    }
    return omega;
}

} // namespace levywh

#endif
