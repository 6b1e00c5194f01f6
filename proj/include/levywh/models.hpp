#ifndef LEVYWH_MODELS_HPP
#define LEVYWH_MODELS_HPP

// The three process families and their characteristic exponents.
//
// Everything is evaluated through h(zeta) = Psi(i*zeta), the natural variable
// for root finding; Psi(z) = h(-i z). Trigonometric/gamma arguments are range
// reduced so that h keeps full precision out to cell indices in the thousands
// (naive cot(pi*(zeta-alpha)) loses a digit per decade of zeta).

#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "errors.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace levywh {

// ---------------------------------------------------------------- models

// nu(x) = e^{alpha x} / cosh(x), compound Poisson, cut-off h(x) = 0.
struct SechPoissonModel {
    double alpha = 0.0;
    double jump_rate = 0.0; // pi * sec(pi alpha / 2) = total mass of nu
};

// nu(x) = e^{alpha x} / sinh(x/2)^2, cut-off h(x) = x.
struct SinhSquareModel {
    double alpha = 0.0;
    double sigma = 0.0;
    double mu = 0.0;
    double gamma_c = 0.0; // pi alpha cot(pi alpha), =1 at alpha=0
    double rho_c = 0.0;   // 4 pi^2 alpha + 4 gamma(gamma-1)/alpha - mu
};

enum class LambdaCase { generic, one, two };

struct BetaSide {
    double c = 0.0, a = 0.0, b = 0.0, lam = 0.0;
    LambdaCase lc = LambdaCase::generic;
    double B = 0.0;         // B(a; 1-lam)                (generic)
    double psi_diff = 0.0;  // psi(a) - psi(1+a-lam)      (generic)
    double trig = 0.0;      // psi'(a)                    (one/two)
};

struct BetaFamilyModel {
    BetaSide s1; // positive jumps: c1 e^{-a1 b1 x} (1-e^{-b1 x})^{-l1}
    BetaSide s2; // negative jumps
    double sigma = 0.0;
    double mu = 0.0;
    std::optional<double> gamma_c; // sum c_i/b_i B(a_i;1-l_i); absent if a side has lam in {1,2}
    std::optional<double> rho_c;
};

using ProcessModel = std::variant<SechPoissonModel, SinhSquareModel, BetaFamilyModel>;

namespace detail {

inline void model_require(bool ok, const std::string& what) {
    if (!ok) throw DomainError("invalid model: " + what);
}

inline LambdaCase classify_lambda(double lam) {
    if (std::abs(lam - 1.0) <= 1e-9) return LambdaCase::one;
    if (std::abs(lam - 2.0) <= 1e-9) return LambdaCase::two;
    return LambdaCase::generic;
}

} // namespace detail

inline SechPoissonModel make_sech_poisson(double alpha) {
    std::ostringstream why;
    why << "SechPoisson requires |alpha| < 1 (alpha=" << alpha << ")";
    detail::model_require(std::isfinite(alpha) && std::abs(alpha) < 1.0, why.str());
    SechPoissonModel m;
    m.alpha = alpha;
    m.jump_rate = detail::pi / std::cos(0.5 * detail::pi * alpha);
    return m;
}

inline SinhSquareModel make_sinh_square(double alpha, double sigma, double mu) {
    {
        std::ostringstream why;
        why << "SinhSquare requires |alpha| < 1 (alpha=" << alpha << ")";
        detail::model_require(std::isfinite(alpha) && std::abs(alpha) < 1.0, why.str());
    }
    detail::model_require(std::isfinite(sigma) && sigma >= 0.0,
                          "SinhSquare requires sigma >= 0");
    detail::model_require(std::isfinite(mu), "SinhSquare requires finite mu");
    SinhSquareModel m;
    m.alpha = alpha;
    m.sigma = sigma;
    m.mu = mu;
    if (std::abs(alpha) < 1e-4) {
        // gamma(gamma-1)/alpha has a removable singularity at alpha = 0
        const double pa2 = detail::pi * detail::pi * alpha * alpha;
        m.gamma_c = 1.0 - pa2 / 3.0 - pa2 * pa2 / 45.0;
        const double gg1_over_a =
            alpha * (-detail::pi * detail::pi / 3.0 +
                     (4.0 / 45.0) * std::pow(detail::pi, 4) * alpha * alpha);
        m.rho_c = 4.0 * detail::pi * detail::pi * alpha + 4.0 * gg1_over_a - mu;
    } else {
        m.gamma_c = detail::pi * alpha * std::cos(detail::pi * alpha) /
                    std::sin(detail::pi * alpha);
        m.rho_c = 4.0 * detail::pi * detail::pi * alpha +
                  4.0 * m.gamma_c * (m.gamma_c - 1.0) / alpha - mu;
    }
    return m;
}

inline BetaFamilyModel make_beta_family(double c1, double c2, double alpha1,
                                        double alpha2, double beta1, double beta2,
                                        double lambda1, double lambda2, double sigma,
                                        double mu) {
    auto side_check = [](const char* name, double c, double a, double b, double l) {
        std::ostringstream why;
        why << "BetaFamily side " << name << " requires c >= 0, alpha > 0, beta > 0, "
            << "lambda in (0,3) (c=" << c << ", alpha=" << a << ", beta=" << b
            << ", lambda=" << l << ")";
        detail::model_require(std::isfinite(c) && std::isfinite(a) && std::isfinite(b) &&
                                  std::isfinite(l) && c >= 0.0 && a > 0.0 && b > 0.0 &&
                                  l > 0.0 && l < 3.0,
                              why.str());
    };
    side_check("1", c1, alpha1, beta1, lambda1);
    side_check("2", c2, alpha2, beta2, lambda2);
    detail::model_require(std::isfinite(sigma) && sigma >= 0.0,
                          "BetaFamily requires sigma >= 0");
    detail::model_require(std::isfinite(mu), "BetaFamily requires finite mu");
    detail::model_require(c1 > 0.0 || c2 > 0.0 || sigma > 0.0,
                          "BetaFamily requires at least one of c1, c2, sigma positive");
    BetaFamilyModel m;
    m.sigma = sigma;
    m.mu = mu;
    auto fill = [](BetaSide& s, double c, double a, double b, double l) {
        s.c = c;
        s.a = a;
        s.b = b;
        s.lam = l;
        s.lc = detail::classify_lambda(l);
        if (s.lc == LambdaCase::generic) {
            s.B = beta_fn(Complex(a, 0.0), Complex(1.0 - l, 0.0)).real();
            s.psi_diff = (digamma(Complex(a, 0.0)) - digamma(Complex(1.0 + a - l, 0.0))).real();
        } else {
            s.trig = detail::trigamma_positive(a);
        }
    };
    fill(m.s1, c1, alpha1, beta1, lambda1);
    fill(m.s2, c2, alpha2, beta2, lambda2);
    if (m.s1.lc == LambdaCase::generic && m.s2.lc == LambdaCase::generic) {
        m.gamma_c = m.s1.c / m.s1.b * m.s1.B + m.s2.c / m.s2.b * m.s2.B;
        m.rho_c = -mu - m.s1.c / (m.s1.b * m.s1.b) * m.s1.B * m.s1.psi_diff +
                  m.s2.c / (m.s2.b * m.s2.b) * m.s2.B * m.s2.psi_diff;
    } else if (m.s1.lc != LambdaCase::two && m.s2.lc != LambdaCase::two) {
        // lambda = 1 sides have the finite limit contribution (c/b^2) psi'(a)
        auto rho_term = [](const BetaSide& s) {
            if (s.lc == LambdaCase::one) return s.c / (s.b * s.b) * s.trig;
            return -s.c / (s.b * s.b) * s.B * s.psi_diff;
        };
        m.rho_c = -mu + rho_term(m.s1) + rho_term(m.s2);
    }
    return m;
}

// ------------------------------------------------- characteristic exponent

namespace detail {

// sech: h(zeta) = Lambda - pi / cos(pi (zeta-alpha)/2), reduced mod 4 in zeta.
template <class C>
inline C sech_h(const SechPoissonModel& m, const C& zeta) {
    const C r = 0.5 * (zeta - m.alpha);
    const double k = std::nearbyint(std::real(r));
    const C d = r - k;
    if (std::abs(std::imag(C(d))) < 1e-12 && std::abs(std::abs(std::real(C(d))) - 0.5) < 5e-13)
        throw PoleError("psi: sech argument at pole lattice i(alpha+1+2n)");
    C c = std::cos(pi * d);
    if (static_cast<long long>(k) % 2 != 0) c = -c;
    return m.jump_rate - pi / c;
}

template <class C>
inline C sech_dh(const SechPoissonModel& m, const C& zeta) {
    const C r = 0.5 * (zeta - m.alpha);
    const double k = std::nearbyint(std::real(r));
    const C d = r - k;
    C s = std::sin(pi * d), c = std::cos(pi * d);
    if (static_cast<long long>(k) % 2 != 0) { s = -s; c = -c; }
    return -0.5 * pi * pi * s / (c * c);
}

// sinh^-2 jump part 4 pi w cot(pi w) at w = zeta - alpha, reduced mod 1.
template <class C>
inline C sinh_jump(const C& w) {
    const double k = std::nearbyint(std::real(w));
    const C d = w - k;
    if (k == 0.0 && std::abs(w) < 0.01) {
        const C pw2 = (pi * w) * (pi * w);
        return 4.0 - (4.0 / 3.0) * pw2 - (4.0 / 45.0) * pw2 * pw2 -
               (8.0 / 945.0) * pw2 * pw2 * pw2;
    }
    if (k != 0.0 && std::abs(d) < 1e-12)
        throw PoleError("psi: sinh argument at pole lattice i(alpha+n)");
    return 4.0 * pi * w * cot_pi(d);
}

template <class C>
inline C sinh_djump(const C& w) {
    const double k = std::nearbyint(std::real(w));
    const C d = w - k;
    if (k == 0.0 && std::abs(w) < 0.01) {
        const C w2 = w * w;
        const double p2 = pi * pi;
        return -(8.0 / 3.0) * p2 * w - (16.0 / 45.0) * p2 * p2 * w * w2 -
               (16.0 / 315.0) * p2 * p2 * p2 * w2 * w2 * w;
    }
    if (k != 0.0 && std::abs(d) < 1e-12)
        throw PoleError("psi: sinh argument at pole lattice i(alpha+n)");
    const C ct = cot_pi(d);
    return 4.0 * pi * ct - 4.0 * pi * pi * w * (1.0 + ct * ct);
}

template <class C>
inline C sinh_h(const SinhSquareModel& m, const C& zeta) {
    if (zeta == C(0.0)) return C(0.0);
    return -0.5 * m.sigma * m.sigma * zeta * zeta - m.rho_c * zeta +
           sinh_jump(C(zeta - m.alpha)) - 4.0 * m.gamma_c;
}

template <class C>
inline C sinh_dh(const SinhSquareModel& m, const C& zeta) {
    return -m.sigma * m.sigma * zeta - m.rho_c + sinh_djump(C(zeta - m.alpha));
}

// beta family: per-side compensated jump integrals J_i(zeta) with
// h = -sigma^2 zeta^2/2 + mu zeta - c1 J1 - c2 J2  (so h(0) = 0 by structure).
template <class C>
inline C beta_J(const BetaSide& s, int side_sign, const C& zeta) {
    // side_sign = +1: x = a + zeta/b (positive-jump side);
    // side_sign = -1: x = a - zeta/b.
    const C x = s.a + static_cast<double>(side_sign) * zeta / s.b;
    const C lin = zeta / (s.b * s.b);
    switch (s.lc) {
        case LambdaCase::generic: {
            const C Bx = beta_fn(x, C(1.0 - s.lam));
            return (Bx - s.B) / s.b -
                   static_cast<double>(side_sign) * lin * s.B * s.psi_diff;
        }
        case LambdaCase::one: {
            const C D = digamma(x) - digamma(C(s.a));
            return -D / s.b + static_cast<double>(side_sign) * lin * s.trig;
        }
        case LambdaCase::two: {
            const C D = digamma(x) - digamma(C(s.a));
            const C one_minus_a = C(1.0 - s.a);
            if (side_sign > 0) {
                // J1 = -(1/b)(1 - a - zeta/b) D + zeta (1-a) psi'(a) / b^2
                return -(one_minus_a - zeta / s.b) * D / s.b + lin * (1.0 - s.a) * s.trig;
            }
            // J2 = -(1/b)(1 - a + zeta/b) D - zeta (1-a) psi'(a) / b^2
            return -(one_minus_a + zeta / s.b) * D / s.b - lin * (1.0 - s.a) * s.trig;
        }
    }
    return C(0.0);
}

template <class C>
inline C beta_dJ(const BetaSide& s, int side_sign, const C& zeta) {
    const C x = s.a + static_cast<double>(side_sign) * zeta / s.b;
    const double b2 = s.b * s.b;
    switch (s.lc) {
        case LambdaCase::generic: {
            const C Bx = beta_fn(x, C(1.0 - s.lam));
            const C dBx = Bx * (digamma(x) - digamma(x + (1.0 - s.lam)));
            return static_cast<double>(side_sign) * (dBx - s.B * s.psi_diff) / b2;
        }
        case LambdaCase::one:
            return static_cast<double>(side_sign) * (-trigamma(x) + s.trig) / b2;
        case LambdaCase::two: {
            const C D = digamma(x) - digamma(C(s.a));
            const C one_minus_a = C(1.0 - s.a);
            if (side_sign > 0)
                return (D - (one_minus_a - zeta / s.b) * trigamma(x)) / b2 +
                       (1.0 - s.a) * s.trig / b2;
            return (-D + (one_minus_a + zeta / s.b) * trigamma(x)) / b2 -
                   (1.0 - s.a) * s.trig / b2;
        }
    }
    return C(0.0);
}

template <class C>
inline C beta_h(const BetaFamilyModel& m, const C& zeta) {
    if (zeta == C(0.0)) return C(0.0);
    return -0.5 * m.sigma * m.sigma * zeta * zeta + m.mu * zeta -
           m.s1.c * beta_J(m.s1, +1, zeta) - m.s2.c * beta_J(m.s2, -1, zeta);
}

template <class C>
inline C beta_dh(const BetaFamilyModel& m, const C& zeta) {
    return -m.sigma * m.sigma * zeta + m.mu - m.s1.c * beta_dJ(m.s1, +1, zeta) -
           m.s2.c * beta_dJ(m.s2, -1, zeta);
}

} // namespace detail

// Psi(i zeta) and d/dzeta Psi(i zeta); real for real zeta.
inline Complex psi_izeta(const ProcessModel& m, const Complex& zeta) {
    detail::require_finite(zeta, "psi");
    return std::visit(
        [&](const auto& mm) -> Complex {
            using T = std::decay_t<decltype(mm)>;
            if constexpr (std::is_same_v<T, SechPoissonModel>) return detail::sech_h(mm, zeta);
            else if constexpr (std::is_same_v<T, SinhSquareModel>) return detail::sinh_h(mm, zeta);
            else return detail::beta_h(mm, zeta);
        },
        m);
}

inline Complex dpsi_izeta(const ProcessModel& m, const Complex& zeta) {
    detail::require_finite(zeta, "psi_prime");
    return std::visit(
        [&](const auto& mm) -> Complex {
            using T = std::decay_t<decltype(mm)>;
            if constexpr (std::is_same_v<T, SechPoissonModel>) return detail::sech_dh(mm, zeta);
            else if constexpr (std::is_same_v<T, SinhSquareModel>) return detail::sinh_dh(mm, zeta);
            else return detail::beta_dh(mm, zeta);
        },
        m);
}

// Characteristic exponent Psi(z) and its analytic derivative.
inline Complex psi(const ProcessModel& m, const Complex& z) {
    return psi_izeta(m, Complex(0.0, -1.0) * z);
}

inline Complex psi_prime(const ProcessModel& m, const Complex& z) {
    return Complex(0.0, -1.0) * dpsi_izeta(m, Complex(0.0, -1.0) * z);
}

// E X_1 (mean of the process at t=1); the q=0 theory needs it negative.
inline double mean_x1(const ProcessModel& m) {
    return std::visit(
        [](const auto& mm) -> double {
            using T = std::decay_t<decltype(mm)>;
            if constexpr (std::is_same_v<T, SechPoissonModel>) {
                const double c = std::cos(0.5 * detail::pi * mm.alpha);
                return 0.5 * detail::pi * detail::pi *
                       std::sin(0.5 * detail::pi * mm.alpha) / (c * c);
            } else {
                return mm.mu;
            }
        },
        m);
}

// --------------------------------------------- Levy-Khintchine quadrature
// Independent oracle for psi: direct adaptive quadrature of eq. (1) with the
// family's cut-off (h=0 for sech, h=x otherwise). Target 1e-8 absolute.

namespace detail {

struct LkSideDensity {
    double c, a, b, lam; // c e^{-a b x} (1 - e^{-b x})^{-lam}
    double operator()(double x) const {
        return c * std::exp(-a * b * x) / std::pow(-std::expm1(-b * x), lam);
    }
};

inline double lk_tail_cut(double a, double b) { return 50.0 / (a * b) + 5.0; }

// int_0^inf (e^{i w x} - 1 - i w x) dens(x) dx, dens ~ x^{-lam} at 0.
inline Complex lk_side_integral(const LkSideDensity& dens, const Complex& w,
                                double abs_tol) {
    const double X = lk_tail_cut(dens.a, dens.b);
    if (dens.lam <= 2.0) {
        auto f = [&](double x) -> Complex {
            if (x <= 0.0) return Complex(0.0, 0.0);
            return exp_rem1(w * x) * dens(x);
        };
        return integrate_gk<Complex>(f, 0.0, 1.0, 0.5 * abs_tol) +
               integrate_gk<Complex>(f, 1.0, X, 0.5 * abs_tol);
    }
    // subtract the quadratic Taylor term, add back -w^2/2 * int x^2 dens dx
    auto f2 = [&](double x) -> Complex {
        if (x <= 0.0) return Complex(0.0, 0.0);
        return exp_rem2(w * x) * dens(x);
    };
    const Complex body = integrate_gk<Complex>(f2, 0.0, 1.0, 0.25 * abs_tol) +
                         integrate_gk<Complex>(f2, 1.0, X, 0.25 * abs_tol);
    const int p = std::min(40, static_cast<int>(std::ceil(2.0 / (3.0 - dens.lam))) + 1);
    auto m2f = [&](double s) -> double {
        if (s <= 0.0) return 0.0;
        const double x = std::pow(s, p);
        return x * x * dens(x) * p * std::pow(s, p - 1);
    };
    const double m2 = integrate_gk<double>(m2f, 0.0, std::pow(X, 1.0 / p), 0.25 * abs_tol);
    return body + 0.5 * w * w * m2;
}

} // namespace detail

inline Complex psi_lk_quadrature(const ProcessModel& m, double z, double abs_tol = 1e-9) {
    if (!std::isfinite(z)) throw DomainError("psi_lk_quadrature: non-finite z");
    try {
        return std::visit(
            [&](const auto& mm) -> Complex {
                using T = std::decay_t<decltype(mm)>;
                const Complex iz(0.0, z);
                if constexpr (std::is_same_v<T, SechPoissonModel>) {
                    auto f = [&](double x) -> Complex {
                        return detail::cexpm1(iz * x) * std::exp(mm.alpha * x) /
                               std::cosh(x);
                    };
                    const double xp = 50.0 / (1.0 - mm.alpha);
                    const double xm = 50.0 / (1.0 + mm.alpha);
                    return -(integrate_gk<Complex>(f, -xm, 0.0, 0.5 * abs_tol) +
                             integrate_gk<Complex>(f, 0.0, xp, 0.5 * abs_tol));
                } else if constexpr (std::is_same_v<T, SinhSquareModel>) {
                    auto side = [&](double sgn, double tol) -> Complex {
                        auto f = [&](double x) -> Complex {
                            if (x <= 0.0) return Complex(0.0, 0.0);
                            const double sh = std::sinh(0.5 * x);
                            return detail::exp_rem1(sgn * iz * x) *
                                   std::exp(sgn * mm.alpha * x) / (sh * sh);
                        };
                        const double X = 50.0 / (1.0 - sgn * mm.alpha) + 5.0;
                        return integrate_gk<Complex>(f, 0.0, 1.0, 0.5 * tol) +
                               integrate_gk<Complex>(f, 1.0, X, 0.5 * tol);
                    };
                    return 0.5 * mm.sigma * mm.sigma * z * z - Complex(0.0, mm.mu * z) -
                           side(+1.0, 0.5 * abs_tol) - side(-1.0, 0.5 * abs_tol);
                } else {
                    const detail::LkSideDensity d1{mm.s1.c, mm.s1.a, mm.s1.b, mm.s1.lam};
                    const detail::LkSideDensity d2{mm.s2.c, mm.s2.a, mm.s2.b, mm.s2.lam};
                    Complex jump(0.0, 0.0);
                    if (mm.s1.c > 0.0)
                        jump += detail::lk_side_integral(d1, iz, 0.5 * abs_tol);
                    if (mm.s2.c > 0.0)
                        jump += detail::lk_side_integral(d2, -iz, 0.5 * abs_tol);
                    return 0.5 * mm.sigma * mm.sigma * z * z - Complex(0.0, mm.mu * z) -
                           jump;
                }
            },
            m);
    } catch (const QuadratureError&) {
        throw QuadratureError("psi_lk_quadrature: accuracy target not met");
    }
}

// Density of the Levy measure at x != 0.
inline double levy_density(const ProcessModel& m, double x) {
    if (x == 0.0) throw DomainError("levy_density: x must be nonzero");
    return std::visit(
        [&](const auto& mm) -> double {
            using T = std::decay_t<decltype(mm)>;
            if constexpr (std::is_same_v<T, SechPoissonModel>) {
                return std::exp(mm.alpha * x) / std::cosh(x);
            } else if constexpr (std::is_same_v<T, SinhSquareModel>) {
                const double sh = std::sinh(0.5 * x);
                return std::exp(mm.alpha * x) / (sh * sh);
            } else {
                if (x > 0.0)
                    return mm.s1.c * std::exp(-mm.s1.a * mm.s1.b * x) /
                           std::pow(-std::expm1(-mm.s1.b * x), mm.s1.lam);
                return mm.s2.c * std::exp(mm.s2.a * mm.s2.b * x) /
                       std::pow(-std::expm1(mm.s2.b * x), mm.s2.lam);
            }
        },
        m);
}

inline std::string model_family_name(const ProcessModel& m) {
    return std::visit(
        [](const auto& mm) -> std::string {
            using T = std::decay_t<decltype(mm)>;
            if constexpr (std::is_same_v<T, SechPoissonModel>) return "sech_poisson";
            else if constexpr (std::is_same_v<T, SinhSquareModel>) return "sinh_square";
            else return "beta_family";
        },
        m);
}

} // namespace levywh

#endif
