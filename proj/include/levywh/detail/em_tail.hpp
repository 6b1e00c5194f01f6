#ifndef LEVYWH_DETAIL_EM_TAIL_HPP
#define LEVYWH_DETAIL_EM_TAIL_HPP

// Euler-Maclaurin evaluation of the tail sums
//   f_{a1,a2}(z1,z2;N) = sum_{n>=N} (n+z1)^{-a1} (n+z2)^{-a2}
// that drive the infinite-product acceleration. The binomial k-sum gives the
// exact integral; the bracket adds f(N)/2 - f'(N)/12 + f'''(N)/720 (one order
// beyond the O(N^{-a1-a2-3}) form, needed at N as small as 50).

#include <cmath>
#include <complex>

#include "../errors.hpp"

namespace levywh {
namespace detail {

template <class C>
inline C em_tail_sum(double a1, double a2, const C& z1, const C& z2, double N) {
    if (!(a1 + a2 > 1.0)) throw DomainError("em_tail_sum: requires a1 + a2 > 1");
    const C u1 = z1 + N;
    const C u2 = z2 + N;
    // integral part: sum_k binom(-a2,k) (z2-z1)^k / (a1+a2+k-1) * u1^{1-a1-a2-k}
    const C d = z2 - z1;
    C integral = C(0.0);
    C binom = C(1.0);      // binom(-a2, k)
    C dpow = C(1.0);       // d^k
    C u1pow = std::pow(u1, 1.0 - a1 - a2);
    const C inv_u1 = 1.0 / u1;
    for (int k = 0; k < 200; ++k) {
        const C term = binom * dpow / (a1 + a2 + k - 1.0) * u1pow;
        integral += term;
        if (std::abs(term) < 1e-16 * (std::abs(integral) + 1e-300) && k > 1) break;
        binom *= (-a2 - k) / (k + 1.0);
        dpow *= d;
        u1pow *= inv_u1;
    }
    const C f = std::pow(u1, -a1) * std::pow(u2, -a2);
    const C p1 = a1 / u1 + a2 / u2;                      // -f'/f
    const C p2 = a1 / (u1 * u1) + a2 / (u2 * u2);
    const C p3 = a1 / (u1 * u1 * u1) + a2 / (u2 * u2 * u2);
    // f''' = -(p1^3 + 3 p1 p2 + 2 p3) f
    const C fppp = -(p1 * p1 * p1 + 3.0 * p1 * p2 + 2.0 * p3) * f;
    return integral + f * (0.5 + (1.0 / 12.0) * p1) + fppp / 720.0;
}

// Hurwitz-style tail: sum_{n>=N} (n+z)^{-s}, s > 1.
template <class C>
inline C hurwitz_tail(double s, const C& z, double N) {
    return em_tail_sum<C>(s, 0.0, z, z, N);
}

} // namespace detail
} // namespace levywh

#endif
