#include <catch_amalgamated.hpp>

#include <random>

#include "levywh/validation.hpp"
#include "levywh/wh_factors.hpp"

using namespace levywh;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("phi normalization and basic structure") {
    ProcessModel sh = make_sinh_square(0.25, 1.0, -0.1);
    auto grid = solve_real_q(sh, 1.0, 200);
    auto fp = make_factor(sh, grid, FactorSide::plus);
    auto fm = make_factor(sh, grid, FactorSide::minus);
    CHECK(phi(fp, {0, 0}) == Complex(1, 0));
    CHECK(phi(fm, {0, 0}) == Complex(1, 0));
    CHECK(fp.A1 == 8.0);
    CHECK_THAT(fp.A2, WithinRel(8.0 * (2.0 * std::get<SinhSquareModel>(sh).rho_c + 0.25),
                                1e-12));

    // characteristic function of a nonnegative variable: |phi+| <= 1 upstairs
    for (double zr : {-7.0, -2.0, 0.3, 4.0}) {
        for (double zi : {0.0, 0.5, 3.0}) {
            CHECK(std::abs(phi(fp, {zr, zi})) <= 1.0 + 1e-9);
        }
    }
    // hermitian symmetry on the real axis
    for (double zr : {0.7, 3.3, 9.1}) {
        CHECK(std::abs(std::conj(phi(fp, {zr, 0})) - phi(fp, {-zr, 0})) < 1e-11);
    }
    // pole guard
    CHECK_THROWS_AS(phi(fp, Complex(0.0, grid.zero_minus.zeta)), PoleError);
}

TEST_CASE("sech product equals the gamma-ratio closed form") {
    for (double a : {-0.5, 0.0, 0.25}) {
        ProcessModel sp = make_sech_poisson(a);
        auto grid = solve_real_q(sp, 1.0, 60);
        FactorOptions prod;
        prod.N = 60;
        prod.sech_use_closed_form = false;
        auto fprod = make_factor(sp, grid, FactorSide::plus, prod);
        auto fcf = make_factor(sp, grid, FactorSide::plus, {});
        auto mprod = make_factor(sp, grid, FactorSide::minus, prod);
        auto mcf = make_factor(sp, grid, FactorSide::minus, {});
        for (int i = 0; i < 10; ++i) {
            const Complex z(-3.0 + 0.7 * i, 0.4 * i);
            CHECK(std::abs(phi(fprod, z) - phi(fcf, z)) < 1e-10 * std::abs(phi(fcf, z)));
            CHECK(std::abs(phi(mprod, z) - phi(mcf, z)) < 1e-10 * std::abs(phi(mcf, z)));
        }
        // symmetry swap: phi-(z; alpha) = phi+(-z; -alpha)
        ProcessModel spn = make_sech_poisson(-a);
        auto gridn = solve_real_q(spn, 1.0, 60);
        auto fplusn = make_factor(spn, gridn, FactorSide::plus, {});
        for (double zr : {0.5, 2.7}) {
            CHECK(std::abs(phi(mcf, {zr, 0.3}) - phi(fplusn, {-zr, -0.3})) < 1e-12);
        }
    }
}

TEST_CASE("solvable sinh point: phi_4^+ in closed form at q = 4") {
    ProcessModel m = make_sinh_square(0.0, 0.0, 4 * detail::pi);
    auto grid = solve_real_q(m, 4.0, 200);
    auto fp = make_factor(m, grid, FactorSide::plus, {});
    CHECK(std::abs(phi(fp, {0.7, 0.0}) -
                   Complex(0.188760430394134606, 0.312886149770930456)) < 1e-9);
    for (double zr : {0.3, 1.1, 2.6}) {
        const Complex z(zr, 0.35);
        const Complex want = std::exp(log_gamma(0.25 - Complex(0, 1) * z) -
                                      log_gamma({0.25, 0}) -
                                      log_gamma(1.0 - Complex(0, 1) * z));
        CHECK(std::abs(phi(fp, z) - want) < 1e-8 * std::abs(want));
    }
}

TEST_CASE("factorization identity q/(q+Psi) = phi+ phi-") {
    ProcessModel models[] = {make_sech_poisson(0.25),
                             make_sinh_square(0.25, 1.0, -0.1),
                             make_sinh_square(-0.4, 0.0, 2.0),
                             make_beta_family(1.2, 0.7, 0.9, 1.4, 0.8, 1.1, 0.6, 2.5, 0.4, 0.3),
                             make_beta_family(0.8, 1.1, 1.3, 0.7, 1.2, 0.9, 1.0, 2.0, 0.7, -0.4)};
    for (const auto& m : models) {
        const double q = 1.0;
        auto grid = solve_real_q(m, q, 200);
        auto fp = make_factor(m, grid, FactorSide::plus);
        auto fm = make_factor(m, grid, FactorSide::minus);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const Complex z(-12.0 + 24.0 * (i + 0.5) / 50.0, 0.0);
            worst = std::max(worst,
                             std::abs(phi(fp, z) * phi(fm, z) * (q + psi(m, z)) / q - 1.0));
        }
        INFO(model_family_name(m));
        CHECK(worst <= 1e-7);
    }
}

TEST_CASE("accelerated tail vs the naive million-root product") {
    ProcessModel m = make_sinh_square(0.25, 1.0, -0.1);
    auto small = solve_real_q(m, 1.0, 50);
    FactorOptions fo;
    fo.N = 50;
    auto fp = make_factor(m, small, FactorSide::minus, fo);
    SolveOptions so;
    so.threads = 2;
    so.strict_residuals = false;
    auto big = solve_real_q(m, 1.0, 300000, so); // oracle grid (unit-test size)
    const Complex z(1.0, 0.5);
    const Complex naive = naive_factor_product(m, big, FactorSide::minus, z, big.pos.size());
    CHECK(std::abs(phi(fp, z) - naive) < 2e-8 * std::abs(naive));
}

TEST_CASE("accelerate_tail and f_euler_maclaurin") {
    CHECK(accelerate_tail(50, {0, 0}, 8.0, -118.0, 1.25) == Complex(1, 0));
    CHECK_THROWS_AS(accelerate_tail(5, {1, 0}, 1.0, 0.0, 1.0), DomainError);

    // direct-summation oracle in long double, two tail corrections
    const double b = 1.25;
    const int N = 50;
    long double direct = 0.0L;
    for (long n = 9999999L; n >= N; --n)
        direct += 1.0L / ((n + static_cast<long double>(b)) * (n + static_cast<long double>(b)));
    const long double P = 10000000.0L + b;
    direct += 1.0L / P + 1.0L / (2.0L * P * P);
    const Complex em = f_euler_maclaurin(1, 1, {b, 0}, {b, 0}, N);
    CHECK(std::abs(em.real() - static_cast<double>(direct)) < 1e-12);
    CHECK(em.imag() == 0.0);

    // z1 == z2 collapses the k-sum; positivity for the (1,2) case
    const Complex e12 = f_euler_maclaurin(1, 2, {0.6, 0}, {0.6, 0}, 40);
    CHECK(e12.real() > 0.0);
    CHECK_THROWS_AS(f_euler_maclaurin(0.4, 0.5, {1, 0}, {1, 0}, 50), DomainError);
}

TEST_CASE("atom probabilities") {
    // sech, alpha=0, q=pi: eta = 2/3 and p0 = G(1/4)G(3/4)/(G(1/6)G(5/6)) = 1/sqrt(2)
    ProcessModel sp0 = make_sech_poisson(0.0);
    auto g0 = solve_real_q(sp0, detail::pi, 10);
    CHECK_THAT(atom_probability(sp0, g0), WithinRel(0.7071067811865475244, 1e-13));

    ProcessModel sh = make_sinh_square(0.25, 1.0, -0.1);
    auto gs = solve_real_q(sh, 1.0, 10);
    CHECK(atom_probability(sh, gs) == 0.0); // infinite variation

    // bounded-variation beta family: independent oracle is the z -> +infinity
    // limit of phi+(iz), Richardson-extrapolated in 1/z
    ProcessModel bv = make_beta_family(1.0, 1.0, 1.2, 0.8, 0.9, 1.1, 0.5, 1.5, 0.0, -2.0);
    auto gbv = solve_real_q(bv, 1.0, 300);
    const double at = atom_probability(bv, gbv);
    CHECK(at > 0.0);
    CHECK(at < 1.0);
    FactorOptions fo;
    fo.N = 4000;
    auto fp = make_factor(bv, gbv, FactorSide::plus, fo);
    const double y1 = 800.0, y2 = 1600.0;
    const double v1 = phi(fp, Complex(0, y1)).real();
    const double v2 = phi(fp, Complex(0, y2)).real();
    // phi+(iy) approaches the atom with an empirically ~1/y correction;
    // eliminate it by Richardson extrapolation
    const double extrap = 2.0 * v2 - v1;
    CHECK_THAT(at, WithinAbs(extrap, 3e-4));

    // sigma > 0 or lambda >= 2 kills the atom
    ProcessModel nobv = make_beta_family(1.0, 1.0, 1.2, 0.8, 0.9, 1.1, 0.5, 1.5, 0.3, -2.0);
    auto gn = solve_real_q(nobv, 1.0, 10);
    CHECK(atom_probability(nobv, gn) == 0.0);
}

TEST_CASE("phi_q^- is refused at q = 0") {
    ProcessModel sh = make_sinh_square(0.25, 1.0, -0.1);
    auto g = solve_real_q(sh, 0.0, 20);
    CHECK_THROWS_AS(make_factor(sh, g, FactorSide::minus), DomainError);
    auto fp = make_factor(sh, g, FactorSide::plus); // S_infinity side is fine
    CHECK(std::abs(phi(fp, {1.0, 0.5})) < 1.0);
}
