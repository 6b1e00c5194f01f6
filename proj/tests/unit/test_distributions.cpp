#include <catch_amalgamated.hpp>

#include "levywh/distributions.hpp"

using namespace levywh;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("closed-form sech density (frozen mpmath values)") {
    CHECK_THAT(sup_density_closed_sech(0.25, 1.0, 0.1),
               WithinRel(0.116838629073353992, 1e-12));
    CHECK_THAT(sup_density_closed_sech(0.25, 1.0, 0.5),
               WithinRel(0.125879406398362065, 1e-12));
    CHECK_THAT(sup_density_closed_sech(0.25, 1.0, 1.0),
               WithinRel(0.122526081105506698, 1e-12));
    CHECK_THAT(sup_density_closed_sech(0.25, 1.0, 2.0),
               WithinRel(0.0997876468339172513, 1e-12));
    CHECK_THROWS_AS(sup_density_closed_sech(0.25, 1.0, -1.0), DomainError);
    CHECK_THROWS_AS(sup_density_closed_sech(0.25, 0.0, 1.0), DomainError);
    // q=0 needs alpha<0 and then eta = |alpha|
    CHECK(sup_density_closed_sech(-0.5, 0.0, 1.0) > 0.0);
    // large x: first term dominates, slope (alpha - eta)
    const double d5 = sup_density_closed_sech(0.25, 1.0, 5.0);
    const double d7 = sup_density_closed_sech(0.25, 1.0, 7.0);
    CHECK_THAT(std::log(d7 / d5) / 2.0, WithinAbs(0.25 - 0.493829022580926831, 1e-4));
}

TEST_CASE("series density matches the sech closed form") {
    ProcessModel sp = make_sech_poisson(0.25);
    auto grid = solve_real_q(sp, 1.0, 80);
    auto sd = sup_density_expq(sp, grid, 40);
    CHECK_THAT(sd.atom, WithinRel(0.355069074275629384, 1e-12));
    CHECK(sd.mass_defect <= 1e-6);
    for (double x : {0.1, 0.5, 1.0, 2.0}) {
        CHECK_THAT(sup_density_eval(sd, x),
                   WithinAbs(sup_density_closed_sech(0.25, 1.0, x), 1e-6));
    }
}

TEST_CASE("solvable sinh point density: sin(pi/4)/pi (e^x - 1)^{-1/4}") {
    ProcessModel m = make_sinh_square(0.0, 0.0, 4 * detail::pi);
    auto grid = solve_real_q(m, 4.0, 200);
    auto sd = sup_density_expq(m, grid, 80);
    CHECK(sd.atom == 0.0);
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const double want =
            std::sin(detail::pi / 4.0) / detail::pi * std::pow(std::exp(x) - 1.0, -0.25);
        CHECK_THAT(sup_density_eval(sd, x), WithinAbs(want, 1e-6));
    }
    CHECK_THAT(sup_density_eval(sd, 1.0), WithinAbs(0.196590048652103055, 1e-6));
}

TEST_CASE("series CDF: endpoints, monotonicity, calculus") {
    ProcessModel sh = make_sinh_square(0.25, 1.0, -0.1);
    auto grid = solve_real_q(sh, 1.0, 200);
    auto sd = sup_density_expq(sh, grid, 60);
    CHECK(sd.mass_defect <= 1e-6);
    CHECK(sup_cdf_expq(sd, 0.0) == sd.atom);
    CHECK_THAT(sup_cdf_expq(sd, 150.0), WithinAbs(1.0, 2e-6));
    double prev = -1.0;
    for (double x = 0.0; x <= 12.0; x += 0.05) {
        const double v = sup_cdf_expq(sd, x);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    const double h = 1e-4;
    CHECK_THAT((sup_cdf_expq(sd, 1.0 + h) - sup_cdf_expq(sd, 1.0 - h)) / (2 * h),
               WithinAbs(sup_density_eval(sd, 1.0), 1e-5));
    // density nonnegative on a 1e3-point grid
    for (int i = 0; i < 1000; ++i) {
        const double x = 1e-3 * std::pow(30.0 / 1e-3, i / 999.0);
        CHECK(sup_density_eval(sd, x) >= -1e-9);
    }
    // exponential decay: log-density slope tends to zeta0^-
    const double slope =
        (std::log(sup_density_eval(sd, 10.0)) - std::log(sup_density_eval(sd, 5.0))) / 5.0;
    CHECK_THAT(slope, WithinAbs(grid.zero_minus.zeta, 2e-2));
}

TEST_CASE("q = 0 supremum of a negative-mean sech process") {
    // S_infinity for alpha < 0; closed form stays valid with eta = |alpha|
    ProcessModel sp = make_sech_poisson(-0.5);
    auto grid = solve_real_q(sp, 0.0, 80);
    auto sd = sup_density_expq(sp, grid, 40);
    CHECK(sd.mass_defect <= 1e-6);
    for (double x : {0.5, 1.0, 2.0}) {
        CHECK_THAT(sup_density_eval(sd, x),
                   WithinAbs(sup_density_closed_sech(-0.5, 0.0, x), 1e-6));
    }
}

TEST_CASE("beta-family series with an atom") {
    ProcessModel bv = make_beta_family(1.0, 1.0, 1.2, 0.8, 0.9, 1.1, 0.5, 1.5, 0.0, -2.0);
    auto grid = solve_real_q(bv, 1.0, 300);
    auto sd = sup_density_expq(bv, grid, 80);
    CHECK(sd.atom > 0.0);
    CHECK(sd.mass_defect <= 1e-6);
    CHECK(sup_cdf_expq(sd, 0.0) == sd.atom);
    for (double x = 0.01; x < 20.0; x *= 1.4) CHECK(sup_density_eval(sd, x) >= -1e-9);
}

TEST_CASE("fixed-t inversion: smoke value, normalization and diagnostics") {
    ProcessModel sh = make_sinh_square(0.25, 1.0, -0.1);
    InversionParams par;
    par.K = 60;
    par.trunc_tol = 1e-5;
    FixedTInverter inv(sh, par);
    InversionDiagnostics d;
    const double p = inv.density(1.0, 1.0, &d);
    CHECK(p > 0.1);
    CHECK(p < 0.2);
    CHECK(d.imag_residual < 1e-8);
    CHECK_FALSE(d.truncated);
    // unimodality in x at fixed t
    double prev = 0.0;
    bool increasing = true;
    int turns = 0;
    for (double x = 0.2; x <= 6.0; x += 0.2) {
        const double v = inv.density(1.0, x);
        if (increasing && v < prev - 1e-9) {
            increasing = false;
            ++turns;
        } else if (!increasing && v > prev + 1e-9) {
            ++turns;
        }
        prev = v;
    }
    CHECK(turns <= 1);

    // mass of p_t integrates to 1 (term-wise exact in x)
    InversionParams pm;
    pm.K = 240;
    FixedTInverter invm(sh, pm);
    CHECK_THAT(invm.mass(1.0), WithinAbs(1.0, 1e-4));
}

TEST_CASE("fixed-t inversion works for the beta family") {
    ProcessModel bf = make_beta_family(1.2, 0.7, 0.9, 1.4, 0.8, 1.1, 0.6, 2.5, 0.4, 0.3);
    InversionParams par;
    par.K = 50;
    par.trunc_tol = 1e-4; // smoke accuracy
    FixedTInverter inv(bf, par);
    InversionDiagnostics d;
    const double p = inv.density(1.0, 1.0, &d);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    CHECK(d.imag_residual < 1e-7);
}

TEST_CASE("fixed-t guards") {
    ProcessModel sp = make_sech_poisson(0.25);
    InversionParams par;
    FixedTInverter inv(sp, par);
    CHECK_THROWS_AS(inv.density(1.0, 1.0), DomainError); // sech unsupported
    ProcessModel sh = make_sinh_square(0.25, 1.0, -0.1);
    FixedTInverter inv2(sh, par);
    CHECK_THROWS_AS(inv2.density(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(inv2.density(1.0, 0.0), DomainError);
}
