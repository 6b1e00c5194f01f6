#ifndef LEVYWH_VALIDATION_HPP
#define LEVYWH_VALIDATION_HPP

// Independent oracles: exact Monte Carlo for the compound Poisson (sech)
// model, unaccelerated long products, and the cross-formula consistency
// report. These deliberately avoid the code paths they validate.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "detail/threads.hpp"
#include "distributions.hpp"
#include "errors.hpp"
#include "models.hpp"
#include "roots.hpp"
#include "wh_factors.hpp"

namespace levywh {

// --------------------------------------------------------------- Monte Carlo

enum class HorizonKind { expq, fixed_t };

struct Horizon {
    HorizonKind kind = HorizonKind::expq;
    double value = 1.0; // q or t

    static Horizon expq(double q) { return {HorizonKind::expq, q}; }
    static Horizon fixed(double t) { return {HorizonKind::fixed_t, t}; }
};

struct EmpiricalCdf {
    std::vector<double> samples; // sorted
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double atom_fraction = 0.0; // fraction of paths with S == 0

    double eval(double x) const {
        const auto it = std::upper_bound(samples.begin(), samples.end(), x);
        return static_cast<double>(it - samples.begin()) / static_cast<double>(n);
    }
};

namespace detail {

inline double splitmix64(std::uint64_t* s) {
    std::uint64_t z = (*s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z = z ^ (z >> 31);
    return 0x1.0p-53 * static_cast<double>(z >> 11);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t block) {
    std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (block + 1));
    s ^= s >> 33;
    s *= 0xFF51AFD7ED558CCDULL;
    s ^= s >> 33;
    return s;
}

// Inverse-CDF sampler for the normalized sech jump density e^{ax}/cosh(x)/L.
struct SechJumpSampler {
    double alpha;
    double lo, hi;
    std::vector<double> xs, cdf; // cumulative, cdf.front()=0, cdf.back()=1

    explicit SechJumpSampler(double a, std::size_t cells = 100000) : alpha(a) {
        lo = -45.0 / (1.0 + a);
        hi = 45.0 / (1.0 - a);
        xs.resize(cells + 1);
        cdf.resize(cells + 1);
        for (std::size_t i = 0; i <= cells; ++i)
            xs[i] = lo + (hi - lo) * static_cast<double>(i) / cells;
        // cumulative 5-point Gauss-Legendre per cell
        static const double gx[5] = {-0.906179845938663992797626878299,
                                     -0.538469310105683091036314420700, 0.0,
                                     0.538469310105683091036314420700,
                                     0.906179845938663992797626878299};
        static const double gw[5] = {0.236926885056189087514264040720,
                                     0.478628670499366468041291514836,
                                     0.568888888888888888888888888889,
                                     0.478628670499366468041291514836,
                                     0.236926885056189087514264040720};
        long double acc = 0.0L;
        cdf[0] = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            const double h = 0.5 * (xs[i + 1] - xs[i]);
            const double c = 0.5 * (xs[i + 1] + xs[i]);
            long double v = 0.0L;
            for (int k = 0; k < 5; ++k) v += gw[k] * density(c + h * gx[k]);
            acc += v * h;
            cdf[i + 1] = static_cast<double>(acc);
        }
        const double total = cdf.back();
        for (auto& v : cdf) v /= total;
        cdf.back() = 1.0;
    }

    double density(double x) const { return std::exp(alpha * x) / std::cosh(x); }

    double sample(double u) const {
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t i = static_cast<std::size_t>(it - cdf.begin());
        if (i == 0) i = 1;
        if (i >= cdf.size()) i = cdf.size() - 1;
        const double f0 = cdf[i - 1], f1 = cdf[i];
        double x = xs[i - 1] + (xs[i] - xs[i - 1]) * (u - f0) / (f1 - f0 + 1e-300);
        // two Newton steps on the interpolated cdf (density known exactly)
        const double norm = (f1 - f0) / ((xs[i] - xs[i - 1]) + 1e-300);
        const double scale = norm / (0.5 * (density(xs[i - 1]) + density(xs[i])) + 1e-300);
        for (int it2 = 0; it2 < 2; ++it2) {
            const double F = f0 + 0.5 * (density(xs[i - 1]) + density(x)) * (x - xs[i - 1]) * scale;
            const double d = density(x) * scale;
            if (d > 0.0) x -= (F - u) / d;
            x = std::min(std::max(x, xs[i - 1]), xs[i]);
        }
        return x;
    }
};

} // namespace detail

// Exact simulation of S over an exp(q) or fixed-t horizon for the sech model.
// Reproducible for a given seed regardless of thread count.
inline EmpiricalCdf mc_sup_sech(double alpha, const Horizon& horizon,
                                std::size_t n_samples, std::uint64_t seed,
                                int threads = 1) {
    if (!(std::abs(alpha) < 1.0)) throw DomainError("mc_sup_sech: requires |alpha| < 1");
    if (n_samples < 1) throw DomainError("mc_sup_sech: n_samples must be >= 1");
    const auto model = make_sech_poisson(alpha);
    const double rate = model.jump_rate;
    const detail::SechJumpSampler sampler(alpha);

    EmpiricalCdf out;
    out.n = n_samples;
    out.seed = seed;
    out.samples.resize(n_samples);
    const std::size_t block = 1 << 14;
    const std::size_t n_blocks = (n_samples + block - 1) / block;
    const bool is_expq = horizon.kind == HorizonKind::expq;
    const double hv = horizon.value;
    if (is_expq && !(hv > 0.0)) throw DomainError("mc_sup_sech: q must be > 0");
    if (!is_expq && !(hv > 0.0)) throw DomainError("mc_sup_sech: t must be > 0");
    const double p_jump = is_expq ? rate / (rate + hv) : 0.0;

    detail::parallel_for(n_blocks, threads, [&](std::size_t b) {
        std::uint64_t s = detail::mix_seed(seed, b);
        const std::size_t i0 = b * block;
        const std::size_t i1 = std::min(n_samples, i0 + block);
        for (std::size_t i = i0; i < i1; ++i) {
            double X = 0.0, S = 0.0;
            if (is_expq) {
                // next event is a jump (not the exponential clock) w.p. rate/(rate+q)
                while (detail::splitmix64(&s) < p_jump) {
                    X += sampler.sample(detail::splitmix64(&s));
                    S = std::max(S, X);
                }
            } else {
                double tau = 0.0;
                for (;;) {
                    tau += -std::log(1.0 - detail::splitmix64(&s)) / rate;
                    if (tau > hv) break;
                    X += sampler.sample(detail::splitmix64(&s));
                    S = std::max(S, X);
                }
            }
            out.samples[i] = S;
        }
    });
    std::sort(out.samples.begin(), out.samples.end());
    out.atom_fraction =
        static_cast<double>(std::upper_bound(out.samples.begin(), out.samples.end(), 0.0) -
                            std::lower_bound(out.samples.begin(), out.samples.end(), 0.0)) /
        static_cast<double>(n_samples);
    return out;
}

// ----------------------------------------------------- naive long products

// Unaccelerated partial product over exact grid roots; the acceleration
// oracle. Intentionally free of gamma-ratio/EM machinery.
inline Complex naive_factor_product(const ProcessModel& model, const RootGrid& grid,
                                    FactorSide side, const Complex& z,
                                    std::size_t N_large) {
    if (N_large > 10000000) throw DomainError("naive_factor_product: N_large too big");
    const std::size_t N = std::min<std::size_t>(N_large, (side == FactorSide::minus)
                                                             ? grid.pos.size()
                                                             : grid.neg.size());
    double scale = 1.0, wsign = 1.0;
    auto plans = detail::side_plan(model, Complex(grid.q, 0.0), side, &scale, &wsign);
    const Complex w = wsign * Complex(0.0, 1.0) * z / scale;
    const auto& reps = (side == FactorSide::minus) ? grid.pos : grid.neg;
    Complex lg(0.0, 0.0), prod(1.0, 0.0);
    int chunk = 0;
    const std::size_t nsub = plans.size();
    for (std::size_t j = 1; j <= N; ++j) {
        const auto& plan = plans[(j - 1) % nsub];
        const double m = static_cast<double>((j - 1) / nsub + 1);
        const double xi = std::abs(reps[j - 1].zeta) / scale;
        prod *= (1.0 + w / (m - 1.0 + plan.a)) / (1.0 + w / xi);
        if (++chunk == 64) {
            lg += std::log(prod);
            prod = Complex(1.0, 0.0);
            chunk = 0;
        }
    }
    lg += std::log(prod);
    const double zeta0 =
        (side == FactorSide::minus) ? grid.zero_plus.zeta : grid.zero_minus.zeta;
    return std::exp(lg) / (1.0 + Complex(0.0, 1.0) * z / zeta0);
}

// ------------------------------------------------------- consistency report

struct CheckResult {
    std::string name;
    double q = 0.0;
    double value = 0.0;     // measured residual/deviation
    double tolerance = 0.0;
    bool pass = false;
};

struct ConsistencyReport {
    std::string family;
    std::vector<CheckResult> checks;
    bool all_pass = true;

    void add(std::string name, double q, double value, double tol) {
        checks.push_back({std::move(name), q, value, tol, value <= tol});
        all_pass = all_pass && checks.back().pass;
    }
};

struct ConsistencyOptions {
    int N = 200;
    int K = 60;
    bool fault_inject = false; // perturb zeta_1 by 1e-3 before the factor checks
};

inline ConsistencyReport consistency_report(const ProcessModel& model,
                                            const std::vector<double>& q_list,
                                            const std::vector<Complex>& z_grid,
                                            const ConsistencyOptions& opts = {}) {
    ConsistencyReport rep;
    rep.family = model_family_name(model);
    for (double q : q_list) {
        auto grid = solve_real_q(model, q, opts.N);
        // root residuals and interval membership
        double worst_res = std::max(grid.zero_minus.residual, grid.zero_plus.residual);
        bool inside = true;
        for (int n = 1; n <= grid.N; ++n) {
            worst_res = std::max({worst_res, grid.pos[n - 1].residual,
                                  grid.neg[n - 1].residual});
            inside = inside &&
                     grid.pos[n - 1].zeta > grid.loc.pos[n - 1].lo &&
                     grid.pos[n - 1].zeta < grid.loc.pos[n - 1].hi &&
                     grid.neg[n - 1].zeta > grid.loc.neg[n - 1].lo &&
                     grid.neg[n - 1].zeta < grid.loc.neg[n - 1].hi;
        }
        rep.add("root_residual_max", q, worst_res, 1e-10 * (1.0 + q));
        rep.add("roots_in_intervals", q, inside ? 0.0 : 1.0, 0.5);

        if (opts.fault_inject && grid.N >= 1) {
            grid.pos[0].zeta += 1e-3;
            grid.pos[0].offset += 1e-3;
        }

        // factorization identity on the z grid (product path, so an injected
        // root fault is visible even for the sech model)
        FactorOptions fo_id;
        fo_id.sech_use_closed_form = false;
        auto fplus = make_factor(model, grid, FactorSide::plus, fo_id);
        auto fminus = make_factor(model, grid, FactorSide::minus, fo_id);
        double worst = 0.0;
        for (const auto& z : z_grid) {
            if (std::abs(z) < 1e-9) continue;
            const Complex lhs = phi(fplus, z) * phi(fminus, z) * (q + psi(model, z)) / q;
            worst = std::max(worst, std::abs(lhs - 1.0));
        }
        rep.add("wiener_hopf_identity", q, worst, 1e-7);

        // psi vs Levy-Khintchine quadrature at a few real z
        double worst_lk = 0.0;
        for (double zr : {0.6, 1.7, 3.1}) {
            const Complex a = psi(model, Complex(zr, 0.0));
            const Complex b = psi_lk_quadrature(model, zr);
            worst_lk = std::max(worst_lk, std::abs(a - b));
        }
        rep.add("psi_vs_lk_quadrature", q, worst_lk, 1e-7);

        // normalization of the supremum series
        if (q > 0.0) {
            auto sd = sup_density_expq(model, grid, opts.K);
            rep.add("series_mass_defect", q, sd.mass_defect, 1e-6);
        }

        // Omega cross-check (sinh family, alpha != 0)
        if (const auto* sm = std::get_if<SinhSquareModel>(&model);
            sm && sm->alpha != 0.0 && q > 0.0) {
            auto om_rec = omega_recurrence(model, q, 5);
            double worst_om = 0.0;
            for (int m = 0; m <= 5; ++m) {
                const double od = omega_direct(grid, model, m);
                worst_om = std::max(worst_om,
                                    std::abs(od - om_rec[m]) / std::abs(om_rec[m]));
            }
            rep.add("omega_direct_vs_recurrence", q, worst_om, 1e-6);
        }

        // closed form vs product (sech)
        if (std::get_if<SechPoissonModel>(&model)) {
            FactorOptions fo;
            fo.N = opts.N;
            fo.sech_use_closed_form = false;
            auto fprod = make_factor(model, grid, FactorSide::plus, fo);
            FactorOptions fc;
            fc.N = opts.N;
            auto fcf = make_factor(model, grid, FactorSide::plus, fc);
            double worst_cf = 0.0;
            for (const auto& z : z_grid) {
                const Complex zz(z.real(), std::abs(z.imag()));
                worst_cf = std::max(worst_cf, std::abs(phi(fprod, zz) - phi(fcf, zz)) /
                                                  std::abs(phi(fcf, zz)));
            }
            rep.add("closed_form_vs_product", q, worst_cf, 1e-8);
        }
    }
    return rep;
}

} // namespace levywh

#endif
