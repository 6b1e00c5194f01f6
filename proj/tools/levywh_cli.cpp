// levywh: Wiener-Hopf factors and supremum distributions for the meromorphic
// Levy families (sech-Poisson, sinh^-2, beta family).
//
// Subcommands: roots, factor, density, invert, validate.
// Exit codes: 0 success, 1 validation failure, 2 usage/config error,
//             3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "levywh/config.hpp"
#include "levywh/continuation.hpp"
#include "levywh/distributions.hpp"
#include "levywh/io.hpp"
#include "levywh/models.hpp"
#include "levywh/roots.hpp"
#include "levywh/validation.hpp"
#include "levywh/wh_factors.hpp"

using namespace levywh;

namespace {

struct Common {
    std::string model_file;
    std::string out = "out.csv";
    std::string format = "csv";
    int threads = 1;
};

void add_common(CLI::App* cmd, Common* c) {
    cmd->add_option("--model-file", c->model_file, "flat key=value model file")
        ->required();
    cmd->add_option("--out", c->out, "output path");
    cmd->add_option("--format", c->format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", c->threads, "worker threads for root solving / MC");
}

Json base_meta(const Common& c, const ProcessModel& m) {
    Json j;
    j["model"] = model_to_json(m);
    j["threads"] = c.threads;
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"Wiener-Hopf factorization for meromorphic Levy processes"};
    app.require_subcommand(1);

    // ---- roots
    auto* roots_cmd = app.add_subcommand("roots", "solve q + Psi(i zeta) = 0");
    Common rc;
    double r_q = 1.0;
    int r_N = 100;
    bool r_complex = false;
    double r_umax = 200.0;
    add_common(roots_cmd, &rc);
    roots_cmd->add_option("-q,--q", r_q, "rate of the exponential horizon")->required();
    roots_cmd->add_option("-N,--n-roots", r_N, "roots per side");
    roots_cmd->add_flag("--complex-q", r_complex, "continue roots along q + iu");
    roots_cmd->add_option("--u-max", r_umax, "continuation range for --complex-q");

    // ---- factor
    auto* factor_cmd = app.add_subcommand("factor", "evaluate phi_q^+/- on a z grid");
    Common fc;
    double f_q = 1.0;
    int f_N = 200;
    std::string f_side = "plus";
    std::string f_zgrid = "-10:10:41:lin";
    bool f_compare = false;
    add_common(factor_cmd, &fc);
    factor_cmd->add_option("-q,--q", f_q)->required();
    factor_cmd->add_option("--side", f_side)->check(CLI::IsMember({"plus", "minus"}));
    factor_cmd->add_option("-N,--n-roots", f_N, "product truncation");
    factor_cmd->add_option("--zgrid", f_zgrid, "real-z grid lo:hi:count[:log|lin]");
    factor_cmd->add_flag("--compare-closed-form", f_compare,
                         "sech model: report product vs closed form (JSON)");

    // ---- density
    auto* dens_cmd = app.add_subcommand("density", "supremum density/CDF");
    Common dc;
    double d_q = -1.0, d_t = -1.0, d_q0 = 0.0;
    int d_K = 60, d_N = 300;
    std::string d_xgrid = "0.01:10:200:log";
    add_common(dens_cmd, &dc);
    dens_cmd->add_option("-q,--q", d_q, "exponential-horizon rate (exp(q) mode)");
    dens_cmd->add_option("-t,--t", d_t, "deterministic horizon (fixed-t mode)");
    dens_cmd->add_option("-K,--n-terms", d_K, "series terms");
    dens_cmd->add_option("-N,--n-roots", d_N, "root grid size");
    dens_cmd->add_option("--q0", d_q0, "inversion contour abscissa (default 2/t)");
    dens_cmd->add_option("--xgrid", d_xgrid, "x grid lo:hi:count[:log|lin]");

    // ---- invert
    auto* inv_cmd = app.add_subcommand("invert", "fixed-t density surface p_t(x)");
    Common ic;
    std::string i_tgrid = "0.25:4:16:lin";
    std::string i_xgrid = "0.1:6:40:log";
    double i_q0 = 0.0;
    int i_K = 60;
    add_common(inv_cmd, &ic);
    inv_cmd->add_option("--tgrid", i_tgrid);
    inv_cmd->add_option("--xgrid", i_xgrid);
    inv_cmd->add_option("--q0", i_q0, "contour abscissa (default 2/t per row)");
    inv_cmd->add_option("-K,--n-terms", i_K);

    // ---- validate
    auto* val_cmd = app.add_subcommand("validate", "cross-formula consistency report");
    Common vc;
    std::vector<double> v_q = {0.5, 1.0, 5.0};
    std::size_t v_mc_n = 0;
    std::uint64_t v_seed = 42;
    bool v_fault = false;
    int v_N = 200;
    std::string v_ecdf_out;
    add_common(val_cmd, &vc);
    val_cmd->add_option("-q,--q", v_q, "q values for the suite");
    val_cmd->add_option("--mc-n", v_mc_n, "sech only: Monte Carlo paths (0 = skip)");
    val_cmd->add_option("--seed", v_seed, "Monte Carlo seed");
    val_cmd->add_option("--mc-ecdf-out", v_ecdf_out, "write the empirical CDF as CSV");
    val_cmd->add_option("-N,--n-roots", v_N);
    val_cmd->add_flag("--fault-inject", v_fault, "corrupt zeta_1 to prove detection");

    CLI11_PARSE(app, argc, argv);

    if (roots_cmd->parsed()) {
        auto model = build_model(load_model_config(rc.model_file));
        SolveOptions so;
        so.threads = rc.threads;
        auto grid = solve_real_q(model, r_q, r_N, so);
        Json meta = base_meta(rc, model);
        meta["command"] = "roots";
        meta["q"] = r_q;
        meta["N"] = r_N;
        if (r_complex) {
            auto paths = continue_complex_q(model, grid, r_umax);
            meta["u_max"] = r_umax;
            meta["max_path_residual"] = paths.max_residual;
            write_csv_with_sidecar(rc.out, paths_to_csv(paths), meta);
        } else {
            write_csv_with_sidecar(rc.out, roots_to_csv(grid), meta);
        }
        std::printf("wrote %s (%d roots per side)\n", rc.out.c_str(), r_N);
        return 0;
    }

    if (factor_cmd->parsed()) {
        auto model = build_model(load_model_config(fc.model_file));
        auto grid = solve_real_q(model, f_q, std::min(f_N, 2000),
                                 SolveOptions{5, fc.threads, true});
        FactorOptions fo;
        fo.N = f_N;
        const auto side = f_side == "plus" ? FactorSide::plus : FactorSide::minus;
        auto fp = make_factor(model, grid, side, fo);
        auto zs_re = parse_grid_spec(f_zgrid);
        std::vector<Complex> zs, phis;
        for (double zr : zs_re) {
            zs.emplace_back(zr, 0.0);
            phis.push_back(phi(fp, zs.back()));
        }
        Json meta = base_meta(fc, model);
        meta["command"] = "factor";
        meta["q"] = f_q;
        meta["side"] = f_side;
        meta["N"] = f_N;
        meta["working_truncation"] = fp.M;
        meta["tail_error_estimate"] = fp.tail_err_est;
        if (f_compare) {
            if (!std::holds_alternative<SechPoissonModel>(model))
                throw DomainError("--compare-closed-form requires the sech model");
            FactorOptions fprod = fo;
            fprod.sech_use_closed_form = false;
            auto fp2 = make_factor(model, grid, side, fprod);
            double worst = 0.0;
            Json rows = Json::array();
            for (std::size_t i = 0; i < zs.size(); ++i) {
                const Complex p2 = phi(fp2, zs[i]);
                const double rel = std::abs(p2 - phis[i]) / std::abs(phis[i]);
                worst = std::max(worst, rel);
                rows.push_back({{"z_re", zs[i].real()}, {"rel_diff", rel}});
            }
            meta["closed_form_comparison"] = {{"worst_rel", worst}, {"rows", rows}};
        }
        write_csv_with_sidecar(fc.out, factor_to_csv(zs, phis), meta);
        std::printf("wrote %s (%zu points)\n", fc.out.c_str(), zs.size());
        return 0;
    }

    if (dens_cmd->parsed()) {
        auto model = build_model(load_model_config(dc.model_file));
        if ((d_q > 0.0) == (d_t > 0.0))
            throw DomainError("density: exactly one of --q and --t is required");
        auto xs = parse_grid_spec(d_xgrid);
        Json meta = base_meta(dc, model);
        meta["command"] = "density";
        if (d_q > 0.0) {
            auto grid = solve_real_q(model, d_q, d_N, SolveOptions{5, dc.threads, true});
            auto sd = sup_density_expq(model, grid, d_K);
            std::vector<double> vals, errs;
            for (double x : xs) {
                vals.push_back(sup_density_eval(sd, x));
                // truncation estimate: magnitude of the first dropped term
                errs.push_back(std::abs(sd.tail_mass * sd.exponents.back() *
                                        std::exp(sd.exponents.back() * x)));
            }
            meta["q"] = d_q;
            meta["K"] = sd.K;
            meta["atom"] = sd.atom;
            meta["tail_mass"] = sd.tail_mass;
            meta["normalization_defect"] = sd.mass_defect;
            meta["x_min_recommended"] = sd.x_min_recommended;
            write_csv_with_sidecar(dc.out, density_to_csv(xs, vals, errs), meta);
        } else {
            InversionParams par;
            par.K = d_K;
            par.q0 = d_q0;
            InversionDiagnostics diag;
            FixedTInverter inv(model, par);
            std::vector<double> vals, errs;
            for (double x : xs) {
                vals.push_back(inv.density(d_t, x, &diag));
                errs.push_back(2.0 * diag.envelope_end / d_t);
            }
            meta["t"] = d_t;
            meta["q0"] = par.q0 > 0.0 ? par.q0 : inv.q0_for(d_t);
            meta["u_reached"] = diag.u_reached;
            meta["imag_residual"] = diag.imag_residual;
            write_csv_with_sidecar(dc.out, density_to_csv(xs, vals, errs), meta);
        }
        std::printf("wrote %s (%zu points)\n", dc.out.c_str(), xs.size());
        return 0;
    }

    if (inv_cmd->parsed()) {
        auto model = build_model(load_model_config(ic.model_file));
        auto ts = parse_grid_spec(i_tgrid);
        auto xs = parse_grid_spec(i_xgrid);
        InversionParams par;
        par.K = i_K;
        par.q0 = i_q0;
        FixedTInverter inv(model, par);
        std::vector<std::vector<double>> vals(ts.size());
        InversionDiagnostics diag;
        for (std::size_t i = 0; i < ts.size(); ++i)
            for (double x : xs) vals[i].push_back(inv.density(ts[i], x, &diag));
        Json meta = base_meta(ic, model);
        meta["command"] = "invert";
        meta["u_reached"] = diag.u_reached;
        meta["imag_residual"] = diag.imag_residual;
        write_csv_with_sidecar(ic.out, surface_to_csv(ts, xs, vals), meta);
        std::printf("wrote %s (%zu x %zu surface)\n", ic.out.c_str(), ts.size(),
                    xs.size());
        return 0;
    }

    // validate
    auto model = build_model(load_model_config(vc.model_file));
    std::vector<Complex> zg;
    for (int i = 0; i < 50; ++i) zg.emplace_back(-12.0 + 24.0 * (i + 0.5) / 50.0, 0.0);
    ConsistencyOptions co;
    co.N = v_N;
    co.fault_inject = v_fault;
    auto rep = consistency_report(model, v_q, zg, co);
    Json jrep = report_to_json(rep);
    bool mc_pass = true;
    if (v_mc_n > 0) {
        const auto* sp = std::get_if<SechPoissonModel>(&model);
        if (!sp) throw DomainError("--mc-n requires the sech_poisson model");
        const double q = v_q.empty() ? 1.0 : v_q.front();
        auto ecdf = mc_sup_sech(sp->alpha, Horizon::expq(q), v_mc_n, v_seed, vc.threads);
        auto grid = solve_real_q(model, q, 200);
        auto sd = sup_density_expq(model, grid, 60);
        const double p0 = atom_probability(model, grid);
        const double se0 = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(v_mc_n));
        const double atom_dev = std::abs(ecdf.atom_fraction - p0);
        Json mc;
        mc["n"] = v_mc_n;
        mc["seed"] = v_seed;
        mc["atom_mc"] = ecdf.atom_fraction;
        mc["atom_analytic"] = p0;
        mc["atom_dev_over_se"] = atom_dev / se0;
        double worst_se = 0.0;
        for (int i = 1; i <= 20; ++i) {
            const double u = static_cast<double>(i) / 21.0;
            const double xq =
                ecdf.samples[static_cast<std::size_t>(u * (ecdf.n - 1))];
            const double F = sup_cdf_expq(sd, std::max(0.0, xq));
            const double Fm = ecdf.eval(xq);
            const double se = std::sqrt(std::max(F * (1.0 - F), 1e-12) /
                                        static_cast<double>(v_mc_n));
            worst_se = std::max(worst_se, std::abs(F - Fm) / se);
        }
        mc["cdf_worst_dev_over_se"] = worst_se;
        mc_pass = atom_dev / se0 <= 3.0 && worst_se <= 3.0;
        mc["pass"] = mc_pass;
        jrep["monte_carlo"] = mc;
        if (!v_ecdf_out.empty())
            detail::write_file(v_ecdf_out, ecdf_to_csv(ecdf, 20000));
    }
    detail::write_file(vc.out, jrep.dump(2) + "\n");
    std::printf("wrote %s: %s\n", vc.out.c_str(),
                (rep.all_pass && mc_pass) ? "all checks passed" : "FAILURES present");
    return (rep.all_pass && mc_pass) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
