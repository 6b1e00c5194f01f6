#ifndef LEVYWH_IO_HPP
#define LEVYWH_IO_HPP

// CSV/JSON serialization. CSV numbers carry 17 significant digits so doubles
// round-trip; identical inputs produce byte-identical files.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "continuation.hpp"
#include "distributions.hpp"
#include "errors.hpp"
#include "models.hpp"
#include "roots.hpp"
#include "validation.hpp"

namespace levywh {

using Json = nlohmann::json;

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_file(const std::string& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path);
    os << body;
}

} // namespace detail

inline Json model_to_json(const ProcessModel& m) {
    Json j;
    j["family"] = model_family_name(m);
    std::visit(
        [&](const auto& mm) {
            using T = std::decay_t<decltype(mm)>;
            if constexpr (std::is_same_v<T, SechPoissonModel>) {
                j["alpha"] = mm.alpha;
            } else if constexpr (std::is_same_v<T, SinhSquareModel>) {
                j["alpha"] = mm.alpha;
                j["sigma"] = mm.sigma;
                j["mu"] = mm.mu;
                j["gamma"] = mm.gamma_c;
                j["rho"] = mm.rho_c;
            } else {
                j["c1"] = mm.s1.c;
                j["c2"] = mm.s2.c;
                j["alpha1"] = mm.s1.a;
                j["alpha2"] = mm.s2.a;
                j["beta1"] = mm.s1.b;
                j["beta2"] = mm.s2.b;
                j["lambda1"] = mm.s1.lam;
                j["lambda2"] = mm.s2.lam;
                j["sigma"] = mm.sigma;
                j["mu"] = mm.mu;
                if (mm.gamma_c) j["gamma"] = *mm.gamma_c;
                if (mm.rho_c) j["rho"] = *mm.rho_c;
            }
        },
        m);
    return j;
}

inline std::string roots_to_csv(const RootGrid& g) {
    std::string s = "n,zeta,residual,interval_lo,interval_hi\n";
    auto row = [&](const std::string& n, const RootRep& r, const Interval& iv) {
        s += n + "," + detail::fmt17(r.zeta) + "," + detail::fmt17(r.residual) + "," +
             detail::fmt17(iv.lo) + "," + detail::fmt17(iv.hi) + "\n";
    };
    for (int n = g.N; n >= 1; --n)
        row(std::to_string(-n), g.neg[n - 1], g.loc.neg[n - 1]);
    row("0-", g.zero_minus, g.loc.zero_minus);
    row("0+", g.zero_plus, g.loc.zero_plus);
    for (int n = 1; n <= g.N; ++n)
        row(std::to_string(n), g.pos[n - 1], g.loc.pos[n - 1]);
    return s;
}

inline std::string paths_to_csv(const ComplexRootPath& p) {
    std::string s = "u,n,zeta_re,zeta_im\n";
    auto label = [&](std::size_t i) -> std::string {
        if (i == 0) return "0-";
        if (i == 1) return "0+";
        return std::to_string(p.labels[i]);
    };
    for (std::size_t j = 0; j < p.u_grid.size(); ++j)
        for (std::size_t i = 0; i < p.paths.size(); ++i)
            s += detail::fmt17(p.u_grid[j]) + "," + label(i) + "," +
                 detail::fmt17(p.paths[i][j].real()) + "," +
                 detail::fmt17(p.paths[i][j].imag()) + "\n";
    return s;
}

inline std::string factor_to_csv(const std::vector<Complex>& zs,
                                 const std::vector<Complex>& phis) {
    std::string s = "z_re,z_im,phi_re,phi_im\n";
    for (std::size_t i = 0; i < zs.size(); ++i)
        s += detail::fmt17(zs[i].real()) + "," + detail::fmt17(zs[i].imag()) + "," +
             detail::fmt17(phis[i].real()) + "," + detail::fmt17(phis[i].imag()) + "\n";
    return s;
}

inline std::string density_to_csv(const std::vector<double>& xs,
                                  const std::vector<double>& vals,
                                  const std::vector<double>& errs) {
    std::string s = "x,value,error_estimate\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        s += detail::fmt17(xs[i]) + "," + detail::fmt17(vals[i]) + "," +
             detail::fmt17(errs.empty() ? 0.0 : errs[i]) + "\n";
    return s;
}

inline std::string surface_to_csv(const std::vector<double>& ts,
                                  const std::vector<double>& xs,
                                  const std::vector<std::vector<double>>& vals) {
    std::string s = "t,x,p_t\n";
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j)
            s += detail::fmt17(ts[i]) + "," + detail::fmt17(xs[j]) + "," +
                 detail::fmt17(vals[i][j]) + "\n";
    return s;
}

inline std::string ecdf_to_csv(const EmpiricalCdf& e, std::size_t max_rows = 0) {
    std::string s = "x,cdf\n";
    const std::size_t step =
        (max_rows && e.samples.size() > max_rows) ? e.samples.size() / max_rows : 1;
    for (std::size_t i = 0; i < e.samples.size(); i += step)
        s += detail::fmt17(e.samples[i]) + "," +
             detail::fmt17(static_cast<double>(i + 1) / static_cast<double>(e.n)) + "\n";
    return s;
}

inline Json report_to_json(const ConsistencyReport& rep) {
    Json j;
    j["family"] = rep.family;
    j["all_pass"] = rep.all_pass;
    j["checks"] = Json::array();
    for (const auto& c : rep.checks) {
        Json jc;
        jc["name"] = c.name;
        jc["q"] = c.q;
        jc["value"] = c.value;
        jc["tolerance"] = c.tolerance;
        jc["pass"] = c.pass;
        j["checks"].push_back(jc);
    }
    return j;
}

inline void write_csv_with_sidecar(const std::string& path, const std::string& csv,
                                   const Json& meta) {
    detail::write_file(path, csv);
    detail::write_file(path + ".meta.json", meta.dump(2) + "\n");
}

} // namespace levywh

#endif
