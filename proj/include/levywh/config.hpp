#ifndef LEVYWH_CONFIG_HPP
#define LEVYWH_CONFIG_HPP

// Flat key=value model configuration. Unknown keys are rejected; invariant
// violations surface with the violated constraint named.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "models.hpp"

namespace levywh {

struct ModelConfig {
    std::map<std::string, std::string> kv;

    bool has(const std::string& k) const { return kv.count(k) != 0; }
    double num(const std::string& k) const {
        auto it = kv.find(k);
        if (it == kv.end()) throw DomainError("model config: missing key '" + k + "'");
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(it->second, &pos);
        } catch (...) {
            throw DomainError("model config: key '" + k + "' is not a number");
        }
        if (pos != it->second.size())
            throw DomainError("model config: key '" + k + "' is not a number");
        return v;
    }
    double num_or(const std::string& k, double dflt) const {
        return has(k) ? num(k) : dflt;
    }
};

inline ModelConfig parse_model_config(std::istream& in) {
    ModelConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        auto l = line.find_first_not_of(" \t\r");
        if (l == std::string::npos) continue;
        auto r = line.find_last_not_of(" \t\r");
        line = line.substr(l, r - l + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("model config: line " + std::to_string(lineno) +
                              " is not key=value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw DomainError("model config: empty key or value on line " +
                              std::to_string(lineno));
        if (!cfg.kv.emplace(key, val).second)
            throw DomainError("model config: duplicate key '" + key + "'");
    }
    return cfg;
}

inline ModelConfig load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open model file: " + path);
    return parse_model_config(in);
}

inline ProcessModel build_model(const ModelConfig& cfg) {
    auto it = cfg.kv.find("family");
    if (it == cfg.kv.end()) throw DomainError("model config: missing key 'family'");
    const std::string fam = it->second;
    auto check_keys = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [k, v] : cfg.kv) {
            (void)v;
            if (k == "family") continue;
            bool ok = false;
            for (const char* a : allowed)
                if (k == a) ok = true;
            if (!ok) throw DomainError("model config: unknown key '" + k + "' for family " + fam);
        }
    };
    if (fam == "sech_poisson") {
        check_keys({"alpha"});
        return make_sech_poisson(cfg.num("alpha"));
    }
    if (fam == "sinh_square") {
        check_keys({"alpha", "sigma", "mu"});
        return make_sinh_square(cfg.num("alpha"), cfg.num("sigma"), cfg.num("mu"));
    }
    if (fam == "beta_family") {
        check_keys({"c1", "c2", "alpha1", "alpha2", "beta1", "beta2", "lambda1",
                    "lambda2", "sigma", "mu"});
        return make_beta_family(cfg.num("c1"), cfg.num("c2"), cfg.num("alpha1"),
                                cfg.num("alpha2"), cfg.num("beta1"), cfg.num("beta2"),
                                cfg.num("lambda1"), cfg.num("lambda2"),
                                cfg.num("sigma"), cfg.num("mu"));
    }
    throw DomainError("model config: unknown family '" + fam +
                      "' (expected sech_poisson, sinh_square or beta_family)");
}

// "lo:hi:count[:log|lin]"
inline std::vector<double> parse_grid_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() < 3 || parts.size() > 4)
        throw DomainError("grid spec must be lo:hi:count[:log|lin]: " + spec);
    const double lo = std::stod(parts[0]);
    const double hi = std::stod(parts[1]);
    const int count = std::stoi(parts[2]);
    const bool logsp = parts.size() == 4 ? parts[3] == "log" : false;
    if (parts.size() == 4 && parts[3] != "log" && parts[3] != "lin")
        throw DomainError("grid spec scale must be log or lin: " + spec);
    if (count < 1 || !(hi >= lo)) throw DomainError("bad grid spec: " + spec);
    if (logsp && !(lo > 0.0)) throw DomainError("log grid requires lo > 0: " + spec);
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        g[i] = logsp ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
    }
    return g;
}

} // namespace levywh

#endif
