#pragma once

// JSON run configuration: a single top-level object, schema-checked with
// unknown keys rejected. Expression-valued fields are strings handed to
// the expression language. A manifest written by a previous run (an object
// with "command" and "config" keys) is accepted anywhere a config is,
// which makes runs replayable from their manifests alone.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "waveobs/errors.hpp"
#include "waveobs/problem.hpp"
#include "waveobs/reconstruct.hpp"

namespace waveobs {

using nlohmann::json;

namespace cfg_detail {

inline void reject_unknown(const json& obj, const std::set<std::string>& known,
                           const std::string& where) {
    if (!obj.is_object())
        throw ValidationError("config", where + " must be a JSON object",
                              ErrorCode::config_schema);
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw ValidationError("config",
                                  "unknown key '" + it.key() + "' in " + where,
                                  ErrorCode::config_schema);
}

template <typename T>
T require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key))
        throw ValidationError("config",
                              "missing key '" + key + "' in " + where,
                              ErrorCode::config_schema);
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError("config",
                              "bad value for '" + key + "' in " + where + ": " +
                                  e.what(),
                              ErrorCode::config_schema);
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, const std::string& where,
         T fallback) {
    if (!obj.contains(key)) return fallback;
    return require<T>(obj, key, where);
}

} // namespace cfg_detail

struct GridConfig {
    int nx = 200;
    int nt = 400;
    double T = 1.0;
};

struct ObstimeConfig {
    double horizon = 25.0;
    double t0_min = 0.0;
    double t0_max = 0.0;
    int t0_count = 1;
    bool classify = false;
    std::optional<double> L_override;
};

struct SphericalConfig {
    int n = 3;
    double r1 = 1.0;
    double r2 = 2.0;
    std::string c = "1";
    std::string f = "0";
    std::string phi = "0";
    std::string psi = "0";
    json bc_inner;
    json bc_outer;
    double t0 = 0.0;
    std::string delegate = "simulate";
};

struct RunConfig {
    json raw;
    json problem_spec;
    GridConfig grid;
    ReconstructionMode mode = ReconstructionMode::two_sided;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    int slices = 11;
    int trials = 0;
    int levels = 3;
    std::string study = "reconstruct";
    std::optional<std::string> exact_u;
    std::optional<ObstimeConfig> obstime;
    std::optional<SphericalConfig> spherical;
};

inline BoundaryCondition parse_bc(const json& jb, Side side,
                                  const std::string& where) {
    using namespace cfg_detail;
    reject_unknown(jb, {"kind", "h", "alpha", "beta"}, where);
    const std::string kind = require<std::string>(jb, "kind", where);
    const std::string h_src = get_or<std::string>(jb, "h", where, "0");
    BoundaryFunc h = BoundaryFunc::from_expr(h_src);
    if (kind == "dirichlet") {
        if (jb.contains("alpha") || jb.contains("beta"))
            throw ValidationError("config",
                                  where + ": alpha/beta not allowed for kind '" +
                                      kind + "'",
                                  ErrorCode::config_schema);
        return BoundaryCondition::dirichlet(side, std::move(h));
    }
    if (kind == "neumann") {
        if (jb.contains("alpha") || jb.contains("beta"))
            throw ValidationError("config",
                                  where + ": alpha/beta not allowed for kind '" +
                                      kind + "'",
                                  ErrorCode::config_schema);
        return BoundaryCondition::neumann(side, std::move(h));
    }
    if (kind == "robin") {
        if (jb.contains("beta"))
            throw ValidationError("config", where + ": beta not allowed for robin",
                                  ErrorCode::config_schema);
        return BoundaryCondition::robin(side, require<double>(jb, "alpha", where),
                                        std::move(h));
    }
    if (kind == "dissipative") {
        if (jb.contains("alpha"))
            throw ValidationError("config",
                                  where + ": alpha not allowed for dissipative",
                                  ErrorCode::config_schema);
        return BoundaryCondition::dissipative(
            side, require<double>(jb, "beta", where), std::move(h));
    }
    throw ValidationError("config",
                          where + ": unknown boundary kind '" + kind +
                              "' (dirichlet, neumann, robin, dissipative)",
                          ErrorCode::config_schema);
}

// Builds the Problem from the "problem" object. When "catalog" is present
// the named instance provides the coefficients; explicitly given fields
// override its defaults.
inline Problem build_problem(const json& jp, double validation_T) {
    using namespace cfg_detail;
    reject_unknown(jp,
                   {"catalog", "c", "f", "L", "t0", "phi", "psi", "bc_left",
                    "bc_right", "guard_epsilon"},
                   "problem");
    std::string c_src = "1", f_src = "0";
    if (jp.contains("catalog")) {
        const std::string name = require<std::string>(jp, "catalog", "problem");
        if (name == "linear-unit") c_src = "1";
        else if (name == "nonauto-sin") c_src = "2+sin(t)";
        else if (name == "nonauto-decay") c_src = "exp(-t)";
        else if (name == "quasilinear-small") c_src = "1+0.1*u";
        else if (name == "autonomous-variable") c_src = "1+x*(1-x)";
        else {
            catalog(name); // throws with the list of known names
        }
    } else if (!jp.contains("c")) {
        throw ValidationError("config",
                              "problem needs either 'catalog' or 'c'",
                              ErrorCode::config_schema);
    }
    c_src = get_or<std::string>(jp, "c", "problem", c_src);
    f_src = get_or<std::string>(jp, "f", "problem", f_src);
    const double L = get_or<double>(jp, "L", "problem", 1.0);
    const double t0 = get_or<double>(jp, "t0", "problem", 0.0);
    const std::string phi_src = get_or<std::string>(jp, "phi", "problem", "0");
    const std::string psi_src = get_or<std::string>(jp, "psi", "problem", "0");
    const double eps = get_or<double>(jp, "guard_epsilon", "problem", 0.1);

    BoundaryCondition bl =
        jp.contains("bc_left")
            ? parse_bc(jp.at("bc_left"), Side::left, "problem.bc_left")
            : BoundaryCondition::dirichlet(Side::left, BoundaryFunc::from_expr("0"));
    BoundaryCondition br =
        jp.contains("bc_right")
            ? parse_bc(jp.at("bc_right"), Side::right, "problem.bc_right")
            : BoundaryCondition::dirichlet(Side::right, BoundaryFunc::from_expr("0"));

    return make_problem(coeff_from_expr(c_src), coeff_from_expr(f_src), L, t0,
                        std::move(bl), std::move(br),
                        func1_from_expr(phi_src, expr::Var::x),
                        func1_from_expr(psi_src, expr::Var::x),
                        std::max(validation_T, 1.0), eps);
}

inline ReconstructionMode parse_mode(const std::string& s) {
    if (s == "two_sided") return ReconstructionMode::two_sided;
    if (s == "one_sided_left") return ReconstructionMode::one_sided_left;
    if (s == "one_sided_right") return ReconstructionMode::one_sided_right;
    throw ValidationError("config",
                          "unknown mode '" + s +
                              "' (two_sided, one_sided_left, one_sided_right)",
                          ErrorCode::config_schema);
}

inline RunConfig parse_config(json j) {
    using namespace cfg_detail;
    // Accept a manifest written by a previous run.
    if (j.is_object() && j.contains("command") && j.contains("config"))
        j = j.at("config");

    reject_unknown(j,
                   {"problem", "grid", "mode", "seed", "out_dir", "slices",
                    "trials", "levels", "study", "exact_u", "obstime",
                    "spherical"},
                   "config");
    RunConfig rc;
    rc.raw = j;
    if (!j.contains("problem"))
        throw ValidationError("config", "missing 'problem' object",
                              ErrorCode::config_schema);
    rc.problem_spec = j.at("problem");

    if (j.contains("grid")) {
        const json& jg = j.at("grid");
        reject_unknown(jg, {"nx", "nt", "T"}, "grid");
        rc.grid.nx = require<int>(jg, "nx", "grid");
        rc.grid.nt = require<int>(jg, "nt", "grid");
        rc.grid.T = require<double>(jg, "T", "grid");
    }
    rc.mode = parse_mode(get_or<std::string>(j, "mode", "config", "two_sided"));
    rc.seed = get_or<std::uint64_t>(j, "seed", "config", 0);
    rc.out_dir = get_or<std::string>(j, "out_dir", "config", "out");
    rc.slices = get_or<int>(j, "slices", "config", 11);
    rc.trials = get_or<int>(j, "trials", "config", 0);
    rc.levels = get_or<int>(j, "levels", "config", 3);
    rc.study = get_or<std::string>(j, "study", "config", "reconstruct");
    if (j.contains("exact_u"))
        rc.exact_u = require<std::string>(j, "exact_u", "config");

    if (j.contains("obstime")) {
        const json& jo = j.at("obstime");
        reject_unknown(jo,
                       {"horizon", "t0_min", "t0_max", "t0_count", "classify",
                        "L"},
                       "obstime");
        ObstimeConfig oc;
        oc.horizon = get_or<double>(jo, "horizon", "obstime", 25.0);
        oc.t0_min = get_or<double>(jo, "t0_min", "obstime", 0.0);
        oc.t0_max = get_or<double>(jo, "t0_max", "obstime", oc.t0_min);
        oc.t0_count = get_or<int>(jo, "t0_count", "obstime", 1);
        oc.classify = get_or<bool>(jo, "classify", "obstime", false);
        if (jo.contains("L")) oc.L_override = require<double>(jo, "L", "obstime");
        rc.obstime = oc;
    }

    if (j.contains("spherical")) {
        const json& js = j.at("spherical");
        reject_unknown(js,
                       {"n", "r1", "r2", "c", "f", "phi", "psi", "bc_inner",
                        "bc_outer", "t0", "delegate"},
                       "spherical");
        SphericalConfig sc;
        sc.n = require<int>(js, "n", "spherical");
        sc.r1 = require<double>(js, "r1", "spherical");
        sc.r2 = require<double>(js, "r2", "spherical");
        sc.c = get_or<std::string>(js, "c", "spherical", "1");
        sc.f = get_or<std::string>(js, "f", "spherical", "0");
        sc.phi = get_or<std::string>(js, "phi", "spherical", "0");
        sc.psi = get_or<std::string>(js, "psi", "spherical", "0");
        if (js.contains("bc_inner")) sc.bc_inner = js.at("bc_inner");
        if (js.contains("bc_outer")) sc.bc_outer = js.at("bc_outer");
        sc.t0 = get_or<double>(js, "t0", "spherical", 0.0);
        sc.delegate = get_or<std::string>(js, "delegate", "spherical", "simulate");
        rc.spherical = sc;
    }
    return rc;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("config", "cannot open config file '" + path + "'",
                              ErrorCode::config_schema);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("config",
                              "JSON parse failure in '" + path + "': " + e.what(),
                              ErrorCode::config_schema);
    }
    return parse_config(std::move(j));
}

} // namespace waveobs
