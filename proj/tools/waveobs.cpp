// waveobs: simulate 1-D quasilinear wave mixed problems, record boundary
// observations, analyze observability times, and reconstruct initial data
// from the observations. JSON config in, CSV artifacts + a JSON manifest
// out; exit status 0 on success, 2 on validation failure, 3 on pipeline
// failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "waveobs/config.hpp"
#include "waveobs/csv.hpp"
#include "waveobs/studies.hpp"
#include "waveobs/waveobs.hpp"

namespace fs = std::filesystem;
using namespace waveobs;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonArgs {
    std::string config_path;
    std::string mode;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool mode_set = false, out_set = false, seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON configuration file")
        ->required();
    cmd->add_option("--mode", args.mode,
                    "two_sided | one_sided_left | one_sided_right")
        ->each([&args](const std::string&) { args.mode_set = true; });
    cmd->add_option("--out", args.out_dir, "output directory")
        ->each([&args](const std::string&) { args.out_set = true; });
    cmd->add_option("--seed", args.seed, "RNG seed for random-data studies")
        ->each([&args](const std::string&) { args.seed_set = true; });
}

RunConfig prepare(const CommonArgs& args) {
    RunConfig rc = load_config_file(args.config_path);
    if (args.mode_set) rc.mode = parse_mode(args.mode);
    if (args.out_set) rc.out_dir = args.out_dir;
    if (args.seed_set) rc.seed = args.seed;
    // Echo the effective settings back into the raw config so the manifest
    // replays the run including command-line overrides.
    rc.raw["mode"] = reconstruction_mode_name(rc.mode);
    rc.raw["out_dir"] = rc.out_dir;
    rc.raw["seed"] = rc.seed;
    fs::create_directories(rc.out_dir);
    return rc;
}

std::string out_path(const RunConfig& rc, const std::string& name) {
    return (fs::path(rc.out_dir) / name).string();
}

void write_manifest(const RunConfig& rc, const std::string& command,
                    double wall_seconds, const json& extra = json::object()) {
    json m;
    m["command"] = command;
    m["config"] = rc.raw;
    m["grid"] = {{"nx", rc.grid.nx}, {"nt", rc.grid.nt}, {"T", rc.grid.T}};
    m["seed"] = rc.seed;
    m["version"] = kVersion;
    m["wall_time_s"] = wall_seconds;
    if (!extra.empty()) m["summary"] = extra;
    std::ofstream out(out_path(rc, "manifest.json"));
    out << m.dump(2) << "\n";
}

Grid forward_grid(const Problem& p, const RunConfig& rc) {
    Grid g;
    g.t0 = p.t0;
    g.t1 = p.t0 + rc.grid.T;
    g.nx = rc.grid.nx;
    g.nt = rc.grid.nt;
    g.L = p.L;
    return g;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

ObservationMode scan_mode(ReconstructionMode m) {
    return m == ReconstructionMode::two_sided ? ObservationMode::two_sided
                                              : ObservationMode::one_sided;
}

// ---------------------------------------------------------------------------

void dump_field_slices(const RunConfig& rc, const Field& f) {
    const Grid& g = f.grid;
    const int slices = std::max(2, rc.slices);
    std::vector<double> col_t, col_x, col_u, col_v, col_w;
    for (int s = 0; s < slices; ++s) {
        const int n = int(std::llround(double(s) * g.nt / double(slices - 1)));
        for (int j = 0; j <= g.nx; ++j) {
            if (!f.valid(n, j)) continue;
            const State& st = f.at(n, j);
            col_t.push_back(g.time(n));
            col_x.push_back(g.x(j));
            col_u.push_back(st.u);
            col_v.push_back(st.v);
            col_w.push_back(st.w);
        }
    }
    write_csv(out_path(rc, "field.csv"), {"t", "x", "u", "u_x", "u_t"},
              {col_t, col_x, col_u, col_v, col_w});
}

void dump_curves(const RunConfig& rc, const Problem& p, const Field& f) {
    std::vector<std::string> labels;
    std::vector<double> ts, xs;
    for (CurveLabel l :
         {CurveLabel::x1, CurveLabel::x2, CurveLabel::x3, CurveLabel::x4}) {
        const Curve c = trace_curve(p, f, l);
        for (std::size_t i = 0; i < c.t.size(); ++i) {
            labels.emplace_back(curve_label_name(l));
            ts.push_back(c.t[i]);
            xs.push_back(c.x[i]);
        }
    }
    write_csv(out_path(rc, "curves.csv"), {"curve", "t", "x"},
              {labels, ts, xs});
}

int cmd_simulate(const CommonArgs& args, const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    RunConfig rc = prepare(args);
    const Problem p = build_problem(rc.problem_spec, rc.grid.T);
    const Grid g = forward_grid(p, rc);
    const Field f = simulate_forward(p, g);
    print_warnings(f.warnings);
    dump_field_slices(rc, f);
    dump_curves(rc, p, f);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    write_manifest(rc, command, wall, {{"c1_norm", f.c1_norm()}});
    std::cout << "simulate: " << g.nx << "x" << g.nt << " grid on [0,"
              << p.L << "] x [" << g.t0 << "," << g.t1 << "], C1 norm "
              << f.c1_norm() << "\n"
              << "wrote " << out_path(rc, "field.csv") << ", "
              << out_path(rc, "curves.csv") << "\n";
    return 0;
}

int cmd_observe(const CommonArgs& args, const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    RunConfig rc = prepare(args);
    const Problem p = build_problem(rc.problem_spec, rc.grid.T);
    const Grid g = forward_grid(p, rc);
    const Field f = simulate_forward(p, g);
    print_warnings(f.warnings);

    const Observation ol = extract_observation(f, p.bc_left);
    const Observation orr = extract_observation(f, p.bc_right);
    const TracePair tl = assemble_trace(ol, p.bc_left);
    const TracePair tr = assemble_trace(orr, p.bc_right);
    const double dt = g.dt();

    std::vector<double> times(std::size_t(g.nt) + 1);
    for (int n = 0; n <= g.nt; ++n) times[std::size_t(n)] = g.time(n);
    write_csv(out_path(rc, "observations.csv"), {"t", "k_left", "k_right"},
              {times, ol.k, orr.k});
    write_csv(out_path(rc, "traces.csv"),
              {"t", "a", "b", "a_bar", "b_bar"},
              {times, tl.a, tl.b, tr.a, tr.b});

    std::vector<double> phis(std::size_t(g.nx) + 1), psis(std::size_t(g.nx) + 1);
    for (int j = 0; j <= g.nx; ++j) {
        phis[std::size_t(j)] = p.phi(g.x(j));
        psis[std::size_t(j)] = p.psi(g.x(j));
    }
    json diag;
    diag["norm_k_left"] = discrete_norm(ol.k, ol.d, dt);
    diag["norm_k_right"] = discrete_norm(orr.k, orr.d, dt);
    diag["norm_h_left"] = discrete_norm(
        sample_func(p.bc_left.h.value, g.t0, dt, ol.k.size()), p.bc_left.l(), dt);
    diag["norm_h_right"] = discrete_norm(
        sample_func(p.bc_right.h.value, g.t0, dt, orr.k.size()), p.bc_right.l(),
        dt);
    diag["norm_phi_C2"] = discrete_norm(phis, 2, g.dx());
    diag["norm_psi_C1"] = discrete_norm(psis, 1, g.dx());
    const std::vector<NormedSeries> obs_series{{ol.k, ol.d, dt},
                                               {orr.k, orr.d, dt}};
    const std::vector<NormedSeries> h_series{
        {sample_func(p.bc_left.h.value, g.t0, dt, ol.k.size()), p.bc_left.l(), dt},
        {sample_func(p.bc_right.h.value, g.t0, dt, orr.k.size()), p.bc_right.l(),
         dt}};
    diag["ratio"] = observability_ratio({phis, 2, g.dx()}, {psis, 1, g.dx()},
                                        obs_series, h_series);

    if (rc.trials > 0) {
        const std::vector<double> ratios =
            ratio_study(p, g, rc.trials, rc.seed);
        std::vector<double> idx(ratios.size());
        for (std::size_t i = 0; i < ratios.size(); ++i) idx[i] = double(i);
        write_csv(out_path(rc, "ratio_trials.csv"), {"trial", "ratio"},
                  {idx, ratios});
        diag["ratio_trials_max"] =
            *std::max_element(ratios.begin(), ratios.end());
    }
    std::ofstream(out_path(rc, "diagnostics.json")) << diag.dump(2) << "\n";

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    write_manifest(rc, command, wall, diag);
    std::cout << "observe: wrote " << out_path(rc, "observations.csv") << ", "
              << out_path(rc, "traces.csv") << "\n";
    return 0;
}

int run_reconstruct(const RunConfig& rc, const Problem& p,
                    const std::string& command,
                    const std::chrono::steady_clock::time_point& start) {
    const Grid g = forward_grid(p, rc);
    ReconstructOptions opt;
    opt.nx_out = g.nx;
    const ReconstructionResult rec =
        reconstruct_from_simulation(p, g, rc.mode, opt);
    print_warnings(rec.warnings);

    std::vector<double> phit(rec.x.size()), psit(rec.x.size()),
        ephi(rec.x.size()), epsi(rec.x.size());
    double sup_phi = 0.0, sup_psi = 0.0;
    for (std::size_t j = 0; j < rec.x.size(); ++j) {
        phit[j] = p.phi(rec.x[j]);
        psit[j] = p.psi(rec.x[j]);
        ephi[j] = std::fabs(rec.phi_hat[j] - phit[j]);
        epsi[j] = std::fabs(rec.psi_hat[j] - psit[j]);
        sup_phi = std::max(sup_phi, ephi[j]);
        sup_psi = std::max(sup_psi, epsi[j]);
    }
    write_csv(out_path(rc, "reconstruction.csv"),
              {"x", "phi_hat", "psi_hat", "phi_true", "psi_true", "err_phi",
               "err_psi"},
              {rec.x, rec.phi_hat, rec.psi_hat, phit, psit, ephi, epsi});

    json diag;
    diag["mode"] = reconstruction_mode_name(rc.mode);
    diag["T_tilde"] = rec.T_tilde;
    diag["overlap_mismatch"] = rec.overlap_mismatch;
    diag["ratio"] = rec.ratio;
    diag["guard_epsilon"] = rec.guard.epsilon;
    diag["guard_c1_bound"] = rec.guard.c1_bound;
    diag["guard_passes"] = rec.guard.passes();
    diag["sup_err_phi"] = sup_phi;
    diag["sup_err_psi"] = sup_psi;
    diag["covered_interval"] = {rec.domain_info.s_lo, rec.domain_info.s_hi};
    diag["overlap_at_T_tilde"] = {rec.domain_info.overlap_lo,
                                  rec.domain_info.overlap_hi};
    diag["compat_residual_left"] = rec.compat_residual_left;
    diag["compat_residual_right"] = rec.compat_residual_right;
    diag["warnings"] = rec.warnings;
    std::ofstream(out_path(rc, "diagnostics.json")) << diag.dump(2) << "\n";

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    write_manifest(rc, command, wall, diag);
    std::cout << "reconstruct (" << reconstruction_mode_name(rc.mode)
              << "): T~ = " << rec.T_tilde << ", sup|phi_hat-phi| = " << sup_phi
              << ", sup|psi_hat-psi| = " << sup_psi << ", ratio = " << rec.ratio
              << "\nwrote " << out_path(rc, "reconstruction.csv") << "\n";
    return 0;
}

int cmd_reconstruct(const CommonArgs& args, const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    RunConfig rc = prepare(args);
    const Problem p = build_problem(rc.problem_spec, rc.grid.T);
    return run_reconstruct(rc, p, command, start);
}

int cmd_obstime(const CommonArgs& args, const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    RunConfig rc = prepare(args);
    const Problem p = build_problem(rc.problem_spec, rc.grid.T);
    const ObservationMode m = scan_mode(rc.mode);
    const ObstimeConfig oc = rc.obstime.value_or(ObstimeConfig{});

    json diag;
    const TimeCondition tc = check_time_condition(p, p.t0, rc.grid.T, m);
    diag["integral"] = tc.integral_value;
    diag["threshold"] = tc.threshold;
    diag["passes"] = tc.passes;
    diag["critical"] = tc.critical;

    const MinTimeResult mt =
        min_observability_time(p, p.t0, m, oc.horizon, oc.L_override);
    diag["T_star_found"] = mt.found;
    if (mt.found) diag["T_star"] = mt.T_star;

    try {
        diag["autonomous_bound"] = autonomous_bound(p, m);
    } catch (const ValidationError&) {
        diag["autonomous_bound"] = nullptr; // c depends on t
    }

    if (oc.classify) {
        std::vector<double> t0s(std::size_t(std::max(oc.t0_count, 1)));
        for (int i = 0; i < oc.t0_count; ++i)
            t0s[std::size_t(i)] =
                oc.t0_count == 1
                    ? oc.t0_min
                    : oc.t0_min + (oc.t0_max - oc.t0_min) * double(i) /
                                      double(oc.t0_count - 1);
        const Classification cls = classify_initial_times(
            p, oc.L_override.value_or(p.L), m, t0s, oc.horizon);
        std::vector<double> col_t0, col_T;
        std::vector<std::string> col_status;
        for (const auto& row : cls.rows) {
            col_t0.push_back(row.t0);
            col_T.push_back(row.found ? row.T_star
                                      : std::numeric_limits<double>::quiet_NaN());
            col_status.emplace_back(row.found ? "ok" : "never");
        }
        write_csv(out_path(rc, "obstime.csv"), {"t0", "T_star", "status"},
                  {col_t0, col_T, col_status});
        diag["classification"] = observability_class_name(cls.kind);
        std::cout << "obstime: classification = "
                  << observability_class_name(cls.kind) << "\n";
    }
    std::ofstream(out_path(rc, "diagnostics.json")) << diag.dump(2) << "\n";

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    write_manifest(rc, command, wall, diag);
    std::cout << "obstime: integral = " << tc.integral_value << " vs threshold "
              << tc.threshold << (tc.passes ? " (passes)" : " (fails)")
              << (tc.critical ? " [critical]" : "") << "\n";
    return 0;
}

int cmd_convergence(const CommonArgs& args, const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    RunConfig rc = prepare(args);
    const Problem p = build_problem(rc.problem_spec, rc.grid.T);

    std::vector<double> col_level, col_nx, col_nt, col_err_phi, col_err_psi,
        col_err, col_ratio;
    double prev_err = 0.0;
    for (int lvl = 0; lvl < rc.levels; ++lvl) {
        RunConfig rl = rc;
        rl.grid.nx = rc.grid.nx << lvl;
        rl.grid.nt = rc.grid.nt << lvl;
        const Grid g = forward_grid(p, rl);
        double err_phi = 0.0, err_psi = 0.0, err = 0.0;
        if (rc.study == "forward") {
            if (!rc.exact_u)
                throw ValidationError("config",
                                      "convergence study 'forward' needs "
                                      "'exact_u'",
                                      ErrorCode::config_schema);
            auto ue = expr::Expression::parse(*rc.exact_u);
            const Field f = simulate_forward(p, g);
            for (int n = 0; n <= g.nt; ++n)
                for (int j = 0; j <= g.nx; ++j) {
                    const double vals[6] = {g.time(n), g.x(j), 0, 0, 0, 0};
                    err = std::max(
                        err, std::fabs(f.at(n, j).u - ue.eval_raw(vals)));
                }
        } else if (rc.study == "reconstruct") {
            ReconstructOptions opt;
            opt.nx_out = g.nx;
            const ReconstructionResult rec =
                reconstruct_from_simulation(p, g, rc.mode, opt);
            for (std::size_t j = 0; j < rec.x.size(); ++j) {
                err_phi = std::max(
                    err_phi, std::fabs(rec.phi_hat[j] - p.phi(rec.x[j])));
                err_psi = std::max(
                    err_psi, std::fabs(rec.psi_hat[j] - p.psi(rec.x[j])));
            }
            err = err_phi + err_psi;
        } else {
            throw ValidationError("config",
                                  "unknown study '" + rc.study +
                                      "' (forward, reconstruct)",
                                  ErrorCode::config_schema);
        }
        col_level.push_back(lvl);
        col_nx.push_back(rl.grid.nx);
        col_nt.push_back(rl.grid.nt);
        col_err_phi.push_back(err_phi);
        col_err_psi.push_back(err_psi);
        col_err.push_back(err);
        col_ratio.push_back(lvl == 0 ? std::numeric_limits<double>::quiet_NaN()
                                     : prev_err / err);
        prev_err = err;
        std::cout << "level " << lvl << ": " << rl.grid.nx << "x" << rl.grid.nt
                  << " err = " << err << "\n";
    }
    write_csv(out_path(rc, "convergence.csv"),
              {"level", "nx", "nt", "err_phi", "err_psi", "err", "ratio"},
              {col_level, col_nx, col_nt, col_err_phi, col_err_psi, col_err,
               col_ratio});

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    write_manifest(rc, command, wall);
    std::cout << "wrote " << out_path(rc, "convergence.csv") << "\n";
    return 0;
}

int cmd_spherical(const CommonArgs& args, const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    RunConfig rc = prepare(args);
    if (!rc.spherical)
        throw ValidationError("config",
                              "spherical command needs a 'spherical' object",
                              ErrorCode::config_schema);
    const SphericalConfig& sc = *rc.spherical;
    BoundaryCondition inner =
        sc.bc_inner.is_null()
            ? BoundaryCondition::dirichlet(Side::left, BoundaryFunc::from_expr("0"))
            : parse_bc(sc.bc_inner, Side::left, "spherical.bc_inner");
    BoundaryCondition outer =
        sc.bc_outer.is_null()
            ? BoundaryCondition::dirichlet(Side::right, BoundaryFunc::from_expr("0"))
            : parse_bc(sc.bc_outer, Side::right, "spherical.bc_outer");
    const Problem p = reduce_spherical(
        sc.n, sc.r1, sc.r2, expr::Expression::parse(sc.c),
        expr::Expression::parse(sc.f), func1_from_expr(sc.phi, expr::Var::x),
        func1_from_expr(sc.psi, expr::Var::x), std::move(inner),
        std::move(outer), sc.t0, std::max(rc.grid.T, 1.0));
    std::cout << "spherical: reduced n=" << sc.n << " shell [" << sc.r1 << ","
              << sc.r2 << "] to 1-D problem with L = " << p.L << "\n";

    if (sc.delegate == "simulate") {
        const Grid g = forward_grid(p, rc);
        const Field f = simulate_forward(p, g);
        print_warnings(f.warnings);
        dump_field_slices(rc, f);
        dump_curves(rc, p, f);
        const double wall = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        write_manifest(rc, command, wall, {{"delegate", "simulate"}});
        std::cout << "wrote " << out_path(rc, "field.csv") << "\n";
        return 0;
    }
    if (sc.delegate == "reconstruct")
        return run_reconstruct(rc, p, command, start);
    throw ValidationError("config",
                          "unknown spherical delegate '" + sc.delegate +
                              "' (simulate, reconstruct)",
                          ErrorCode::config_schema);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary observability toolkit for 1-D nonautonomous "
                 "quasilinear wave equations"};
    app.require_subcommand(1);

    CommonArgs args;
    struct Cmd {
        const char* name;
        const char* help;
        int (*fn)(const CommonArgs&, const std::string&);
    };
    const std::vector<Cmd> cmds = {
        {"simulate", "forward mixed solve; dump field slices and curves",
         cmd_simulate},
        {"observe", "simulate and extract boundary observations and traces",
         cmd_observe},
        {"reconstruct",
         "simulate, observe, and reconstruct the initial data", cmd_reconstruct},
        {"obstime", "observability-time condition, minimal time, classification",
         cmd_obstime},
        {"convergence", "grid-doubling error ladder", cmd_convergence},
        {"spherical", "reduce a rotationally symmetric shell problem, then "
                      "delegate", cmd_spherical},
    };
    for (const Cmd& c : cmds) add_common(app.add_subcommand(c.name, c.help), args);

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        for (const Cmd& c : cmds)
            if (name == c.name) return c.fn(args, name);
        std::cerr << "unknown command\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const PipelineError& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
