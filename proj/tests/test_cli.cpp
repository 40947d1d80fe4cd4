#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kBin = WAVEOBS_BIN;

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path log = dir / "run.log";
    const std::string cmd =
        kBin + " " + args + " > " + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    int code = -1;
    if (WIFEXITED(rc)) code = WEXITSTATUS(rc);
    return {code, ss.str()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("waveobs_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kReconstructConfig = R"json({
  "problem": {
    "catalog": "linear-unit",
    "phi": "0.05*sin(3.14159265358979312*x)",
    "psi": "0",
    "bc_left": {"kind": "dirichlet", "h": "0"},
    "bc_right": {"kind": "dirichlet", "h": "0"}
  },
  "grid": {"nx": 64, "nt": 160, "T": 1.2},
  "mode": "two_sided",
  "seed": 42
})json";

} // namespace

TEST_CASE("schema violations exit with status 2") {
    const fs::path dir = fresh_dir("schema");
    write_file(dir / "bad.json", R"json({"problem": {"c": "1"}, "gird": {}})json");
    const RunResult r = run_cli(
        "simulate --config " + (dir / "bad.json").string() + " --out " +
            (dir / "out").string(),
        dir);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("unknown key") != std::string::npos);

    write_file(dir / "badexpr.json",
               R"json({"problem": {"c": "1 +"}, "grid": {"nx": 64, "nt": 160, "T": 1.0}})json");
    const RunResult r2 = run_cli(
        "simulate --config " + (dir / "badexpr.json").string() + " --out " +
            (dir / "out2").string(),
        dir);
    CHECK(r2.exit_code == 2);
}

TEST_CASE("reconstruct succeeds above the threshold and fails below") {
    const fs::path dir = fresh_dir("reconstruct");
    write_file(dir / "config.json", kReconstructConfig);

    const RunResult ok = run_cli(
        "reconstruct --config " + (dir / "config.json").string() + " --out " +
            (dir / "ok").string(),
        dir);
    REQUIRE(ok.exit_code == 0);
    REQUIRE(fs::exists(dir / "ok" / "reconstruction.csv"));
    REQUIRE(fs::exists(dir / "ok" / "manifest.json"));
    const std::string csv = slurp(dir / "ok" / "reconstruction.csv");
    CHECK(csv.rfind("x,phi_hat,psi_hat,phi_true,psi_true,err_phi,err_psi\n",
                    0) == 0);

    // T = 0.9 < L: pipeline failure with the non-intersection diagnostic.
    std::string below = kReconstructConfig;
    below.replace(below.find("\"T\": 1.2"), 8, "\"T\": 0.9");
    write_file(dir / "below.json", below);
    const RunResult bad = run_cli(
        "reconstruct --config " + (dir / "below.json").string() + " --out " +
            (dir / "bad").string(),
        dir);
    CHECK(bad.exit_code == 3);
    CHECK(bad.output.find("do not intersect") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    const fs::path dir = fresh_dir("determinism");
    write_file(dir / "config.json", kReconstructConfig);
    const RunResult a = run_cli(
        "reconstruct --config " + (dir / "config.json").string() + " --out " +
            (dir / "a").string(),
        dir);
    const RunResult b = run_cli(
        "reconstruct --config " + (dir / "config.json").string() + " --out " +
            (dir / "b").string(),
        dir);
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(slurp(dir / "a" / "reconstruction.csv") ==
          slurp(dir / "b" / "reconstruction.csv"));
    CHECK(slurp(dir / "a" / "diagnostics.json") ==
          slurp(dir / "b" / "diagnostics.json"));
}

TEST_CASE("a run can be replayed from its manifest alone") {
    const fs::path dir = fresh_dir("replay");
    write_file(dir / "config.json", kReconstructConfig);
    const RunResult a = run_cli(
        "reconstruct --config " + (dir / "config.json").string() + " --out " +
            (dir / "a").string(),
        dir);
    REQUIRE(a.exit_code == 0);
    // Replay with the manifest as the config; output directory overridden.
    const RunResult b = run_cli(
        "reconstruct --config " + (dir / "a" / "manifest.json").string() +
            " --out " + (dir / "b").string(),
        dir);
    REQUIRE(b.exit_code == 0);
    CHECK(slurp(dir / "a" / "reconstruction.csv") ==
          slurp(dir / "b" / "reconstruction.csv"));
}

TEST_CASE("obstime classification table") {
    const fs::path dir = fresh_dir("obstime");
    write_file(dir / "config.json", R"json({
      "problem": {"catalog": "nonauto-decay"},
      "grid": {"nx": 64, "nt": 160, "T": 1.0},
      "mode": "two_sided",
      "obstime": {"classify": true, "t0_min": -2.0, "t0_max": 2.0,
                  "t0_count": 41, "horizon": 25.0}
    })json");
    const RunResult r = run_cli(
        "obstime --config " + (dir / "config.json").string() + " --out " +
            (dir / "out").string(),
        dir);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("classification = some") != std::string::npos);

    // The status column flips from ok to never at t0 = 0.
    std::ifstream csv(dir / "out" / "obstime.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "t0,T_star,status");
    bool ok_before = false, never_after = false;
    while (std::getline(csv, line)) {
        const auto c1 = line.find(',');
        const double t0 = std::stod(line.substr(0, c1));
        const bool ok = line.find("ok") != std::string::npos;
        if (t0 < -0.15) ok_before = ok_before || ok;
        if (t0 > 0.05) never_after = never_after || !ok;
        if (t0 < -0.15) CHECK(ok);
        if (t0 > 0.05) CHECK_FALSE(ok);
    }
    CHECK(ok_before);
    CHECK(never_after);
}

TEST_CASE("simulate and spherical delegate produce field artifacts") {
    const fs::path dir = fresh_dir("spherical");
    write_file(dir / "config.json", R"json({
      "problem": {"catalog": "linear-unit"},
      "grid": {"nx": 64, "nt": 256, "T": 0.5},
      "spherical": {"n": 3, "r1": 1.0, "r2": 2.0, "c": "1", "f": "0",
                    "phi": "0.01*sin(3.14159265358979312*x)", "psi": "0",
                    "delegate": "simulate"}
    })json");
    const RunResult r = run_cli(
        "spherical --config " + (dir / "config.json").string() + " --out " +
            (dir / "out").string(),
        dir);
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(dir / "out" / "field.csv"));
    CHECK(fs::exists(dir / "out" / "curves.csv"));
    CHECK(r.output.find("L = 1") != std::string::npos);
}

TEST_CASE("convergence ladder against a closed form") {
    const fs::path dir = fresh_dir("convergence");
    write_file(dir / "config.json", R"json({
      "problem": {
        "catalog": "linear-unit",
        "phi": "0.05*sin(3.14159265358979312*x)",
        "psi": "0"
      },
      "grid": {"nx": 32, "nt": 64, "T": 1.0},
      "study": "forward",
      "exact_u": "0.05*sin(3.14159265358979312*x)*cos(3.14159265358979312*t)",
      "levels": 3
    })json");
    const RunResult r = run_cli(
        "convergence --config " + (dir / "config.json").string() + " --out " +
            (dir / "out").string(),
        dir);
    REQUIRE(r.exit_code == 0);
    REQUIRE(fs::exists(dir / "out" / "convergence.csv"));
    // Last ladder ratio should sit near 2 (first-order halving).
    std::ifstream csv(dir / "out" / "convergence.csv");
    std::string line, last;
    std::getline(csv, line);
    while (std::getline(csv, line))
        if (!line.empty()) last = line;
    const double ratio = std::stod(last.substr(last.rfind(',') + 1));
    CHECK(ratio > 1.5);
    CHECK(ratio < 2.6);
}
