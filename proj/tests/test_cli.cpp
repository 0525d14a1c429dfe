#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "illumwave/csv.hpp"
#include "illumwave/sha256.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path work_dir() {
    fs::path d = fs::temp_directory_path() / "illumwave_cli_tests";
    fs::create_directories(d);
    return d;
}

CliResult run_cli(const std::string& args) {
    fs::path d = work_dir();
    fs::path out = d / "stdout.txt", err = d / "stderr.txt";
    std::string bin = std::string(ILLUMWAVE_BIN_DIR) + "/illumwave";
    std::string cmd = bin + " " + args + " > " + out.string() + " 2> " + err.string();
    int status = std::system(cmd.c_str());
    CliResult r;
    if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write_json(const std::string& name, const json& j) {
    fs::path p = work_dir() / name;
    std::ofstream out(p);
    out << j.dump(2);
    return p;
}

json concentric_scene(int samples = 400) {
    return {{"body", {{"kind", "sphere"}, {"center", {0, 0, 0}}, {"radius", 1.0}}},
            {"obstacle", {{"kind", "ball"}, {"center", {0, 0, 0}}, {"radius", 0.8}}},
            {"sampling", {{"surface_samples", samples},
                          {"ray_march_step", 0.05},
                          {"box_halfwidth", 3.0}}}};
}

}  // namespace

TEST_CASE("geometry-check passes concentric spheres") {
    fs::path cfg = write_json("scene_ok.json", concentric_scene());
    fs::path out = work_dir() / "geo_ok";
    CliResult r = run_cli("geometry-check --config " + cfg.string() + " --out " +
                          out.string());
    CHECK(r.exit_code == 0);
    json cert = json::parse(slurp(out / "certificate.json"));
    CHECK(cert["pass"].get<bool>());
    CHECK(cert["eta0"].get<double>() == doctest::Approx(0.0));
    CHECK(fs::exists(out / "geometry_manifest.json"));
}

TEST_CASE("geometry-check reports the missing key") {
    json bad = {{"obstacle", {{"kind", "none"}}}};
    fs::path cfg = write_json("scene_bad.json", bad);
    CliResult r = run_cli("geometry-check --config " + cfg.string() + " --out " +
                          (work_dir() / "geo_bad").string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("'body'") != std::string::npos);
}

TEST_CASE("geometry-check fails an uncertifiable scene") {
    json scene = {{"body", {{"kind", "spheroid"},
                            {"center", {0, 0, 0}},
                            {"equatorial_radius", 1.0},
                            {"polar_radius", 3.0}}},
                  {"obstacle", {{"kind", "ball"}, {"radius", 0.8}}},
                  {"sampling", {{"surface_samples", 300}, {"ray_march_step", 0.05}}}};
    fs::path cfg = write_json("scene_fail.json", scene);
    CliResult r = run_cli("geometry-check --config " + cfg.string() + " --out " +
                          (work_dir() / "geo_fail").string());
    CHECK(r.exit_code == 2);
}

TEST_CASE("verify-identity on the zero and gaussian fields") {
    json vcfg = {{"scene", {{"body", {{"kind", "sphere"}, {"radius", 1.0}}},
                            {"obstacle", {{"kind", "none"}}}}},
                 {"solution", "zero"},
                 {"M", 1.5},
                 {"time", 0.5}};
    fs::path cfg = write_json("verify_zero.json", vcfg);
    fs::path out = work_dir() / "verify_zero";
    CliResult r = run_cli("verify-identity --config " + cfg.string() + " --out " +
                          out.string());
    CHECK(r.exit_code == 0);
    std::string csv = slurp(out / "residuals.csv");
    CHECK(csv.find("h,residual,order") == 0);

    vcfg["solution"] = "gaussian";
    cfg = write_json("verify_gauss.json", vcfg);
    r = run_cli("verify-identity --config " + cfg.string() + " --out " +
                (work_dir() / "verify_gauss").string());
    CHECK(r.exit_code == 0);

    vcfg["solution"] = "warp";
    cfg = write_json("verify_unknown.json", vcfg);
    r = run_cli("verify-identity --config " + cfg.string() + " --out " +
                (work_dir() / "verify_unknown").string());
    CHECK(r.exit_code == 1);
}

TEST_CASE("verify-identity rejects stencils that cross the obstacle") {
    json vcfg = {{"scene", concentric_scene()},
                 {"solution", "gaussian"},
                 {"M", 1.5},
                 {"time", 0.5},
                 {"points", {{0.85, 0.0, 0.0}}},
                 {"h_steps", {0.1}}};
    fs::path cfg = write_json("verify_stencil.json", vcfg);
    CliResult r = run_cli("verify-identity --config " + cfg.string() + " --out " +
                          (work_dir() / "verify_stencil").string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("inside obstacle") != std::string::npos);
}

TEST_CASE("simulate and audit a tiny certified run, reproducibly") {
    json run = {{"scene", concentric_scene()},
                {"h", 0.125},
                {"cfl", 0.5},
                {"t_final", 2.0},
                {"box_halfwidth", 2.0},
                {"M", 1.8},
                {"record_dt", 0.25},
                {"nonlinear", true},
                {"allow_reflections", true},
                {"bump", {{"center", {1.25, 0, 0}}, {"radius", 0.4}, {"amplitude", 1.0}}}};
    fs::path cfg = write_json("run_small.json", run);
    fs::path out1 = work_dir() / "run1", out2 = work_dir() / "run2";
    CliResult r1 = run_cli("simulate --config " + cfg.string() + " --out " + out1.string());
    REQUIRE(r1.exit_code == 0);
    CliResult r2 = run_cli("simulate --config " + cfg.string() + " --out " + out2.string());
    REQUIRE(r2.exit_code == 0);
    CHECK(ilw::sha256_file_hex((out1 / "run.csv").string()) ==
          ilw::sha256_file_hex((out2 / "run.csv").string()));

    json audit = {{"run_csv", (out1 / "run.csv").string()},
                  {"manifest", (out1 / "run_manifest.json").string()},
                  {"beta", 0.5}};
    fs::path acfg = write_json("audit_small.json", audit);
    fs::path aout = work_dir() / "audit1";
    CliResult ra = run_cli("audit --config " + acfg.string() + " --out " + aout.string());
    CHECK(ra.exit_code == 0);
    json aj = json::parse(slurp(aout / "audit.json"));
    CHECK(aj["all_pass"].get<bool>());
    bool saw_cone = false;
    for (const auto& e : aj["inequalities"]) {
        if (e["name"] == "exterior_cone") {
            saw_cone = true;
            CHECK(e["worst_margin"].get<double>() >= 0.0);
        }
    }
    CHECK(saw_cone);
}

TEST_CASE("simulate with zero amplitude writes an all-zero series") {
    json run = {{"scene", {{"body", {{"kind", "sphere"}, {"radius", 1.0}}},
                           {"obstacle", {{"kind", "none"}}}}},
                {"h", 0.25},
                {"t_final", 1.0},
                {"box_halfwidth", 1.5},
                {"M", 1.0},
                {"record_dt", 0.5},
                {"allow_reflections", true},
                {"bump", {{"center", {0, 0, 0}}, {"radius", 0.5}, {"amplitude", 0.0}}}};
    fs::path cfg = write_json("run_zero.json", run);
    fs::path out = work_dir() / "run_zero";
    CliResult r = run_cli("simulate --config " + cfg.string() + " --out " + out.string());
    REQUIRE(r.exit_code == 0);
    ilw::CsvTable t = ilw::CsvTable::read((out / "run.csv").string());
    for (size_t c = 0; c < t.columns.size(); ++c) {
        if (t.header[c] == "t" || t.header[c] == "mantle_cells") continue;
        for (double v : t.columns[c]) CHECK(v == 0.0);
    }
}

TEST_CASE("simulate refuses an uncertified scene with exit 2") {
    json run = {{"scene", {{"body", {{"kind", "spheroid"},
                                     {"equatorial_radius", 1.0},
                                     {"polar_radius", 3.0}}},
                           {"obstacle", {{"kind", "ball"}, {"radius", 0.8}}},
                           {"sampling", {{"surface_samples", 200},
                                         {"ray_march_step", 0.05}}}}},
                {"h", 0.25},
                {"t_final", 0.5},
                {"box_halfwidth", 1.5},
                {"M", 9.0},
                {"allow_reflections", true}};
    fs::path cfg = write_json("run_uncert.json", run);
    CliResult r = run_cli("simulate --config " + cfg.string() + " --out " +
                          (work_dir() / "run_uncert").string());
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("not certified") != std::string::npos);
}

TEST_CASE("audit config errors exit 1") {
    json audit = {{"manifest", "nope.json"}};
    fs::path cfg = write_json("audit_bad.json", audit);
    CliResult r = run_cli("audit --config " + cfg.string() + " --out " +
                          (work_dir() / "audit_bad").string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("run_csv") != std::string::npos);
}

TEST_CASE("geometry-check flags under-resolved sampling") {
    json scene = {{"body", {{"kind", "sphere"}, {"center", {0, 0, 0}}, {"radius", 2.1}}},
                  {"obstacle", {{"kind", "dogbone"},
                                {"neck_radius", 0.6},
                                {"bulge_radius", 1.0},
                                {"half_length", 2.0},
                                {"axis", "x"}}},
                  {"sampling", {{"surface_samples", 16},
                                {"ray_march_step", 0.05},
                                {"box_halfwidth", 3.0}}}};
    fs::path cfg = write_json("scene_underres.json", scene);
    fs::path out = work_dir() / "geo_underres";
    CliResult r = run_cli("geometry-check --config " + cfg.string() + " --out " +
                          out.string());
    CHECK(r.exit_code == 2);
    json cert = json::parse(slurp(out / "certificate.json"));
    CHECK(cert["fail_reason"].get<std::string>() == "under-resolved");
}
