#include "illumwave/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "illumwave/analysis.hpp"
#include "illumwave/certificate.hpp"
#include "illumwave/errors.hpp"
#include "illumwave/identity.hpp"
#include "illumwave/scene.hpp"
#include "illumwave/sha256.hpp"
#include "illumwave/wavesolver.hpp"

namespace ilw {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

json output_entry(const std::string& path) {
    return {{"path", path}, {"sha256", sha256_file_hex(path)}};
}

void write_manifest(const std::string& path, const json& config, const json& extra,
                    const std::vector<std::string>& outputs, uint64_t seed) {
    json m;
    m["tool_version"] = kToolVersion;
    m["created_utc"] = utc_now();
    m["config_hash"] = sha256_hex(config.dump());
    m["seed"] = seed;
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    json outs = json::array();
    for (const auto& o : outputs) outs.push_back(output_entry(o));
    m["outputs"] = outs;
    write_text(path, m.dump(2) + "\n");
}

// A config may hold the scene inline under "scene", reference a file path, or
// (geometry-check only) be the scene itself.
Scene scene_from_config(const json& cfg, const std::string& base_dir) {
    if (cfg.contains("scene")) {
        const json& s = cfg["scene"];
        if (s.is_string()) {
            fs::path p = s.get<std::string>();
            if (p.is_relative()) p = fs::path(base_dir) / p;
            return load_scene_file(p.string());
        }
        return parse_scene(s);
    }
    return parse_scene(cfg);
}

double num_or(const json& j, const char* key, double fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return it->get<double>();
}

SolverConfig parse_solver_config(const json& cfg, int threads) {
    SolverConfig sc;
    sc.h = num_or(cfg, "h", sc.h);
    sc.cfl = num_or(cfg, "cfl", sc.cfl);
    sc.t_final = num_or(cfg, "t_final", sc.t_final);
    sc.box_halfwidth = num_or(cfg, "box_halfwidth", sc.box_halfwidth);
    sc.M = num_or(cfg, "M", sc.M);
    sc.record_dt = num_or(cfg, "record_dt", sc.record_dt);
    sc.nonlinear = cfg.value("nonlinear", true);
    sc.allow_reflections = cfg.value("allow_reflections", false);
    sc.compare_from = num_or(cfg, "compare_from", -1.0);
    if (cfg.contains("checkpoint_times"))
        for (const auto& v : cfg["checkpoint_times"])
            sc.checkpoint_times.push_back(v.get<double>());
    if (cfg.contains("bump")) {
        const json& b = cfg["bump"];
        if (b.contains("center")) {
            const json& c = b["center"];
            if (!c.is_array() || c.size() != 3)
                throw ConfigError("bump.center must be [x, y, z]");
            sc.bump.center = {c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
        }
        sc.bump.radius = num_or(b, "radius", 1.0);
        sc.bump.amplitude = num_or(b, "amplitude", 0.0);
    }
    sc.threads = threads;
    return sc;
}

int run_guarded(const std::function<int()>& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const StencilError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int cmd_geometry_check(const std::string& config_path, const std::string& out_dir,
                       int threads, uint64_t seed) {
    (void)threads;
    return run_guarded([&]() -> int {
        json cfg = load_json_file(config_path);
        Scene scene = scene_from_config(cfg, fs::path(config_path).parent_path().string());
        fs::create_directories(out_dir);

        IlluminationCertificate cert = illuminate(*scene.obstacle, *scene.body,
                                                  scene.sampling);
        std::string cert_path = (fs::path(out_dir) / "certificate.json").string();
        write_text(cert_path, cert.to_json_string() + "\n");

        json extra;
        extra["scene_hash"] = scene.hash();
        extra["verdict"] = cert.pass ? "PASS" : "FAIL";
        write_manifest((fs::path(out_dir) / "geometry_manifest.json").string(), cfg,
                       extra, {cert_path}, seed);

        if (cert.pass) {
            std::cout << "certificate PASS: eta0=" << format_double(cert.eta0)
                      << " cond8_margin=" << format_double(cert.cond8_margin) << "\n";
            return 0;
        }
        std::cout << "certificate FAIL: " << cert.fail_reason << "\n";
        return 2;
    });
}

int cmd_verify_identity(const std::string& config_path, const std::string& out_dir,
                        int threads, uint64_t seed) {
    (void)threads;
    return run_guarded([&]() -> int {
        json cfg = load_json_file(config_path);
        Scene scene = scene_from_config(cfg, fs::path(config_path).parent_path().string());
        if (!cfg.contains("solution"))
            throw ConfigError("verify-identity: missing key 'solution'");
        const ManufacturedSolution& sol =
            manufactured_solution(cfg["solution"].get<std::string>());
        double M = num_or(cfg, "M", 2.0 * scene.body->rho2_max());
        double t = num_or(cfg, "time", 0.5);

        std::vector<Vec3> points;
        if (cfg.contains("points")) {
            for (const auto& p : cfg["points"]) {
                if (!p.is_array() || p.size() != 3)
                    throw ConfigError("verify-identity: points entries must be [x, y, z]");
                points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
            }
        } else {
            points = {{1.7, 0.4, 0.3}, {2.2, -0.8, 0.6}, {1.9, 1.1, -0.7}};
        }
        std::vector<double> h_steps;
        if (cfg.contains("h_steps"))
            for (const auto& v : cfg["h_steps"]) h_steps.push_back(v.get<double>());
        else
            h_steps = {2e-2, 1e-2, 5e-3, 2.5e-3};

        const Obstacle* obs = scene.obstacle->empty() ? nullptr : scene.obstacle.get();
        auto rows = residual_table(*scene.body, M, sol, points, t, h_steps, obs);

        fs::create_directories(out_dir);
        CsvTable csv;
        csv.add_column("h");
        csv.add_column("residual");
        csv.add_column("order");
        for (const auto& r : rows) csv.append_row({r.h, r.residual, r.order});
        std::string csv_path = (fs::path(out_dir) / "residuals.csv").string();
        csv.write(csv_path);

        double max_res = 0.0;
        for (const auto& r : rows) max_res = std::max(max_res, r.residual);
        double order = fitted_order(rows);
        bool all_zero = max_res <= 1e-14;
        bool pass = all_zero || order >= 1.5;

        json extra;
        extra["solution"] = sol.id;
        extra["fitted_order"] = order;
        extra["verdict"] = pass ? "PASS" : "FAIL";
        write_manifest((fs::path(out_dir) / "verify_manifest.json").string(), cfg, extra,
                       {csv_path}, seed);

        std::cout << "identity residual order=" << format_double(order)
                  << (pass ? " PASS" : " FAIL") << "\n";
        return pass ? 0 : 2;
    });
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, int threads,
                 uint64_t seed) {
    return run_guarded([&]() -> int {
        json cfg = load_json_file(config_path);
        Scene scene = scene_from_config(cfg, fs::path(config_path).parent_path().string());
        SolverConfig sc = parse_solver_config(cfg, threads);
        fs::create_directories(out_dir);

        json aggregates;
        std::vector<std::string> outputs;
        if (!scene.obstacle->empty()) {
            IlluminationCertificate cert =
                illuminate(*scene.obstacle, *scene.body, scene.sampling);
            std::string cert_path = (fs::path(out_dir) / "certificate.json").string();
            write_text(cert_path, cert.to_json_string() + "\n");
            outputs.push_back(cert_path);
            if (!cert.pass) {
                std::cout << "scene not certified: " << cert.fail_reason << "\n";
                json extra;
                extra["scene_hash"] = scene.hash();
                extra["verdict"] = "UNCERTIFIED";
                write_manifest((fs::path(out_dir) / "run_manifest.json").string(), cfg,
                               extra, outputs, seed);
                return 2;
            }
            sc.eta0 = cert.eta0;
            aggregates = {{"eta0", cert.eta0},    {"epsilon", cert.epsilon},
                          {"a0", cert.a0},        {"cond8_margin", cert.cond8_margin},
                          {"certified", true},    {"rho2_max", cert.rho2_max}};
        } else {
            sc.eta0 = 0.0;
            aggregates = {{"eta0", 0.0}, {"epsilon", 1.0}, {"certified", false},
                          {"rho2_max", scene.body->rho2_max()}};
        }

        Grid grid = build_grid(scene.body, scene.obstacle,
                               {sc.box_halfwidth, sc.h}, threads);

        auto sink = [&](const Grid& g, const std::vector<double>& uc,
                        const std::vector<double>& up, double t, double dt) {
            char name[64];
            std::snprintf(name, sizeof(name), "ckpt_t%.6f.bin", t);
            std::string path = (fs::path(out_dir) / name).string();
            WaveState snap;
            snap.t = t;
            snap.dt = dt;
            snap.u_curr = uc;
            snap.u_prev = up;
            write_checkpoint(path, g, snap);
            outputs.push_back(path);
        };

        RunResult result = run_simulation(grid, sc, sink);

        std::string csv_path = (fs::path(out_dir) / "run.csv").string();
        result.series.write(csv_path);
        outputs.insert(outputs.begin(), csv_path);

        json extra;
        extra["scene_hash"] = scene.hash();
        extra["scene_aggregates"] = aggregates;
        extra["run_meta"] = {{"h", result.meta.h},
                             {"dt", result.meta.dt},
                             {"L", result.meta.L},
                             {"M", result.meta.M},
                             {"eta0", result.meta.eta0},
                             {"epsilon", result.meta.epsilon},
                             {"steps", result.meta.steps},
                             {"energy_initial", result.meta.energy_initial},
                             {"aborted", result.meta.aborted},
                             {"abort_reason", result.meta.abort_reason}};
        write_manifest((fs::path(out_dir) / "run_manifest.json").string(), cfg, extra,
                       outputs, seed);

        if (result.meta.aborted) {
            std::cout << "simulation aborted: " << result.meta.abort_reason << "\n";
            return 2;
        }
        std::cout << "simulation done: steps=" << result.meta.steps
                  << " E0=" << format_double(result.meta.energy_initial) << "\n";
        return 0;
    });
}

int cmd_audit(const std::string& config_path, const std::string& out_dir, int threads,
              uint64_t seed) {
    (void)threads;
    return run_guarded([&]() -> int {
        json cfg = load_json_file(config_path);
        std::string base = fs::path(config_path).parent_path().string();
        auto resolve = [&](const std::string& p) {
            fs::path fp = p;
            if (fp.is_relative()) fp = fs::path(base) / fp;
            return fp.string();
        };
        if (!cfg.contains("run_csv")) throw ConfigError("audit: missing key 'run_csv'");
        if (!cfg.contains("manifest")) throw ConfigError("audit: missing key 'manifest'");
        CsvTable series = CsvTable::read(resolve(cfg["run_csv"].get<std::string>()));
        json manifest = load_json_file(resolve(cfg["manifest"].get<std::string>()));

        SeriesMeta meta;
        const json& rm = manifest.at("run_meta");
        meta.energy_initial = rm.at("energy_initial").get<double>();
        meta.M = rm.at("M").get<double>();
        meta.eta0 = rm.at("eta0").get<double>();
        meta.epsilon = rm.at("epsilon").get<double>();
        meta.h = rm.at("h").get<double>();
        meta.dt = rm.at("dt").get<double>();
        if (rm.at("aborted").get<bool>())
            throw DomainError("audit: refusing an aborted run series");

        double beta = num_or(cfg, "beta", 0.5);
        AnalysisReport report = audit_run(series, meta, beta);

        json extra;
        bool stability_checked = false;
        double fit_shift = 0.0;
        if (cfg.contains("refined_run_csv")) {
            CsvTable refined = CsvTable::read(resolve(cfg["refined_run_csv"].get<std::string>()));
            json rmanifest = load_json_file(resolve(cfg.at("refined_manifest").get<std::string>()));
            SeriesMeta rmeta = meta;
            const json& rrm = rmanifest.at("run_meta");
            rmeta.energy_initial = rrm.at("energy_initial").get<double>();
            rmeta.h = rrm.at("h").get<double>();
            rmeta.dt = rrm.at("dt").get<double>();
            AnalysisReport rrep = audit_run(refined, rmeta, beta);
            fit_shift = fit_relative_shift(report.fit, rrep.fit);
            AuditEntry e;
            e.name = "fit_stability";
            e.worst_margin = 0.2 - fit_shift;
            e.pass = fit_shift <= 0.2;
            e.detail = "relative shift under refinement";
            report.entries.push_back(e);
            stability_checked = true;
        }

        fs::create_directories(out_dir);
        json out_json = report.to_json();
        if (stability_checked) out_json["fit_stability_shift"] = fit_shift;
        std::string audit_path = (fs::path(out_dir) / "audit.json").string();
        write_text(audit_path, out_json.dump(2) + "\n");
        CsvTable plot = audit_plot_table(series, meta, report);
        std::string plot_path = (fs::path(out_dir) / "audit_plot.csv").string();
        plot.write(plot_path);

        write_manifest((fs::path(out_dir) / "audit_manifest.json").string(), cfg, extra,
                       {audit_path, plot_path}, seed);

        for (const auto& e : report.entries)
            std::cout << (e.pass ? "PASS " : "FAIL ") << e.name
                      << " margin=" << format_double(e.worst_margin) << "\n";
        return report.all_pass() ? 0 : 2;
    });
}

}  // namespace ilw
