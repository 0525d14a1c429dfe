#include <string>

#include <CLI11.hpp>

#include "illumwave/commands.hpp"
#include "illumwave/threading.hpp"

int main(int argc, char** argv) {
    CLI::App app{"illumwave: illuminating-coordinate geometry, multiplier identities "
                 "and decay diagnostics for the quintic wave equation outside obstacles"};
    app.require_subcommand(1);

    std::string config, out = ".";
    int threads = 0;
    uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON config path")->required();
        sub->add_option("--out", out, "output directory");
        sub->add_option("--threads", threads, "worker threads (0: ILLUM_WAVE_THREADS or 1)");
        sub->add_option("--seed", seed, "sampling seed, recorded in the manifest");
    };

    CLI::App* geo = app.add_subcommand("geometry-check",
                                       "certify an illumination scene");
    CLI::App* verify = app.add_subcommand("verify-identity",
                                          "divergence-identity residual sweep");
    CLI::App* sim = app.add_subcommand("simulate", "run the exterior wave solver");
    CLI::App* audit = app.add_subcommand("audit", "audit recorded inequalities");
    for (CLI::App* sub : {geo, verify, sim, audit}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

    int nthreads = ilw::resolve_threads(threads);
    if (geo->parsed()) return ilw::cmd_geometry_check(config, out, nthreads, seed);
    if (verify->parsed()) return ilw::cmd_verify_identity(config, out, nthreads, seed);
    if (sim->parsed()) return ilw::cmd_simulate(config, out, nthreads, seed);
    if (audit->parsed()) return ilw::cmd_audit(config, out, nthreads, seed);
    return 1;
}
