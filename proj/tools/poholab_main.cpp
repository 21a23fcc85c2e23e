#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "poholab/errors.hpp"
#include "poholab/scenarios.hpp"

namespace {

using poholab::cli::RunConfig;
using poholab::cli::RunManifest;

int run_scenario(const std::string& scenario, const std::string& config_path,
                 const std::string& out_dir, long long seed, bool seed_set,
                 const std::string& eps, const std::string& mode) {
    RunConfig config;
    try {
        if (!config_path.empty()) config = poholab::cli::parse_config_file(config_path);
        if (!scenario.empty()) config.scenario = scenario;
        if (scenario == "construct")
            config.scenario = (mode == "two-bubble") ? "construct-two-bubble" : "construct-radial";
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (seed_set) config.seed = static_cast<std::uint64_t>(seed);
        if (!eps.empty()) {
            if (config.scenario == "sweep")
                config.kv["sweep.eps"] = eps;
            else
                config.kv["construct.eps"] = eps;
        }
        if (!mode.empty() && config.scenario == "sweep") config.kv["sweep.mode"] = mode;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    RunManifest manifest;
    const int status = poholab::cli::run(config, manifest);
    if (status != 0) std::fprintf(stderr, "error: %s\n", manifest.error.c_str());
    std::printf("scenario %s -> status %d, outputs in %s\n", config.scenario.c_str(), status,
                config.out_dir.c_str());
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"poholab: Green functions, Pohozaev identities and blow-up families of "
                 "Delta + h on star-shaped domains"};
    app.require_subcommand(1);

    std::string config_path, out_dir, eps, mode;
    long long seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Run configuration file (key = value)");
        cmd->add_option("--out", out_dir, "Output directory");
        cmd->add_option("--seed", seed, "Sampling seed")->each([&](const std::string&) {
            seed_set = true;
        });
    };

    for (const char* verb : {"green", "pohozaev", "radial-solve", "extract"}) {
        add_common(app.add_subcommand(verb));
    }
    {
        CLI::App* c = app.add_subcommand("construct", "Build a blowing-up family");
        add_common(c);
        c->add_option("--mode", mode, "radial | two-bubble")->default_val("radial");
        c->add_option("--eps", eps, "epsilon (overrides construct.eps)");
    }
    {
        CLI::App* c = app.add_subcommand("sweep", "Instability sweep over an eps list");
        add_common(c);
        c->add_option("--mode", mode, "radial | two-bubble");
        c->add_option("--eps", eps, "comma-separated decreasing eps list");
    }
    std::vector<std::string> manifests;
    std::string report_csv = "report.csv";
    {
        CLI::App* c = app.add_subcommand("report", "Consolidate sweep manifests");
        c->add_option("manifests", manifests, "manifest.json paths")->required();
        c->add_option("--out", report_csv, "Summary CSV path");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string verb = app.get_subcommands().front()->get_name();

    if (verb == "report") {
        try {
            const std::string table = poholab::cli::report(manifests, report_csv);
            std::fputs(table.c_str(), stdout);
            return 0;
        } catch (const poholab::ConfigError& e) {
            std::fprintf(stderr, "report error: %s\n", e.what());
            return 2;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "report error: %s\n", e.what());
            return 3;
        }
    }
    return run_scenario(verb, config_path, out_dir, seed, seed_set, eps, mode);
}
