#include <chrono>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "degenera/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"degenera: weighted Sobolev verification and degenerate elliptic solver"};
    app.require_subcommand(1);

    std::string config_path, out_dir, seed;
    const char* commands[] = {"verify", "density", "inequality", "poincare", "solve", "example8"};
    for (const char* cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd);
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "random seed (overrides config)");
    }

    CLI11_PARSE(app, argc, argv);
    std::string command = app.get_subcommands().front()->get_name();

    try {
        degenera::Config cfg = degenera::Config::parse_file(config_path);
        degenera::RunConfig rc = degenera::RunConfig::from_config(std::move(cfg), out_dir, seed);
        if (rc.command != command) {
            std::fprintf(stderr, "error: config declares command `%s`, CLI asked for `%s`\n",
                         rc.command.c_str(), command.c_str());
            return 1;
        }
        auto t0 = std::chrono::steady_clock::now();
        degenera::RunReport rep = degenera::run(rc);
        auto t1 = std::chrono::steady_clock::now();
        rep.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

        for (const auto& [k, v] : rep.outcomes) std::printf("%s: %s\n", k.c_str(), v.c_str());
        std::printf("verdict: %s\n", rep.verdict.c_str());
        std::printf("wall time: %.1f ms\n", rep.wall_ms);
        return rep.exit_code;
    } catch (const degenera::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
