#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gridsync/pipeline.hpp"

int main(int argc, char** argv) {
    namespace cli = gridsync::cli;
    CLI::App app{"Event-synchronization climate networks on gridded data"};
    app.set_version_flag("--version", std::string(cli::kVersion));
    app.require_subcommand(1, 1);

    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> out;

    for (auto name : cli::kCommands) {
        auto* sub = app.add_subcommand(std::string(name));
        sub->add_option("--config", config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "master seed, overrides the config");
        sub->add_option("--threads", threads, "worker threads (0 = all cores)");
        sub->add_option("--out", out, "output directory, overrides the config");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    cli::Overrides ov;
    ov.seed = seed;
    ov.threads = threads;
    if (out) ov.output_dir = *out;

    cli::RunConfig cfg;
    try {
        cfg = cli::load_config(config, ov);
    } catch (const cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return cli::run_command(command, cfg);
}
