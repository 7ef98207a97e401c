#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pdc/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"spatial two-photon amplitude simulator for collinear type-I downconversion"};
    app.require_subcommand(1);

    std::string config_path;
    std::string preset_name;
    std::string out_dir;
    int threads = 1;

    auto* run_cmd = app.add_subcommand("run", "run a scenario and write its outputs");
    run_cmd->add_option("config", config_path,
                        "JSON config file (optional when --preset is given)");
    run_cmd->add_option("--preset", preset_name,
                        "start from a named preset, then apply the config file on top");
    run_cmd->add_option("--out", out_dir, "override the output directory");
    run_cmd->add_option("--threads", threads, "worker threads for the TPA grid")
        ->check(CLI::PositiveNumber);

    auto* presets_cmd = app.add_subcommand("presets", "list the built-in presets");
    auto* version_cmd = app.add_subcommand("version", "print the artifact version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (version_cmd->parsed()) {
        std::cout << pdc::artifact_version << "\n";
        return 0;
    }
    if (presets_cmd->parsed()) {
        for (const auto& p : pdc::list_presets())
            std::cout << p.name << "\t" << p.description << "\n";
        return 0;
    }

    try {
        pdc::scenario_config cfg;
        if (!preset_name.empty()) cfg = pdc::preset(preset_name);
        if (!config_path.empty())
            cfg = pdc::load_config(config_path, cfg);
        else if (preset_name.empty())
            throw pdc::config_error("run needs a config file or --preset NAME");
        if (!out_dir.empty()) cfg.out_dir = out_dir;

        const pdc::run_summary rs = pdc::run_scenario(cfg, threads);
        std::fprintf(stderr, "wrote %s (%.2f s)\n", rs.out_dir.string().c_str(), rs.duration_s);
        return 0;
    } catch (const pdc::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
