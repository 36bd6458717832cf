// Command-line experiment harness: run / report / validate / version.
// Exit codes: 0 success, 2 validation failure, 3 runtime failure.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kacsim/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Stochastic N-particle collision simulator and experiment harness"};
    app.require_subcommand(1);

    std::string config_path, run_dir, output_override;

    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("-o,--output-dir", output_override,
                    "override [experiment] output_dir");

    auto* rep = app.add_subcommand("report", "Summarize a finished run directory");
    rep->add_option("dir", run_dir, "run directory")->required();

    auto* val = app.add_subcommand("validate", "Parse and validate a config file");
    val->add_option("config", config_path, "config file")->required();

    app.add_subcommand("version", "Print the tool version");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("version")) {
            std::cout << "kacsim " << kacsim::kVersion << "\n";
            return 0;
        }
        if (app.got_subcommand("validate")) {
            try {
                auto cfg = kacsim::Config::parse_file(config_path);
                (void)kacsim::ExperimentConfig::from(cfg);
            } catch (const kacsim::ConfigError& e) {
                std::cerr << "invalid config: " << e.what() << "\n";
                return 2;
            }
            std::cout << "ok\n";
            return 0;
        }
        if (app.got_subcommand("run")) {
            kacsim::Config cfg;
            kacsim::ExperimentConfig ec;
            try {
                cfg = kacsim::Config::parse_file(config_path);
                ec = kacsim::ExperimentConfig::from(cfg);
                if (!output_override.empty()) ec.output_dir = output_override;
                if (ec.output_dir.empty())
                    throw kacsim::ConfigError("experiment.output_dir: missing");
            } catch (const kacsim::ConfigError& e) {
                std::cerr << "invalid config: " << e.what() << "\n";
                return 2;
            }
            auto rec = kacsim::run_experiment(ec, cfg);
            std::cout << "wrote " << rec.outputs.size() << " outputs to " << ec.output_dir
                      << " (" << rec.wall_seconds << " s)\n";
            for (const auto& w : rec.warnings) std::cout << "warning: " << w << "\n";
            return 0;
        }
        if (app.got_subcommand("report")) {
            std::cout << kacsim::report(run_dir);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
