#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mbcool/config.hpp"
#include "mbcool/ensemble.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct SimulateArgs {
    std::string config_path;
    std::optional<std::string> output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> trajectories;
    std::optional<std::string> experiment;
};

int simulate(const SimulateArgs& args) {
    mbcool::RunConfig config = mbcool::load_config(args.config_path);
    if (args.output_dir) config.output_dir = *args.output_dir;
    if (args.seed) config.master_seed = *args.seed;
    if (args.trajectories) config.trajectories = *args.trajectories;
    if (args.experiment) {
        const auto e = mbcool::parse_experiment(*args.experiment);
        if (!e) throw mbcool::ConfigError(0, "unknown experiment '" + *args.experiment + "'");
        config.experiment = *e;
    }
    config.validate();

    const int workers = mbcool::default_workers();
    std::cerr << "mbcool: " << mbcool::experiment_name(config.experiment) << ", " << config.trajectories
              << " trajectories, dim " << config.params.resolved_dim() << ", " << workers << " workers\n";
    const mbcool::EnsembleSummary summary = mbcool::run_ensemble(config, workers);
    mbcool::write_outputs(summary, config.output_dir);
    std::cout << "wrote " << config.output_dir << "\n";
    return 0;
}

int presets(const std::optional<std::string>& experiment) {
    if (!experiment) {
        std::cout << mbcool::serialize_config(mbcool::RunConfig{});
        return 0;
    }
    const auto e = mbcool::parse_experiment(*experiment);
    if (!e) throw mbcool::ConfigError(0, "unknown experiment '" + *experiment + "'");
    std::cout << mbcool::serialize_config(mbcool::preset(*e));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Measurement back-action cooling of a mechanical resonator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(MBCOOL_CLI_VERSION));

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run a trajectory ensemble and write CSV/JSON outputs");
    simulate_cmd->add_option("--config", sim.config_path, "Configuration file (key = value lines)")->required();
    simulate_cmd->add_option("--output-dir", sim.output_dir, "Override output_dir");
    simulate_cmd->add_option("--seed", sim.seed, "Override master_seed");
    simulate_cmd->add_option("--trajectories", sim.trajectories, "Override trajectories");
    simulate_cmd->add_option("--experiment", sim.experiment,
                             "entropy | uncertainty | fidelity_hist | qfunc_dump | feedback_hist | qsweep");

    std::optional<std::string> preset_name;
    auto* presets_cmd = app.add_subcommand("presets", "Print the default configuration or a per-figure preset");
    presets_cmd->add_option("--experiment", preset_name, "Preset to print");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (*simulate_cmd) return simulate(sim);
        return presets(preset_name);
    } catch (const mbcool::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mbcool::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mbcool::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
