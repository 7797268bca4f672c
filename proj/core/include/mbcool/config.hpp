#pragma once

// Run configuration: `key = value` lines, `#` starts a comment. Every
// SystemParams field is a key. The initial temperature is given by exactly one
// of theta_T, nbar0 or (temperature_mK, omega).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mbcool/params.hpp"

namespace mbcool {

enum class Experiment { Entropy, Uncertainty, FidelityHist, QfuncDump, FeedbackHist, Qsweep };

std::string_view experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);
const std::vector<Experiment>& all_experiments();

struct RunConfig {
    SystemParams params = SystemParams::reference_defaults();
    int trajectories = 200;
    std::uint64_t master_seed = 1;
    std::string output_dir = "mbcool-out";
    Experiment experiment = Experiment::Entropy;
    std::vector<double> q_factors;
    std::vector<double> nbars;
    int burn_in = 100;
    int q_grid_resolution = 81;

    void validate() const;
};

constexpr int kHistogramBins = 25;

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Inverse of parse_config; floats carry 17 significant digits.
std::string serialize_config(const RunConfig& config);

/// Parameter set and run count of the matching figure.
RunConfig preset(Experiment e);

}  // namespace mbcool
