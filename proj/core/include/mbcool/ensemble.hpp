#pragma once

// Parallel trajectory ensembles and their aggregation. Only observables are
// aggregated; density matrices of different runs are never combined.

#include <cstdint>
#include <string>
#include <vector>

#include "mbcool/config.hpp"
#include "mbcool/protocol.hpp"

namespace mbcool {

struct StepAggregate {
    int step = 0;
    double time = 0.0;  ///< nominal protocol phase omega*t, feedback excluded
    double mean_entropy = 0.0;
    double mean_uncert = 0.0;
    double median_uncert = 0.0;
    double mean_ground_pop = 0.0;
    double mean_n = 0.0;
    int count = 0;
};

struct Histogram {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<long> counts;

    double bin_lo(int i) const;
    double bin_hi(int i) const;
    long total() const;

    /// Uniform bins on [lo, hi]; values outside are clamped into the end bins.
    static Histogram build(std::string name, const std::vector<double>& values, int bins = kHistogramBins,
                           double lo = 0.0, double hi = 1.0);
};

struct SweepCell {
    double q_factor = 0.0;
    double nbar = 0.0;
    double steady_n = 0.0;  ///< mean over trajectories of the per-run steady energy
    double steady_n_sd = 0.0;
    int trajectories = 0;
};

struct QDump {
    int trajectory = 0;
    std::uint64_t seed = 0;
    double coherent_fidelity = 0.0;
    QGrid grid;
};

struct EnsembleSummary {
    RunConfig config;
    int trajectories = 0;
    std::vector<StepAggregate> steps;
    std::vector<Histogram> histograms;
    std::vector<SweepCell> sweep;
    std::vector<QDump> qdumps;
    double mean_final_fidelity = 0.0;
    double mean_final_ground_pop = 0.0;
};

/// MBCOOL_WORKERS if set, else the hardware concurrency.
int default_workers();

/// Runs trajectories 0..count-1 with seeds derive_seed(master_seed, index).
/// Results are ordered by index. The first failing index is rethrown.
std::vector<TrajectoryResult> run_trajectories(const SystemParams& params, int count,
                                               std::uint64_t master_seed,
                                               const TrajectoryOptions& options = {}, int workers = 0);

/// Nominal phase omega*t at which step k is recorded.
double step_time(const SystemParams& params, int step);

std::vector<StepAggregate> aggregate_steps(const std::vector<TrajectoryResult>& runs);

/// Mean and sample standard deviation of steady_state_energy over runs.
SweepCell sweep_cell(const std::vector<TrajectoryResult>& runs, int burn_in);

/// Per-trajectory options implied by the experiment.
TrajectoryOptions experiment_options(const RunConfig& config);

EnsembleSummary summarize(const RunConfig& config, const std::vector<TrajectoryResult>& runs);
EnsembleSummary run_ensemble(const RunConfig& config, int workers = 0);

/// Writes steps.csv, hist_<name>.csv, sweep.csv, qfunc_<k>.csv and summary.json
/// as the experiment requires.
void write_outputs(const EnsembleSummary& summary, const std::string& output_dir);

}  // namespace mbcool
