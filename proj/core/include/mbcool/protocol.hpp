#pragma once

// Trajectory engine. One cycle is
//
//   measure (pi/2 pulse, interaction, pi/2 pulse, readout)
//   -> record observables
//   -> optional feedback drive
//   -> wait (only between measurements)
//
// With gamma > 0 every interval is integrated with the master equation; the
// interaction window then evolves the four oscillator blocks of the joint
// state. The box starts in |-> and is left in the measured charge state.

#include <cstdint>
#include <optional>
#include <vector>

#include "mbcool/dynamics.hpp"
#include "mbcool/measurement.hpp"
#include "mbcool/observables.hpp"
#include "mbcool/params.hpp"

namespace mbcool {

struct StepObservables {
    double entropy = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    double uncertainty = 0.0;
    double ground_population = 0.0;
    double mean_n = 0.0;
};

StepObservables observe(const DensityMatrix& rho);

struct StepRecord {
    Charge outcome = Charge::Minus;
    double probability = 0.0;
    StepObservables obs;
    /// Mean quadratures right after feedback; NaN when no feedback ran.
    double post_feedback_x;
    double post_feedback_p;
};

struct FinalObservables {
    StepObservables obs;
    double coherent_fidelity = 0.0;
    std::optional<MaxQ> max_q;
    std::optional<QGrid> q_grid;
};

struct TrajectoryResult {
    std::uint64_t seed = 0;
    SystemParams params;
    StepObservables initial;
    std::vector<StepRecord> steps;
    /// After the last measurement and its feedback.
    FinalObservables final;
    std::optional<DensityMatrix> final_state;
};

struct TrajectoryOptions {
    bool compute_max_q = false;
    std::optional<GridSpec> q_grid;
    bool keep_final_state = false;
};

/// A numerical failure inside a trajectory, tagged with where it happened.
/// Step -1 marks a failure while building the initial state or operators.
class TrajectoryError : public NumericalError {
public:
    TrajectoryError(std::uint64_t seed, int step, const std::string& what);
    std::uint64_t seed() const { return seed_; }
    int step() const { return step_; }

private:
    std::uint64_t seed_;
    int step_;
};

/// Draws come from CounterStream(seed) with the step index as counter.
TrajectoryResult run_trajectory(const SystemParams& params, std::uint64_t seed,
                                const TrajectoryOptions& options = {});

/// Mean of mean_n over the steps after `burn_in`.
double steady_state_energy(const TrajectoryResult& result, int burn_in = 100);
double steady_state_energy(const SystemParams& params, int burn_in, std::uint64_t seed);

}  // namespace mbcool
