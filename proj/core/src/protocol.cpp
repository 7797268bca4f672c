#include "mbcool/protocol.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mbcool/rng.hpp"

namespace mbcool {

StepObservables observe(const DensityMatrix& rho) {
    const QuadratureStats q = quadrature_stats(rho);
    const FockStats f = fock_populations(rho);
    StepObservables o;
    o.entropy = von_neumann_entropy(rho);
    o.mean_x = q.mean_x;
    o.mean_p = q.mean_p;
    o.uncertainty = std::sqrt(std::max(0.0, q.var_x * q.var_p));
    o.ground_population = f.ground_population;
    o.mean_n = f.mean_n;
    return o;
}

TrajectoryError::TrajectoryError(std::uint64_t seed, int step, const std::string& what)
    : NumericalError("trajectory seed " + std::to_string(seed) + " failed " +
                     (step < 0 ? std::string("during setup") : "at step " + std::to_string(step)) + ": " +
                     what),
      seed_(seed),
      step_(step) {}

namespace {

// Everything a trajectory reuses from cycle to cycle.
struct CycleKit {
    MeasurementOps ops_minus;
    MeasurementOps ops_plus;
    std::optional<FockOperator> wait_minus;
    std::optional<FockOperator> wait_plus;

    const MeasurementOps& ops(Charge c) const { return c == Charge::Minus ? ops_minus : ops_plus; }
};

CycleKit make_kit(const SystemParams& p, int dim) {
    CycleKit kit{build_measurement_ops(p, dim, Charge::Minus),
                 build_measurement_ops(p, dim, Charge::Plus), std::nullopt, std::nullopt};
    if (p.coupling_during_wait && p.wait_angle > 0.0) {
        kit.wait_minus = propagator(p.wait_angle, -p.kappa, -p.chi, dim);
        kit.wait_plus = propagator(p.wait_angle, p.kappa, p.chi, dim);
    }
    return kit;
}

}  // namespace

TrajectoryResult run_trajectory(const SystemParams& params, std::uint64_t seed,
                                const TrajectoryOptions& options) {
    params.validate();
    const int dim = params.resolved_dim();
    const bool dissipative = params.bath.gamma_tilde > 0.0;
    const double step = params.step_angle.value_or(default_step_angle(params.bath));
    const CounterStream stream(seed);

    TrajectoryResult result;
    result.seed = seed;
    result.params = params;
    result.steps.reserve(params.n_measurements);

    int k = -1;
    try {
        const CycleKit kit = make_kit(params, dim);
        DensityMatrix rho = thermal_state(params.theta_T, dim, params.truncation);
        Charge charge = Charge::Minus;
        result.initial = observe(rho);

        for (k = 0; k < params.n_measurements; ++k) {
            const double u = stream.uniform(static_cast<std::uint64_t>(k));
            MeasurementOutcome out = [&] {
                if (!dissipative) return measure_and_collapse(rho, kit.ops(charge), u);
                const JointBlocks evolved = evolve_joint_blocks(
                    prepare_joint(rho, charge), params, params.bath, params.interaction_angle, step);
                return project_joint(evolved, u);
            }();
            rho = std::move(out.post_state);
            charge = out.outcome;

            StepRecord rec;
            rec.outcome = out.outcome;
            rec.probability = out.probability;
            rec.obs = observe(rho);
            rec.post_feedback_x = std::numeric_limits<double>::quiet_NaN();
            rec.post_feedback_p = std::numeric_limits<double>::quiet_NaN();

            if (params.feedback_enabled) {
                const FeedbackPlan plan = feedback_plan(rec.obs.mean_x, rec.obs.mean_p, params.eps_skip);
                rho = dissipative ? apply_feedback_dissipative(rho, plan, params.bath, step)
                                  : apply_feedback(rho, plan);
                const QuadratureStats q = quadrature_stats(rho);
                rec.post_feedback_x = q.mean_x;
                rec.post_feedback_p = q.mean_p;
            }
            result.steps.push_back(rec);

            const bool last = k + 1 == params.n_measurements;
            if (!last && params.wait_angle > 0.0) {
                if (dissipative) {
                    const double s = params.coupling_during_wait ? sign(charge) : 0.0;
                    rho = evolve_dissipative(rho, {s * params.kappa, s * params.chi}, params.bath,
                                             params.wait_angle, step);
                } else if (params.coupling_during_wait) {
                    rho = (charge == Charge::Minus ? *kit.wait_minus : *kit.wait_plus).conjugate(rho);
                } else {
                    rho = free_rotation(rho, params.wait_angle);
                }
            }
        }

        k = params.n_measurements;
        result.final.obs = observe(rho);
        result.final.coherent_fidelity = coherent_fidelity(rho);
        if (options.compute_max_q) result.final.max_q = max_q(rho);
        if (options.q_grid) result.final.q_grid = q_function(rho, *options.q_grid);
        if (options.keep_final_state) result.final_state = std::move(rho);
    } catch (const TrajectoryError&) {
        throw;
    } catch (const NumericalError& e) {
        throw TrajectoryError(seed, k, e.what());
    }
    return result;
}

double steady_state_energy(const TrajectoryResult& result, int burn_in) {
    const int n = static_cast<int>(result.steps.size());
    if (burn_in < 0 || burn_in >= n) {
        throw ConfigError(0, "burn_in " + std::to_string(burn_in) + " must be below the " +
                                 std::to_string(n) + " recorded steps");
    }
    double sum = 0.0;
    for (int k = burn_in; k < n; ++k) sum += result.steps[k].obs.mean_n;
    return sum / (n - burn_in);
}

double steady_state_energy(const SystemParams& params, int burn_in, std::uint64_t seed) {
    return steady_state_energy(run_trajectory(params, seed), burn_in);
}

}  // namespace mbcool
