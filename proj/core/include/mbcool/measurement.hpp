#pragma once

// Charge-measurement back-action on the oscillator.
//
// One measurement cycle: a pi/2 pulse on the Cooper-pair box, an interaction
// of duration tau under H = n + (chi + kappa X) sigma_z, a second pi/2 pulse,
// and a projective charge readout. For the box starting in |->,
//
//   M- = (U- - U+)/2,  M+ = (U- + U+)/2,
//   U+- = exp(-i omega tau (n +- (chi + kappa X))),
//
// and rho -> M rho M^dagger / tr(M^dagger M rho). Global phases on the branch
// operators are dropped; they cancel in M rho M^dagger.

#include <utility>

#include "mbcool/hilbert.hpp"
#include "mbcool/params.hpp"

namespace mbcool {

struct MeasurementOps {
    FockOperator m_minus;
    FockOperator m_plus;
    Charge cpb_start;
    double interaction_angle;

    const FockOperator& branch(Charge c) const { return c == Charge::Minus ? m_minus : m_plus; }
};

struct MeasurementOutcome {
    Charge outcome;
    double probability;  ///< probability of the realized outcome
    DensityMatrix post_state;
};

/// Realized probabilities below this floor are refused.
inline constexpr double kBranchFloor = 1e-14;

/// (U-, U+) as exact exponentials of the truncated generators.
std::pair<FockOperator, FockOperator> build_u_pm(const SystemParams& params, int dim);

MeasurementOps build_measurement_ops(const SystemParams& params, int dim, Charge cpb_start);

/// max |M-^dagger M- + M+^dagger M+ - I|.
double completeness_residual(const MeasurementOps& ops);

/// P- = tr(M-^dagger M- rho).
double probability_minus(const DensityMatrix& rho, const MeasurementOps& ops);

/// Outcome - iff u < P-.
MeasurementOutcome measure_and_collapse(const DensityMatrix& rho, const MeasurementOps& ops,
                                        double u);

/// Oscillator blocks <alpha| rho_joint |beta> of the oscillator (x) box state.
struct JointBlocks {
    Matrix mm, mp, pm, pp;

    const Matrix& block(Charge a, Charge b) const;
    Matrix& block(Charge a, Charge b);

    double total_trace() const { return (mm.trace() + pp.trace()).real(); }
    int dim() const { return static_cast<int>(mm.rows()); }
};

/// 2x2 delta-pulse in the (|->, |+>) basis:
/// (c1, c2) -> (c1 cos d + i c2 sin d, c2 cos d + i c1 sin d).
Eigen::Matrix2cd charge_pulse(double delta);

/// The pi/2 pulse of the protocol: a quarter Bloch-sphere turn, delta = pi/4.
Eigen::Matrix2cd half_pi_pulse();

/// rho (x) |start><start| after the first pi/2 pulse.
JointBlocks prepare_joint(const DensityMatrix& rho, Charge cpb_start);

/// Second pi/2 pulse followed by projective charge readout with outcome -
/// iff u < P-.
MeasurementOutcome project_joint(const JointBlocks& blocks, double u);

/// Explicit 2N-dimensional pipeline: first pulse, joint propagation with the
/// full Hamiltonian (dense matrix exponential), second pulse, projection and
/// partial trace. Independent of the M-operator route; intended for dim <= 32.
MeasurementOutcome joint_state_oracle(const DensityMatrix& rho, const SystemParams& params, int dim,
                                      Charge cpb_start, double u);

/// Branch probabilities (P-, P+) of the oracle pipeline.
std::pair<double, double> joint_state_probabilities(const DensityMatrix& rho,
                                                    const SystemParams& params, int dim,
                                                    Charge cpb_start);

}  // namespace mbcool
