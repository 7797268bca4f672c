#pragma once

#include "mbcool/hilbert.hpp"
#include "mbcool/measurement.hpp"
#include "mbcool/params.hpp"

namespace mbcool {

/// H = n + linear (a + a^dagger) + offset, in units of hbar omega.
///
/// Every Hamiltonian in the protocol has this form, so the Lindblad
/// right-hand side can use tridiagonal products instead of dense ones.
struct OscillatorHamiltonian {
    double linear = 0.0;
    double offset = 0.0;

    FockOperator to_operator(int dim) const;
};

/// Classical drive H = n + g (a + a^dagger) applied for a phase theta,
/// optionally preceded by a free rotation.
struct FeedbackPlan {
    double g = 0.0;
    double theta = 0.0;
    double pre_rotation = 0.0;  ///< 0 or pi/2
    bool skip = true;

    double duration() const { return skip ? 0.0 : pre_rotation + theta; }
};

/// Unitary propagation for a wait with the box in a known charge state.
DensityMatrix wait_evolution(const DensityMatrix& rho, double wait_angle, Charge charge,
                             const SystemParams& params, bool coupling_on);

/// Drive that carries the coherent amplitude alpha = (X + iP)/2 to the origin.
///
/// The drive rotates phase space about the real point -g, so it lands on the
/// origin when g = -(X^2 + P^2)/(4X); theta is the unique angle in (0, 2pi)
/// with e^{-i theta}(alpha + g) = g, equivalently tan(theta) = 2XP/(X^2 - P^2)
/// on the landing branch. |alpha| < eps_skip skips. When |X| < |P| a quarter
/// turn comes first, so the drive circle never grows past the amplitude.
FeedbackPlan feedback_plan(double mean_x, double mean_p, double eps_skip = 1e-6);

/// Unitary feedback; the box coupling is taken as exactly compensated.
DensityMatrix apply_feedback(const DensityMatrix& rho, const FeedbackPlan& plan);

/// Right-hand side of the thermal Lindblad master equation.
Matrix lindblad_rhs(const Matrix& rho, const FockOperator& hamiltonian, const BathParams& bath);
Matrix lindblad_rhs(const Matrix& rho, const OscillatorHamiltonian& hamiltonian,
                    const BathParams& bath);

/// min(0.01, 0.1 / (gamma_tilde (nbar + 1))).
double default_step_angle(const BathParams& bath);

/// Fixed-step classic RK4 of lindblad_rhs over `duration` (a phase omega*t).
/// The step is shrunk so it divides the duration evenly. Throws StepSizeError
/// if the trace drifts by 1e-8 or more.
DensityMatrix evolve_dissipative(const DensityMatrix& rho, const OscillatorHamiltonian& hamiltonian,
                                 const BathParams& bath, double duration, double step_angle);

/// Dissipative feedback: free rotation and drive integrated with RK4.
DensityMatrix apply_feedback_dissipative(const DensityMatrix& rho, const FeedbackPlan& plan,
                                         const BathParams& bath, double step_angle);

/// d rho_ab/dt = -i(H_a rho_ab - rho_ab H_b) + dissipator(rho_ab) with
/// H_+- = n +- (chi + kappa X). The scalar chi terms are applied as exact
/// phases; only the kappa part is integrated. The blocks must come from a
/// Hermitian joint state: mp is returned as the adjoint of the evolved pm.
JointBlocks evolve_joint_blocks(const JointBlocks& blocks, const SystemParams& params,
                                const BathParams& bath, double duration, double step_angle);

}  // namespace mbcool
