#pragma once

#include <optional>

#include "mbcool/hilbert.hpp"

namespace mbcool {

/// Thermal reservoir coupled to the oscillator mode.
struct BathParams {
    double gamma_tilde = 0.0;  ///< gamma / omega
    double nbar = 0.0;         ///< reservoir mean occupation at omega

    /// Q = omega / (2 gamma); infinite when gamma_tilde = 0.
    double q_factor() const;
    static BathParams from_q(double q_factor, double nbar);

    void validate() const;
};

/// Dimensionless parameters of one run (hbar = 1, energies in hbar*omega,
/// times as phases omega*t).
struct SystemParams {
    double kappa = 1.5;               ///< lambda / (hbar omega)
    double chi = 100.0;               ///< E_c dn / (hbar omega)
    double interaction_angle = 0.1;   ///< omega tau
    double wait_angle = 0.25;         ///< omega t_wait between measurements
    double theta_T = 0.0;             ///< kT / (hbar omega) of the initial state
    int n_measurements = 160;
    bool feedback_enabled = false;
    bool coupling_during_wait = false;
    BathParams bath;
    int dim = 0;  ///< 0 selects min_thermal_dim(theta_T, truncation.tail_tol)
    TruncationPolicy truncation;
    double eps_skip = 1e-6;
    /// RK4 step for dissipative evolution; unset selects the default bound.
    std::optional<double> step_angle;

    /// Reference parameters: T = 50 mK at omega = 5e7 rad/s.
    static SystemParams reference_defaults();

    int resolved_dim() const;
    void validate() const;
};

}  // namespace mbcool
