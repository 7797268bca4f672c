#include "mbcool/params.hpp"

#include <cmath>
#include <limits>

namespace mbcool {

double BathParams::q_factor() const {
    if (gamma_tilde <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (2.0 * gamma_tilde);
}

BathParams BathParams::from_q(double q_factor, double nbar) {
    if (!(q_factor > 0.0)) throw ConfigError(0, "Q factor must be positive");
    return {std::isinf(q_factor) ? 0.0 : 1.0 / (2.0 * q_factor), nbar};
}

void BathParams::validate() const {
    if (!(gamma_tilde >= 0.0) || !std::isfinite(gamma_tilde))
        throw ConfigError(0, "gamma_tilde must be finite and >= 0");
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw ConfigError(0, "bath nbar must be finite and >= 0");
}

SystemParams SystemParams::reference_defaults() {
    SystemParams p;
    p.theta_T = theta_from_temperature(0.050, 5.0e7);
    return p;
}

int SystemParams::resolved_dim() const {
    return dim > 0 ? dim : min_thermal_dim(theta_T, truncation.tail_tol);
}

void SystemParams::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(kappa) || !finite(chi)) throw ConfigError(0, "kappa and chi must be finite");
    if (!(interaction_angle > 0.0) || !finite(interaction_angle))
        throw ConfigError(0, "interaction_angle must be > 0");
    if (!(wait_angle >= 0.0) || !finite(wait_angle)) throw ConfigError(0, "wait_angle must be >= 0");
    if (!(theta_T >= 0.0) || !finite(theta_T)) throw ConfigError(0, "theta_T must be >= 0");
    if (n_measurements < 1) throw ConfigError(0, "n_measurements must be >= 1");
    if (dim != 0 && dim < 2) throw ConfigError(0, "dim must be 0 (auto) or >= 2");
    if (!(eps_skip > 0.0)) throw ConfigError(0, "eps_skip must be > 0");
    if (step_angle && !(*step_angle > 0.0)) throw ConfigError(0, "step_angle must be > 0");
    bath.validate();
    truncation.validate();
}

}  // namespace mbcool
