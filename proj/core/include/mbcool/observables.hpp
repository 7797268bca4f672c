#pragma once

// Scalar and phase-space diagnostics of an oscillator state.
//
// Quadratures are X = a + a^dagger and P = -i(a - a^dagger), so the vacuum
// has unit variance and the uncertainty product is in units of hbar/2. The
// Husimi function follows the Q(alpha) = <alpha|rho|alpha> convention (no 1/pi).

#include <vector>

#include "mbcool/hilbert.hpp"

namespace mbcool {

/// Von Neumann entropy in nats; eigenvalues below 1e-14 count as zero.
double von_neumann_entropy(const DensityMatrix& rho);

/// Closed form (n+1) ln(n+1) - n ln n for a thermal state.
double thermal_entropy(double nbar);

struct QuadratureStats {
    double mean_x = 0.0;
    double mean_p = 0.0;
    double var_x = 0.0;
    double var_p = 0.0;
};

/// Moments of rho viewed as a state of the untruncated oscillator.
QuadratureStats quadrature_stats(const DensityMatrix& rho);

/// sqrt(var_x var_p); the Heisenberg floor is 1.
double uncertainty_product(const DensityMatrix& rho);

/// <alpha|rho|alpha>.
double husimi(const DensityMatrix& rho, Complex alpha);

/// Overlap with the coherent state of equal mean quadratures,
/// alpha = (mean_x + i mean_p)/2. Throws TruncationError when less than half
/// of |alpha> lies inside the truncated space.
double coherent_fidelity(const DensityMatrix& rho);

struct GridSpec {
    double re_min = -4.0, re_max = 4.0;
    double im_min = -4.0, im_max = 4.0;
    int resolution = 81;  ///< points per axis

    double re_at(int i) const;
    double im_at(int j) const;

    /// Square grid centered at zero covering |alpha| <= radius.
    static GridSpec covering(double radius, int resolution);
};

struct QGrid {
    GridSpec spec;
    RealMatrix values;  ///< values(i, j) = Q(re_at(i) + i im_at(j))
};

QGrid q_function(const DensityMatrix& rho, const GridSpec& spec);

struct MaxQ {
    Complex alpha_star;
    double q_max = 0.0;
};

/// Global maximum of Q: a 0.1-spaced grid search followed by quadratic
/// refinement on the 3x3 neighborhood of the best point.
MaxQ max_q(const DensityMatrix& rho);

struct FockStats {
    std::vector<double> populations;
    double ground_population = 0.0;
    double mean_n = 0.0;
};

FockStats fock_populations(const DensityMatrix& rho);

}  // namespace mbcool
