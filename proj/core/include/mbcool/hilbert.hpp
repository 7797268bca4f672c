#pragma once

// Truncated Fock-space algebra for a single harmonic oscillator.
//
// Units: hbar = 1, energies in units of hbar*omega, times as phases omega*t.
// Every operator lives on span{|0>, ..., |dim-1>}.

#include <optional>

#include "mbcool/types.hpp"

namespace mbcool {

class DensityMatrix;

/// Dense operator on the truncated oscillator space.
class FockOperator {
public:
    explicit FockOperator(Matrix m);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }

    FockOperator adjoint() const { return FockOperator(m_.adjoint()); }

    /// U rho U^dagger, hermitized. The trace is not renormalized.
    Matrix conjugate(const Matrix& rho) const;
    DensityMatrix conjugate(const DensityMatrix& rho) const;

    friend FockOperator operator*(const FockOperator& a, const FockOperator& b) {
        return FockOperator(a.m_ * b.m_);
    }

private:
    Matrix m_;
};

/// Hermitian, unit-trace, positive semidefinite oscillator state.
///
/// The constructor only checks the shape; use validate() to check the full
/// set of invariants (that requires an eigen decomposition).
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix m);

    /// Hermitizes and divides by the trace. Throws DegenerateBranch if the
    /// trace is not positive.
    static DensityMatrix normalized(const Matrix& m);
    static DensityMatrix pure(const Vector& psi);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }

    double trace() const { return m_.trace().real(); }
    double purity() const;
    double hermiticity_defect() const;
    double min_eigenvalue() const;

    /// Throws ConsistencyError if hermiticity (1e-12), trace (1e-10) or
    /// positivity (-1e-10) is violated.
    void validate() const;

private:
    Matrix m_;
};

struct TruncationPolicy {
    /// Largest acceptable thermal probability mass above the truncation.
    double tail_tol = 1e-9;
    /// Extra levels for padded constructions; unset means default_pad(mu).
    std::optional<int> pad;

    void validate() const;
};

struct LadderOps {
    FockOperator a;
    FockOperator a_dag;
    FockOperator n;
};

LadderOps ladder_ops(int dim);

/// Mean occupation 1/(e^{1/theta_T} - 1) of a thermal state; 0 at theta_T = 0.
double thermal_occupation(double theta_T);
/// Inverse of thermal_occupation.
double theta_for_occupation(double nbar);
/// kT/(hbar omega) for a temperature in kelvin and an angular frequency in rad/s.
double theta_from_temperature(double kelvin, double omega_rad_per_s);

/// Smallest dim whose geometric tail mass beyond dim is <= tail_tol.
int min_thermal_dim(double theta_T, double tail_tol);

DensityMatrix thermal_state(double theta_T, int dim, const TruncationPolicy& policy = {});

/// Truncated coherent ket e^{-|alpha|^2/2} alpha^n / sqrt(n!), not renormalized.
Vector coherent_ket(Complex alpha, int dim);

/// ceil(3(mu^2 + 5|mu|)) + 8.
int default_pad(double mu);

/// An operator computed on dim + pad levels and cropped to dim.
struct CroppedOperator {
    FockOperator op;
    /// Leading levels whose columns keep < 1e-12 squared mass beyond dim; on
    /// this block op is unitary to ~1e-12.
    int interior;
    int pad;
};

/// D(mu) = exp(mu (a^dagger - a)) for real mu.
CroppedOperator displacement(double mu, int dim, const TruncationPolicy& policy = {});

/// exp(-i theta (n + mu (a + a^dagger) + c)) evaluated as
/// e^{-i theta (c - mu^2)} D(mu)^dagger e^{-i theta n} D(mu).
CroppedOperator displaced_rotation(double theta, double mu, double c, int dim,
                                   const TruncationPolicy& policy = {});

/// Eigen decomposition of the truncated generator n + mu (a + a^dagger).
///
/// The generator is real symmetric and tridiagonal, so propagators built
/// from it are unitary on the truncated space to machine precision.
class QuadraticGenerator {
public:
    QuadraticGenerator(double mu, int dim);

    /// exp(-i theta (n + mu (a + a^dagger) + c)).
    FockOperator propagator(double theta, double c = 0.0) const;

    double mu() const { return mu_; }
    int dim() const { return static_cast<int>(energies_.size()); }
    const RealVector& energies() const { return energies_; }
    const RealMatrix& modes() const { return modes_; }

private:
    double mu_;
    RealVector energies_;
    RealMatrix modes_;
};

inline FockOperator propagator(double theta, double mu, double c, int dim) {
    return QuadraticGenerator(mu, dim).propagator(theta, c);
}

/// rho -> e^{-i theta n} rho e^{i theta n}; elementwise, no matrix products.
DensityMatrix free_rotation(const DensityMatrix& rho, double theta);

}  // namespace mbcool
