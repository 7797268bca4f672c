#include "mbcool/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

namespace mbcool {

namespace {

constexpr double kInteriorLeak = 1e-12;  // squared column mass beyond dim

void require_dim(int dim) {
    if (dim < 2) {
        throw InvalidDimension("oscillator truncation must be >= 2, got " + std::to_string(dim));
    }
}

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// exp(-i s X) for the truncated quadrature X = a + a^dagger.
Matrix quadrature_exponential(double s, int dim) {
    RealVector diag = RealVector::Zero(dim);
    RealVector sub(dim - 1);
    for (int k = 0; k < dim - 1; ++k) sub[k] = std::sqrt(double(k + 1));
    Eigen::SelfAdjointEigenSolver<RealMatrix> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const RealVector& lam = es.eigenvalues();
    Vector phase(dim);
    for (int k = 0; k < dim; ++k) phase[k] = std::polar(1.0, -s * lam[k]);
    const Matrix v = es.eigenvectors().cast<Complex>();
    return v * phase.asDiagonal() * v.transpose();
}

// Exact D(mu) on `levels` levels: D = S exp(-i mu X) S^dagger, S = diag(i^n),
// since S X S^dagger = i(a^dagger - a).
Matrix padded_displacement(double mu, int levels) {
    Matrix d = quadrature_exponential(mu, levels);
    static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int m = 0; m < levels; ++m)
        for (int n = 0; n < levels; ++n) d(m, n) *= ipow[((m - n) % 4 + 4) % 4];
    return d;
}

int interior_of(const Matrix& u, int dim) {
    const int beyond = static_cast<int>(u.rows()) - dim;
    if (beyond <= 0) return dim;
    int k = 0;
    while (k < dim && u.col(k).tail(beyond).squaredNorm() < kInteriorLeak) ++k;
    return k;
}

int resolve_pad(const TruncationPolicy& policy, double mu) {
    policy.validate();
    return policy.pad.value_or(default_pad(mu));
}

}  // namespace

// ---------------------------------------------------------------------------

FockOperator::FockOperator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw InvalidDimension("FockOperator must be square");
    require_dim(static_cast<int>(m_.rows()));
}

Matrix FockOperator::conjugate(const Matrix& rho) const { return hermitize(m_ * rho * m_.adjoint()); }

DensityMatrix FockOperator::conjugate(const DensityMatrix& rho) const {
    return DensityMatrix(conjugate(rho.matrix()));
}

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw InvalidDimension("density matrix must be square");
    require_dim(static_cast<int>(m_.rows()));
}

DensityMatrix DensityMatrix::normalized(const Matrix& m) {
    Matrix h = hermitize(m);
    const double tr = h.trace().real();
    if (!(tr > 0.0) || !std::isfinite(tr)) {
        throw DegenerateBranch("cannot normalize a state with trace " + std::to_string(tr));
    }
    return DensityMatrix(h / tr);
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
    return normalized(psi * psi.adjoint());
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

double DensityMatrix::hermiticity_defect() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate() const {
    if (hermiticity_defect() > 1e-12)
        throw ConsistencyError("density matrix is not Hermitian (defect " +
                               std::to_string(hermiticity_defect()) + ")");
    if (std::abs(trace() - 1.0) > 1e-10)
        throw ConsistencyError("density matrix trace deviates from 1: " + std::to_string(trace()));
    if (min_eigenvalue() < -1e-10)
        throw ConsistencyError("density matrix has a negative eigenvalue " +
                               std::to_string(min_eigenvalue()));
}

void TruncationPolicy::validate() const {
    if (!(tail_tol > 0.0)) throw ConfigError(0, "tail_tol must be positive");
    if (pad && *pad < 0) throw ConfigError(0, "pad must be non-negative");
}

// ---------------------------------------------------------------------------

LadderOps ladder_ops(int dim) {
    require_dim(dim);
    Matrix a = Matrix::Zero(dim, dim);
    for (int m = 0; m + 1 < dim; ++m) a(m, m + 1) = std::sqrt(double(m + 1));
    Matrix a_dag = a.adjoint();
    Matrix n = a_dag * a;
    return {FockOperator(std::move(a)), FockOperator(std::move(a_dag)), FockOperator(std::move(n))};
}

double thermal_occupation(double theta_T) {
    if (theta_T < 0.0) throw ConfigError(0, "theta_T must be non-negative");
    if (theta_T == 0.0) return 0.0;
    return 1.0 / std::expm1(1.0 / theta_T);
}

double theta_for_occupation(double nbar) {
    if (nbar < 0.0) throw ConfigError(0, "mean occupation must be non-negative");
    if (nbar == 0.0) return 0.0;
    return 1.0 / std::log1p(1.0 / nbar);
}

double theta_from_temperature(double kelvin, double omega_rad_per_s) {
    constexpr double k_boltzmann = 1.380649e-23;  // J/K
    constexpr double hbar = 1.054571817e-34;      // J s
    if (kelvin < 0.0 || !(omega_rad_per_s > 0.0))
        throw ConfigError(0, "temperature must be >= 0 and omega > 0");
    return k_boltzmann * kelvin / (hbar * omega_rad_per_s);
}

int min_thermal_dim(double theta_T, double tail_tol) {
    if (theta_T <= 0.0) return 2;
    // tail mass beyond N is r^N with r = e^{-1/theta}
    const double log_r = -1.0 / theta_T;
    const double n = std::ceil(std::log(tail_tol) / log_r - 1e-12);
    return std::max(2, static_cast<int>(n));
}

DensityMatrix thermal_state(double theta_T, int dim, const TruncationPolicy& policy) {
    require_dim(dim);
    policy.validate();
    if (theta_T < 0.0) throw ConfigError(0, "theta_T must be non-negative");
    Matrix rho = Matrix::Zero(dim, dim);
    if (theta_T == 0.0) {
        rho(0, 0) = 1.0;
        return DensityMatrix(std::move(rho));
    }
    const double log_r = -1.0 / theta_T;
    const double tail = std::exp(dim * log_r);
    if (tail > policy.tail_tol) {
        const int need = min_thermal_dim(theta_T, policy.tail_tol);
        throw TruncationError("thermal tail mass " + std::to_string(tail) + " beyond dim " +
                                  std::to_string(dim) + " exceeds tail_tol; need dim >= " +
                                  std::to_string(need),
                              need);
    }
    const double p0 = -std::expm1(log_r);
    double total = 0.0;
    for (int n = 0; n < dim; ++n) {
        const double p = p0 * std::exp(n * log_r);
        rho(n, n) = p;
        total += p;
    }
    rho /= total;
    return DensityMatrix(std::move(rho));
}

Vector coherent_ket(Complex alpha, int dim) {
    require_dim(dim);
    Vector c(dim);
    c[0] = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < dim; ++n) c[n] = c[n - 1] * alpha / std::sqrt(double(n));
    return c;
}

int default_pad(double mu) {
    return static_cast<int>(std::ceil(3.0 * (mu * mu + 5.0 * std::abs(mu)))) + 8;
}

CroppedOperator displacement(double mu, int dim, const TruncationPolicy& policy) {
    require_dim(dim);
    const int pad = resolve_pad(policy, mu);
    const Matrix d = padded_displacement(mu, dim + pad);
    const int interior = interior_of(d, dim);
    if (interior == 0) {
        throw PaddingError("displacement mu=" + std::to_string(mu) + " leaves no unitary interior block with " +
                           std::to_string(pad) + " padding levels");
    }
    return {FockOperator(d.topLeftCorner(dim, dim)), interior, pad};
}

CroppedOperator displaced_rotation(double theta, double mu, double c, int dim,
                                   const TruncationPolicy& policy) {
    require_dim(dim);
    const int pad = resolve_pad(policy, mu);
    const int levels = dim + pad;
    const Matrix d = padded_displacement(mu, levels);

    Vector rot(levels);
    for (int n = 0; n < levels; ++n) rot[n] = std::polar(1.0, -theta * n);
    const Complex phase = std::polar(1.0, -theta * (c - mu * mu));
    const Matrix u = phase * (d.adjoint() * (rot.asDiagonal() * d.leftCols(dim)));

    // a column is trusted while D keeps it off the padding edge and the
    // result does not leak beyond dim
    const int guard = std::min(8, pad);
    int interior = 0;
    while (interior < dim && d.col(interior).tail(guard).squaredNorm() < kInteriorLeak &&
           u.col(interior).tail(pad).squaredNorm() < kInteriorLeak)
        ++interior;
    if (interior == 0) {
        throw PaddingError("displaced rotation mu=" + std::to_string(mu) + " leaves no unitary interior block with " +
                           std::to_string(pad) + " padding levels");
    }
    return {FockOperator(u.topRows(dim)), interior, pad};
}

// ---------------------------------------------------------------------------

QuadraticGenerator::QuadraticGenerator(double mu, int dim) : mu_(mu) {
    require_dim(dim);
    RealVector diag(dim);
    RealVector sub(dim - 1);
    for (int k = 0; k < dim; ++k) diag[k] = double(k);
    for (int k = 0; k + 1 < dim; ++k) sub[k] = mu * std::sqrt(double(k + 1));
    Eigen::SelfAdjointEigenSolver<RealMatrix> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    energies_ = es.eigenvalues();
    modes_ = es.eigenvectors();
}

FockOperator QuadraticGenerator::propagator(double theta, double c) const {
    const int n = dim();
    Vector phase(n);
    for (int k = 0; k < n; ++k) phase[k] = std::polar(1.0, -theta * (energies_[k] + c));
    const Matrix v = modes_.cast<Complex>();
    return FockOperator(v * phase.asDiagonal() * v.transpose());
}

DensityMatrix free_rotation(const DensityMatrix& rho, double theta) {
    const int n = rho.dim();
    Vector phase(n);
    for (int k = 0; k < n; ++k) phase[k] = std::polar(1.0, -theta * k);
    Matrix out = phase.asDiagonal() * rho.matrix() * phase.conjugate().asDiagonal();
    return DensityMatrix(std::move(out));
}

}  // namespace mbcool
