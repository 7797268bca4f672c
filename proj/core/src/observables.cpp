#include "mbcool/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace mbcool {

double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (double lam : es.eigenvalues())
        if (lam >= 1e-14) s -= lam * std::log(lam);
    return s;
}

double thermal_entropy(double nbar) {
    if (nbar <= 0.0) return 0.0;
    return (nbar + 1.0) * std::log1p(nbar) - nbar * std::log(nbar);
}

QuadratureStats quadrature_stats(const DensityMatrix& rho) {
    const Matrix& r = rho.matrix();
    const int dim = rho.dim();
    Complex a1 = 0.0;
    Complex a2 = 0.0;
    double n = 0.0;
    for (int i = 0; i < dim; ++i) {
        n += i * r(i, i).real();
        if (i + 1 < dim) a1 += std::sqrt(double(i + 1)) * r(i + 1, i);
        if (i + 2 < dim) a2 += std::sqrt(double(i + 1) * double(i + 2)) * r(i + 2, i);
    }
    QuadratureStats q;
    q.mean_x = 2.0 * a1.real();
    q.mean_p = 2.0 * a1.imag();
    q.var_x = 2.0 * a2.real() + 2.0 * n + 1.0 - q.mean_x * q.mean_x;
    q.var_p = -2.0 * a2.real() + 2.0 * n + 1.0 - q.mean_p * q.mean_p;
    return q;
}

double uncertainty_product(const DensityMatrix& rho) {
    const QuadratureStats q = quadrature_stats(rho);
    return std::sqrt(std::max(0.0, q.var_x * q.var_p));
}

double husimi(const DensityMatrix& rho, Complex alpha) {
    const Vector c = coherent_ket(alpha, rho.dim());
    return c.dot(rho.matrix() * c).real();
}

double coherent_fidelity(const DensityMatrix& rho) {
    const QuadratureStats q = quadrature_stats(rho);
    const Complex alpha(0.5 * q.mean_x, 0.5 * q.mean_p);
    const Vector c = coherent_ket(alpha, rho.dim());
    if (c.squaredNorm() < 0.5) {
        throw TruncationError("coherent amplitude |alpha|=" + std::to_string(std::abs(alpha)) +
                                  " lies outside the truncated space",
                              0);
    }
    return c.dot(rho.matrix() * c).real();
}

// ---------------------------------------------------------------------------

double GridSpec::re_at(int i) const {
    return resolution == 1 ? re_min : re_min + (re_max - re_min) * i / (resolution - 1);
}

double GridSpec::im_at(int j) const {
    return resolution == 1 ? im_min : im_min + (im_max - im_min) * j / (resolution - 1);
}

GridSpec GridSpec::covering(double radius, int resolution) {
    return {-radius, radius, -radius, radius, resolution};
}

namespace {

// Q along one row of constant imaginary part, via one matrix product.
RealVector q_row(const Matrix& rho, const GridSpec& spec, double im) {
    const int dim = static_cast<int>(rho.rows());
    Matrix kets(dim, spec.resolution);
    for (int i = 0; i < spec.resolution; ++i) kets.col(i) = coherent_ket({spec.re_at(i), im}, dim);
    const Matrix rk = rho * kets;
    return (kets.conjugate().array() * rk.array()).colwise().sum().real().transpose();
}

}  // namespace

QGrid q_function(const DensityMatrix& rho, const GridSpec& spec) {
    if (spec.resolution < 1) throw ConfigError(0, "grid resolution must be positive");
    QGrid grid{spec, RealMatrix(spec.resolution, spec.resolution)};
    for (int j = 0; j < spec.resolution; ++j) grid.values.col(j) = q_row(rho.matrix(), spec, spec.im_at(j));
    return grid;
}

MaxQ max_q(const DensityMatrix& rho) {
    constexpr double spacing = 0.1;
    const FockStats fs = fock_populations(rho);
    int top = 0;
    for (int n = 0; n < rho.dim(); ++n)
        if (fs.populations[n] > 1e-8) top = n;
    const double radius = std::sqrt(double(top)) + 3.0;
    const int res = 2 * static_cast<int>(std::ceil(radius / spacing)) + 1;
    const GridSpec spec = GridSpec::covering(spacing * (res / 2), res);
    const QGrid grid = q_function(rho, spec);

    Eigen::Index bi = 0, bj = 0;
    const double grid_max = grid.values.maxCoeff(&bi, &bj);
    MaxQ best{{spec.re_at(int(bi)), spec.im_at(int(bj))}, grid_max};
    auto consider = [&](Complex alpha) {
        const double q = husimi(rho, alpha);
        if (q > best.q_max) best = {alpha, q};
    };

    // Quadratic refinement on shrinking 3x3 stencils around the best point.
    double h = spacing;
    for (int round = 0; round < 5; ++round) {
        const Complex center = best.alpha_star;
        Eigen::Matrix<double, 9, 6> design;
        Eigen::Matrix<double, 9, 1> f;
        int row = 0;
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                const double x = dx * h, y = dy * h;
                design.row(row) << 1.0, x, y, x * x, y * y, x * y;
                f[row] = husimi(rho, center + Complex(x, y));
                ++row;
            }
        }
        row = 0;
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy, ++row)
                if (f[row] > best.q_max) best = {center + Complex(dx * h, dy * h), f[row]};

        const Eigen::Matrix<double, 6, 1> c = design.colPivHouseholderQr().solve(f);
        Eigen::Matrix2d hess;
        hess << 2 * c[3], c[5], c[5], 2 * c[4];
        if (hess.determinant() > 0.0 && hess(0, 0) < 0.0) {
            const Eigen::Vector2d v = hess.inverse() * (-Eigen::Vector2d(c[1], c[2]));
            if (std::abs(v[0]) <= 1.5 * h && std::abs(v[1]) <= 1.5 * h)
                consider(center + Complex(v[0], v[1]));
        }
        h /= 4.0;
    }

    // Never report less than Q at the mean-quadrature point.
    const QuadratureStats qs = quadrature_stats(rho);
    consider({0.5 * qs.mean_x, 0.5 * qs.mean_p});
    return best;
}

FockStats fock_populations(const DensityMatrix& rho) {
    FockStats fs;
    fs.populations.resize(rho.dim());
    for (int n = 0; n < rho.dim(); ++n) {
        const double p = rho.matrix()(n, n).real();
        fs.populations[n] = p;
        fs.mean_n += n * p;
    }
    fs.ground_population = fs.populations[0];
    return fs;
}

}  // namespace mbcool
