#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mbcool/observables.hpp"
#include "oracles.hpp"

using namespace mbcool;

namespace {

DensityMatrix coherent_state(Complex alpha, int dim) { return DensityMatrix::pure(oracle::coherent(alpha, dim)); }

DensityMatrix thermal_n(double nbar, int dim = 0) {
    TruncationPolicy tight;
    tight.tail_tol = 1e-12;
    const double theta = theta_for_occupation(nbar);
    return thermal_state(theta, std::max(dim, min_thermal_dim(theta, tight.tail_tol)), tight);
}

/// Brute-force <alpha|rho|alpha> from the oracle ket.
double brute_q(const DensityMatrix& rho, Complex alpha) {
    const oracle::Vector k = oracle::coherent(alpha, rho.dim());
    return (k.adjoint() * rho.matrix() * k)(0, 0).real();
}

}  // namespace

TEST(Entropy, PureStateIsZero) {
    EXPECT_LT(von_neumann_entropy(coherent_state({1.3, -0.2}, 40)), 1e-10);
}

TEST(Entropy, MaximallyMixed) {
    for (int d : {2, 7, 30}) EXPECT_NEAR(von_neumann_entropy(DensityMatrix(Matrix::Identity(d, d) / double(d))), std::log(d), 1e-12);
}

TEST(Entropy, ThermalClosedFormAtReferenceOccupation) {
    EXPECT_NEAR(thermal_entropy(130.4), 5.88, 0.01);
    const DensityMatrix th = thermal_n(8.0, 300);
    EXPECT_NEAR(von_neumann_entropy(th), thermal_entropy(8.0), 1e-8);
}

TEST(Entropy, InvariantUnderUnitaryConjugation) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> th(0.0, 2.0 * M_PI), mu(-1.5, 1.5), c(-50.0, 50.0);
    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix rho(oracle::random_low_density(40, 8, rng));
        const CroppedOperator u = displaced_rotation(th(rng), mu(rng), c(rng), 40);
        const DensityMatrix out = DensityMatrix::normalized(u.op.conjugate(rho.matrix()));
        EXPECT_NEAR(von_neumann_entropy(out), von_neumann_entropy(rho), 1e-9);
    }
}

TEST(Quadratures, Vacuum) {
    const QuadratureStats q = quadrature_stats(thermal_state(0.0, 6));
    EXPECT_NEAR(q.mean_x, 0.0, 1e-15);
    EXPECT_NEAR(q.mean_p, 0.0, 1e-15);
    EXPECT_NEAR(q.var_x, 1.0, 1e-15);
    EXPECT_NEAR(q.var_p, 1.0, 1e-15);
}

TEST(Quadratures, CoherentMoments) {
    const Complex alpha(1.1, -0.6);
    const QuadratureStats q = quadrature_stats(coherent_state(alpha, 50));
    EXPECT_NEAR(q.mean_x, 2.0 * alpha.real(), 1e-10);
    EXPECT_NEAR(q.mean_p, 2.0 * alpha.imag(), 1e-10);
    EXPECT_NEAR(q.var_x, 1.0, 1e-9);
    EXPECT_NEAR(q.var_p, 1.0, 1e-9);
    EXPECT_NEAR(uncertainty_product(coherent_state(alpha, 50)), 1.0, 1e-9);
}

TEST(Quadratures, ThermalMomentsMatchDenseOperators) {
    const DensityMatrix th = thermal_n(3.0);
    const QuadratureStats q = quadrature_stats(th);
    EXPECT_NEAR(q.var_x, 7.0, 1e-8);
    EXPECT_NEAR(q.var_p, 7.0, 1e-8);
    EXPECT_NEAR(uncertainty_product(th), 7.0, 1e-8);

    // dense X^2 on a space one level larger than the state's support
    std::mt19937_64 rng(2);
    const int dim = 20;
    Matrix rho = Matrix::Zero(dim + 1, dim + 1);
    rho.topLeftCorner(dim, dim) = oracle::random_density(dim, rng);
    const Matrix x = oracle::position(dim + 1);
    const Matrix p = Complex(0.0, -1.0) * (oracle::annihilation(dim + 1) - oracle::annihilation(dim + 1).adjoint());
    const QuadratureStats s = quadrature_stats(DensityMatrix(Matrix(rho.topLeftCorner(dim, dim))));
    const double mx = (rho * x).trace().real(), mp = (rho * p).trace().real();
    EXPECT_NEAR(s.mean_x, mx, 1e-12);
    EXPECT_NEAR(s.mean_p, mp, 1e-12);
    EXPECT_NEAR(s.var_x, (rho * x * x).trace().real() - mx * mx, 1e-11);
    EXPECT_NEAR(s.var_p, (rho * p * p).trace().real() - mp * mp, 1e-11);
}

TEST(Quadratures, ReferenceThermalUncertainty) {
    EXPECT_NEAR(2.0 * 130.4 + 1.0, 261.8, 1e-9);
    const double theta = theta_from_temperature(0.050, 5.0e7);
    TruncationPolicy tight;
    tight.tail_tol = 1e-10;
    const DensityMatrix th = thermal_state(theta, min_thermal_dim(theta, tight.tail_tol), tight);
    EXPECT_NEAR(uncertainty_product(th), 2.0 * thermal_occupation(theta) + 1.0, 1e-4);
}

TEST(Quadratures, HeisenbergFloorOnRandomStates) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        const int rank = 1 + trial % 4;
        const DensityMatrix rho(oracle::random_density(32, rng, rank));
        EXPECT_GE(uncertainty_product(rho), 1.0 - 1e-9);
    }
}

TEST(CoherentFidelity, CoherentStateIsOne) {
    EXPECT_NEAR(coherent_fidelity(coherent_state({-0.9, 1.4}, 50)), 1.0, 1e-8);
}

TEST(CoherentFidelity, ThermalStateAtOrigin) {
    EXPECT_NEAR(coherent_fidelity(thermal_n(5.0)), 1.0 / 6.0, 1e-9);
}

TEST(CoherentFidelity, EvenCatMatchesBruteForce) {
    const int dim = 50;
    const oracle::Vector cat = oracle::coherent(2.0, dim) + oracle::coherent(-2.0, dim);
    const DensityMatrix rho = DensityMatrix::pure(cat / cat.norm());
    const QuadratureStats q = quadrature_stats(rho);
    EXPECT_NEAR(q.mean_x, 0.0, 1e-12);
    EXPECT_NEAR(q.mean_p, 0.0, 1e-12);
    EXPECT_NEAR(coherent_fidelity(rho), rho.matrix()(0, 0).real(), 1e-12);
    EXPECT_NEAR(coherent_fidelity(rho), brute_q(rho, 0.0), 1e-12);
}

TEST(QFunction, VacuumGaussian) {
    GridSpec g;
    g.resolution = 9;
    const QGrid q = q_function(thermal_state(0.0, 30), g);
    for (int i = 0; i < g.resolution; ++i)
        for (int j = 0; j < g.resolution; ++j) {
            const double r2 = g.re_at(i) * g.re_at(i) + g.im_at(j) * g.im_at(j);
            EXPECT_NEAR(q.values(i, j), std::exp(-r2), 1e-12);
        }
}

TEST(QFunction, MatchesBruteForceAndBounds) {
    std::mt19937_64 rng(4);
    const DensityMatrix rho(oracle::random_low_density(60, 10, rng));
    const GridSpec g = GridSpec::covering(3.0, 7);
    const QGrid q = q_function(rho, g);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
    const double top = es.eigenvalues().maxCoeff();
    for (int i = 0; i < g.resolution; ++i)
        for (int j = 0; j < g.resolution; ++j) {
            EXPECT_NEAR(q.values(i, j), brute_q(rho, {g.re_at(i), g.im_at(j)}), 1e-10);
            EXPECT_GE(q.values(i, j), 0.0);
            EXPECT_LE(q.values(i, j), top + 1e-12);
        }
    EXPECT_NEAR(husimi(thermal_n(2.0), 0.0), 1.0 / 3.0, 1e-10);
}

TEST(QFunction, CoveringGridSpansRadius) {
    const GridSpec g = GridSpec::covering(std::sqrt(8.0) + 4.0, 81);
    EXPECT_LE(g.re_min, -(std::sqrt(8.0) + 4.0));
    EXPECT_GE(g.re_max, std::sqrt(8.0) + 4.0);
    EXPECT_DOUBLE_EQ(g.re_at(0), g.re_min);
    EXPECT_DOUBLE_EQ(g.im_at(80), g.im_max);
}

TEST(MaxQ, CoherentPeak) {
    const Complex beta(1.23, -0.77);
    const MaxQ m = max_q(coherent_state(beta, 50));
    EXPECT_LT(std::abs(m.alpha_star - beta), 1e-3);
    EXPECT_NEAR(m.q_max, 1.0, 1e-5);
}

TEST(MaxQ, ThermalPeakAtOrigin) {
    const MaxQ m = max_q(thermal_n(4.0));
    EXPECT_LT(std::abs(m.alpha_star), 1e-3);
    EXPECT_NEAR(m.q_max, 0.2, 1e-8);
}

TEST(MaxQ, BimodalMixtureOutlier) {
    const int dim = 60;
    const Matrix rho = 0.5 * oracle::projector(oracle::coherent(3.0, dim)) + 0.5 * oracle::projector(oracle::coherent(-3.0, dim));
    const DensityMatrix mix(rho);
    const MaxQ m = max_q(mix);
    const double fid = coherent_fidelity(mix);
    EXPECT_NEAR(m.q_max, 0.5, 1e-6);
    EXPECT_NEAR(std::abs(m.alpha_star.real()), 3.0, 1e-3);
    EXPECT_NEAR(fid, std::exp(-9.0), 1e-10);
    EXPECT_GT(m.q_max, 10.0 * fid);
}

TEST(MaxQ, DominatesFidelity) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix rho(oracle::random_low_density(40, 6, rng));
        EXPECT_LE(coherent_fidelity(rho), max_q(rho).q_max + 1e-6);
    }
}

TEST(FockPopulations, Examples) {
    const FockStats vac = fock_populations(thermal_state(0.0, 5));
    EXPECT_DOUBLE_EQ(vac.ground_population, 1.0);
    EXPECT_DOUBLE_EQ(vac.mean_n, 0.0);

    const FockStats coh = fock_populations(coherent_state(1.0, 40));
    EXPECT_NEAR(coh.ground_population, std::exp(-1.0), 1e-12);
    EXPECT_NEAR(coh.mean_n, 1.0, 1e-10);

    const double theta = theta_for_occupation(2.0);
    const FockStats th = fock_populations(thermal_n(2.0));
    for (std::size_t n = 0; n + 1 < th.populations.size(); ++n)
        EXPECT_NEAR(th.populations[n + 1], std::exp(-1.0 / theta) * th.populations[n], 1e-15);
    EXPECT_NEAR(th.mean_n, 2.0, 1e-9);
}
