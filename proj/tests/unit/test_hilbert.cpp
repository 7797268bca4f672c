#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mbcool/hilbert.hpp"
#include "mbcool/observables.hpp"
#include "oracles.hpp"

using namespace mbcool;

namespace {

double interior_defect(const Matrix& m, int interior) {
    return oracle::max_abs(m.topLeftCorner(interior, interior) - Matrix::Identity(interior, interior));
}

}  // namespace

TEST(LadderOps, TwoLevelAnnihilation) {
    const LadderOps ops = ladder_ops(2);
    Matrix expected(2, 2);
    expected << 0, 1, 0, 0;
    EXPECT_EQ(ops.a.matrix(), expected);
}

TEST(LadderOps, SqrtRule) {
    const LadderOps ops = ladder_ops(4);
    EXPECT_DOUBLE_EQ(ops.a.matrix()(2, 3).real(), std::sqrt(3.0));
    for (int m = 0; m + 1 < 4; ++m) EXPECT_DOUBLE_EQ(ops.a.matrix()(m, m + 1).real(), std::sqrt(m + 1.0));
}

TEST(LadderOps, CommutatorOnInterior) {
    const int dim = 16;
    const LadderOps ops = ladder_ops(dim);
    const Matrix& a = ops.a.matrix();
    const Matrix comm = a * a.adjoint() - a.adjoint() * a;
    EXPECT_LT(interior_defect(comm, dim - 1), 1e-14);
    EXPECT_GT(std::abs(comm(dim - 1, dim - 1) - 1.0), 1.0);  // truncation artifact lives in the corner
}

TEST(LadderOps, NumberIsAdagA) {
    const LadderOps ops = ladder_ops(12);
    EXPECT_EQ(ops.n.matrix(), ops.a_dag.matrix() * ops.a.matrix());
    EXPECT_EQ(ops.a.matrix(), oracle::annihilation(12));
}

TEST(LadderOps, RejectsTinyDimension) {
    EXPECT_THROW(ladder_ops(1), InvalidDimension);
    EXPECT_THROW(ladder_ops(0), InvalidDimension);
}

TEST(ThermalState, ZeroTemperatureIsVacuum) {
    const DensityMatrix rho = thermal_state(0.0, 8);
    Matrix expected = Matrix::Zero(8, 8);
    expected(0, 0) = 1.0;
    EXPECT_EQ(rho.matrix(), expected);
}

TEST(ThermalState, ReferenceTemperatureOccupation) {
    const double theta = theta_from_temperature(0.050, 5.0e7);
    EXPECT_NEAR(theta, 130.92, 0.01);
    EXPECT_NEAR(thermal_occupation(theta), 130.4, 0.05);

    TruncationPolicy loose;
    loose.tail_tol = 1e-3;
    const int dim = min_thermal_dim(theta, loose.tail_tol);
    const FockStats fs = fock_populations(thermal_state(theta, dim, loose));
    // renormalizing over the truncated space shifts the mean by O(dim * tail)
    EXPECT_NEAR(fs.mean_n, thermal_occupation(theta), dim * loose.tail_tol);
}

TEST(ThermalState, GeometricPopulationsAndUnitTrace) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.2, 6.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double theta = u(rng);
        const int dim = min_thermal_dim(theta, 1e-9);
        const DensityMatrix rho = thermal_state(theta, dim);
        EXPECT_NEAR(rho.trace(), 1.0, 1e-14);
        const double r = std::exp(-1.0 / theta);
        for (int n = 0; n + 1 < dim; ++n)
            EXPECT_NEAR(rho.matrix()(n + 1, n + 1).real(), r * rho.matrix()(n, n).real(), 1e-15);
        EXPECT_NO_THROW(rho.validate());
    }
}

TEST(ThermalState, TooSmallDimensionReportsMinimum) {
    const double theta = theta_for_occupation(8.0);
    try {
        thermal_state(theta, 20);
        FAIL() << "expected TruncationError";
    } catch (const TruncationError& e) {
        EXPECT_EQ(e.min_dim(), min_thermal_dim(theta, 1e-9));
        EXPECT_NO_THROW(thermal_state(theta, e.min_dim()));
    }
}

TEST(ThermalState, OccupationInverse) {
    for (double nbar : {0.1, 1.0, 8.0, 130.4}) EXPECT_NEAR(thermal_occupation(theta_for_occupation(nbar)), nbar, 1e-10 * nbar);
}

TEST(ThermalState, EntropyMatchesClosedForm) {
    for (double nbar : {0.5, 2.0, 5.0}) {
        const double theta = theta_for_occupation(nbar);
        TruncationPolicy tight;
        tight.tail_tol = 1e-12;
        const DensityMatrix rho = thermal_state(theta, min_thermal_dim(theta, tight.tail_tol), tight);
        const double exact = thermal_entropy(nbar);
        EXPECT_NEAR(von_neumann_entropy(rho), exact, 1e-6 * exact);
    }
}

TEST(CoherentKet, MatchesDisplacedVacuum) {
    const Complex alpha(1.2, -0.7);
    const Vector mine = coherent_ket(alpha, 30);
    const Vector ref = oracle::coherent(alpha, 30);
    EXPECT_LT(oracle::max_abs(mine - ref), 1e-12);
}

TEST(Displacement, ZeroIsIdentity) {
    const CroppedOperator d = displacement(0.0, 10);
    EXPECT_LT(oracle::max_abs(d.op.matrix() - Matrix::Identity(10, 10)), 1e-14);
}

TEST(Displacement, PoissonStatisticsOfDisplacedVacuum) {
    for (double mu : {0.3, 1.0, 1.5, -2.0}) {
        const CroppedOperator d = displacement(mu, 40);
        const Vector col = d.op.matrix().col(0);
        for (int n = 0; n < 25; ++n) EXPECT_NEAR(std::norm(col[n]), oracle::poisson(mu * mu, n), 1e-12) << "mu=" << mu;
    }
}

TEST(Displacement, UnitaryOnInteriorWithStatedPad) {
    const double mu = 1.5;
    TruncationPolicy policy;
    policy.pad = 3 * static_cast<int>(std::ceil(mu * mu + 5 * std::abs(mu)));
    const CroppedOperator d = displacement(mu, 32, policy);
    ASSERT_GT(d.interior, 0);
    const Matrix& m = d.op.matrix();
    EXPECT_LT(interior_defect(m.adjoint() * m, d.interior), 1e-8);
}

TEST(Displacement, InverseOnInterior) {
    for (double mu : {0.4, 1.5, 2.5}) {
        const CroppedOperator plus = displacement(mu, 64);
        const CroppedOperator minus = displacement(-mu, 64);
        const int interior = std::min(plus.interior, minus.interior);
        ASSERT_GT(interior, 8);
        EXPECT_LT(interior_defect(plus.op.matrix() * minus.op.matrix(), interior), 1e-8);
    }
}

TEST(Displacement, MatchesExpmOracle) {
    const double mu = 1.1;
    const int dim = 24;
    const int big = dim + 60;
    const Matrix a = oracle::annihilation(big);
    const Matrix ref = oracle::expm(mu * (a.adjoint() - a)).topLeftCorner(dim, dim);
    EXPECT_LT(oracle::max_abs(displacement(mu, dim).op.matrix() - ref), 1e-10);
}

TEST(Displacement, InsufficientPaddingIsReported) {
    TruncationPolicy none;
    none.pad = 2;
    EXPECT_THROW(displacement(3.0, 16, none), PaddingError);
}

TEST(DisplacedRotation, PureRotationWhenUndisplaced) {
    const double theta = 0.37;
    const CroppedOperator u = displaced_rotation(theta, 0.0, 0.0, 12);
    for (int n = 0; n < 12; ++n) EXPECT_LT(std::abs(u.op.matrix()(n, n) - std::polar(1.0, -theta * n)), 1e-14);
    EXPECT_LT(oracle::max_abs(u.op.matrix() - Matrix(u.op.matrix().diagonal().asDiagonal())), 1e-14);
}

TEST(DisplacedRotation, ZeroAngleIsIdentity) {
    const CroppedOperator u = displaced_rotation(0.0, 1.5, 100.0, 20);
    EXPECT_LT(interior_defect(u.op.matrix(), 20), 1e-12);
}

TEST(DisplacedRotation, MatchesExpmOracleOnInterior) {
    const int dim = 32;
    const CroppedOperator u = displaced_rotation(0.1, 1.5, 100.0, dim);
    const Matrix ref = oracle::rotation_expm(0.1, 1.5, 100.0, dim + 80).topLeftCorner(dim, dim);
    const int k = u.interior;
    ASSERT_GT(k, 16);
    const double err = oracle::max_abs(u.op.matrix().topLeftCorner(k, k) - ref.topLeftCorner(k, k));
    EXPECT_LT(err / oracle::max_abs(ref.topLeftCorner(k, k)), 1e-8);
}

TEST(DisplacedRotation, UnitaryOnInterior) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> th(0.0, 2.0 * M_PI), mu(-1.5, 1.5), c(-50.0, 50.0);
    for (int trial = 0; trial < 10; ++trial) {
        const CroppedOperator u = displaced_rotation(th(rng), mu(rng), c(rng), 48);
        ASSERT_GT(u.interior, 0);
        const Matrix& m = u.op.matrix();
        EXPECT_LT(interior_defect(m.adjoint() * m, u.interior), 1e-8);
    }
}

TEST(QuadraticGenerator, ExactlyUnitaryAndMatchesTruncatedExpm) {
    for (double mu : {-1.5, 0.4, 2.0}) {
        const int dim = 24;
        const FockOperator u = propagator(0.3, mu, 7.0, dim);
        const Matrix& m = u.matrix();
        EXPECT_LT(oracle::max_abs(m.adjoint() * m - Matrix::Identity(dim, dim)), 1e-12);
        EXPECT_LT(oracle::max_abs(m - oracle::rotation_expm(0.3, mu, 7.0, dim)), 1e-11);
    }
}

TEST(QuadraticGenerator, AgreesWithAnalyticRouteOnInterior) {
    const int dim = 48;
    const CroppedOperator analytic = displaced_rotation(0.1, 1.5, 100.0, dim);
    const FockOperator spectral = propagator(0.1, 1.5, 100.0, dim);
    const int k = std::min(analytic.interior, 24);
    EXPECT_LT(oracle::max_abs(analytic.op.matrix().topLeftCorner(k, k) - spectral.matrix().topLeftCorner(k, k)), 1e-8);
}

TEST(FreeRotation, MatchesDiagonalConjugation) {
    std::mt19937_64 rng(5);
    const DensityMatrix rho(oracle::random_density(10, rng));
    const DensityMatrix out = free_rotation(rho, 0.9);
    const Matrix u = oracle::expm(Complex(0.0, -0.9) * oracle::number(10));
    EXPECT_LT(oracle::max_abs(out.matrix() - u * rho.matrix() * u.adjoint()), 1e-13);
}

TEST(DensityMatrix, ValidateCatchesViolations) {
    Matrix m = Matrix::Identity(3, 3) / 3.0;
    EXPECT_NO_THROW(DensityMatrix(m).validate());
    Matrix skew = m;
    skew(0, 1) = 0.1;
    EXPECT_THROW(DensityMatrix(skew).validate(), ConsistencyError);
    EXPECT_THROW(DensityMatrix(Matrix(2.0 * m)).validate(), ConsistencyError);
    Matrix neg = Matrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    EXPECT_THROW(DensityMatrix(neg).validate(), ConsistencyError);
    EXPECT_THROW(DensityMatrix::normalized(Matrix::Zero(3, 3)), DegenerateBranch);
}

TEST(DensityMatrix, UnitaryConjugationPreservesInvariants) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix rho(oracle::random_density(20, rng));
        const DensityMatrix out = propagator(0.1, 1.5, 100.0, 20).conjugate(rho);
        EXPECT_NO_THROW(out.validate());
    }
}
