#include "mbcool/measurement.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace mbcool {

namespace {

int index(Charge c) { return c == Charge::Minus ? 0 : 1; }

MeasurementOutcome collapse(Charge which, const Matrix& unnormalized) {
    const double p = unnormalized.trace().real();
    if (!(p >= kBranchFloor)) {
        throw DegenerateBranch(std::string("realized branch ") + label(which) +
                               " has probability " + std::to_string(p));
    }
    return {which, p, DensityMatrix::normalized(unnormalized)};
}

}  // namespace

std::pair<FockOperator, FockOperator> build_u_pm(const SystemParams& params, int dim) {
    const double theta = params.interaction_angle;
    FockOperator u_minus = propagator(theta, -params.kappa, -params.chi, dim);
    FockOperator u_plus = propagator(theta, params.kappa, params.chi, dim);
    return {std::move(u_minus), std::move(u_plus)};
}

MeasurementOps build_measurement_ops(const SystemParams& params, int dim, Charge cpb_start) {
    const auto [u_minus, u_plus] = build_u_pm(params, dim);
    const Matrix& um = u_minus.matrix();
    const Matrix& up = u_plus.matrix();

    // Starting in |+> the pulse algebra gives i(U- + U+)/2 on |-> and
    // (U+ - U-)/2 on |+>.
    Matrix m_minus = cpb_start == Charge::Minus ? Matrix(0.5 * (um - up)) : Matrix(0.5 * (um + up));
    Matrix m_plus = cpb_start == Charge::Minus ? Matrix(0.5 * (um + up)) : Matrix(0.5 * (up - um));

    MeasurementOps ops{FockOperator(std::move(m_minus)), FockOperator(std::move(m_plus)), cpb_start,
                       params.interaction_angle};
    const double residual = completeness_residual(ops);
    if (residual > 1e-10) {
        throw ConsistencyError("measurement operators are not complete, residual " +
                               std::to_string(residual));
    }
    return ops;
}

double completeness_residual(const MeasurementOps& ops) {
    const Matrix& mm = ops.m_minus.matrix();
    const Matrix& mp = ops.m_plus.matrix();
    const Matrix sum = mm.adjoint() * mm + mp.adjoint() * mp;
    return (sum - Matrix::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
}

double probability_minus(const DensityMatrix& rho, const MeasurementOps& ops) {
    const Matrix& m = ops.m_minus.matrix();
    return (m * rho.matrix() * m.adjoint()).trace().real();
}

MeasurementOutcome measure_and_collapse(const DensityMatrix& rho, const MeasurementOps& ops,
                                        double u) {
    if (ops.m_minus.dim() != rho.dim()) throw InvalidDimension("state and operators differ in dim");
    const Matrix& mm = ops.m_minus.matrix();
    Matrix branch = mm * rho.matrix() * mm.adjoint();
    const double p_minus = branch.trace().real();
    if (u < p_minus) return collapse(Charge::Minus, branch);
    const Matrix& mp = ops.m_plus.matrix();
    branch = mp * rho.matrix() * mp.adjoint();
    return collapse(Charge::Plus, branch);
}

// ---------------------------------------------------------------------------

const Matrix& JointBlocks::block(Charge a, Charge b) const {
    if (a == Charge::Minus) return b == Charge::Minus ? mm : mp;
    return b == Charge::Minus ? pm : pp;
}

Matrix& JointBlocks::block(Charge a, Charge b) {
    return const_cast<Matrix&>(std::as_const(*this).block(a, b));
}

Eigen::Matrix2cd charge_pulse(double delta) {
    const Complex c(std::cos(delta), 0.0);
    const Complex s(0.0, std::sin(delta));
    Eigen::Matrix2cd p;
    p << c, s, s, c;
    return p;
}

Eigen::Matrix2cd half_pi_pulse() { return charge_pulse(std::numbers::pi / 4); }

JointBlocks prepare_joint(const DensityMatrix& rho, Charge cpb_start) {
    const Eigen::Vector2cd v = half_pi_pulse().col(index(cpb_start));
    const Matrix& r = rho.matrix();
    return {v[0] * std::conj(v[0]) * r, v[0] * std::conj(v[1]) * r, v[1] * std::conj(v[0]) * r,
            v[1] * std::conj(v[1]) * r};
}

MeasurementOutcome project_joint(const JointBlocks& blocks, double u) {
    const Eigen::Matrix2cd p = half_pi_pulse();
    constexpr Charge labels[2] = {Charge::Minus, Charge::Plus};
    auto diagonal_block = [&](int a) {
        Matrix out = Matrix::Zero(blocks.dim(), blocks.dim());
        for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d)
                out += p(a, c) * std::conj(p(a, d)) * blocks.block(labels[c], labels[d]);
        return out;
    };
    Matrix minus = diagonal_block(0);
    if (u < minus.trace().real()) return collapse(Charge::Minus, minus);
    return collapse(Charge::Plus, diagonal_block(1));
}

// ---------------------------------------------------------------------------

namespace {

// Joint state after pulse / evolve / pulse, ordered (charge) x (oscillator).
Matrix oracle_final_state(const DensityMatrix& rho, const SystemParams& params, int dim,
                          Charge cpb_start) {
    if (rho.dim() != dim) throw InvalidDimension("oracle: state dim mismatch");
    const LadderOps ops = ladder_ops(dim);
    const Matrix x = ops.a.matrix() + ops.a_dag.matrix();
    const Matrix coupling = params.chi * Matrix::Identity(dim, dim) + params.kappa * x;

    const int n2 = 2 * dim;
    Matrix h = Matrix::Zero(n2, n2);
    h.topLeftCorner(dim, dim) = ops.n.matrix() - coupling;
    h.bottomRightCorner(dim, dim) = ops.n.matrix() + coupling;
    const Matrix u = (Complex(0.0, -params.interaction_angle) * h).exp();

    const Eigen::Matrix2cd p2 = half_pi_pulse();
    Matrix pulse = Matrix::Zero(n2, n2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            pulse.block(a * dim, b * dim, dim, dim) = p2(a, b) * Matrix::Identity(dim, dim);

    Matrix joint = Matrix::Zero(n2, n2);
    const int s = index(cpb_start);
    joint.block(s * dim, s * dim, dim, dim) = rho.matrix();

    const Matrix step = pulse * u * pulse;
    return step * joint * step.adjoint();
}

}  // namespace

std::pair<double, double> joint_state_probabilities(const DensityMatrix& rho,
                                                    const SystemParams& params, int dim,
                                                    Charge cpb_start) {
    const Matrix fin = oracle_final_state(rho, params, dim, cpb_start);
    return {fin.topLeftCorner(dim, dim).trace().real(),
            fin.bottomRightCorner(dim, dim).trace().real()};
}

MeasurementOutcome joint_state_oracle(const DensityMatrix& rho, const SystemParams& params, int dim,
                                      Charge cpb_start, double u) {
    const Matrix fin = oracle_final_state(rho, params, dim, cpb_start);
    const Matrix minus = fin.topLeftCorner(dim, dim);
    if (u < minus.trace().real()) return collapse(Charge::Minus, minus);
    return collapse(Charge::Plus, fin.bottomRightCorner(dim, dim));
}

}  // namespace mbcool
