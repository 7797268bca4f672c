#include "mbcool/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace mbcool {

namespace {

// Lindbladian for one block rho_ab with left Hamiltonian n + ml X and right
// Hamiltonian n + mr X plus a scalar offset difference.
//
// In the rotating frame rho~ = e^{i n t} rho e^{-i n t} the n terms drop out,
// X becomes a e^{-it} + a^dagger e^{it}, and the dissipator is unchanged.
// One evaluation is a single pass touching each entry's eight neighbours.
class BandedLindbladian {
public:
    BandedLindbladian(int dim, double ml, double mr, double offset_diff, const BathParams& bath,
                      bool rotating)
        : n_(dim), ml_(ml), mr_(mr), hermitian_(ml == mr && offset_diff == 0.0),
          sq_(dim + 1, 0.0), dre_(dim * dim), dim_(dim * dim) {
        for (int k = 0; k + 1 < dim; ++k) sq_[k + 1] = std::sqrt(double(k + 1));
        const double gd = 0.5 * bath.gamma_tilde * (bath.nbar + 1.0);
        const double gu = 0.5 * bath.gamma_tilde * bath.nbar;
        down2_ = 2.0 * gd;
        up2_ = 2.0 * gu;
        // a a^dagger on the truncated space is diag(1, ..., dim-1, 0)
        auto aad = [dim](int i) { return i + 1 < dim ? double(i + 1) : 0.0; };
        for (int j = 0; j < dim; ++j) {
            for (int i = 0; i < dim; ++i) {
                dre_[j * dim + i] = -gd * (i + j) - gu * (aad(i) + aad(j));
                dim_[j * dim + i] = -((rotating ? 0.0 : double(i - j)) + offset_diff);
            }
        }
    }

    // Right-hand side at frame time t; t is ignored outside the rotating frame.
    // Hermitian-preserving generators evaluate the lower triangle and mirror it.
    void apply(const Matrix& rm, Matrix& outm, double t = 0.0) const {
        const int n = n_;
        const Complex* r = rm.data();
        Complex* out = outm.data();
        const double* sq = sq_.data();
        const double cr = std::cos(t);
        const double ci = std::sin(t);
        for (int j = 0; j < n; ++j) {
            const Complex* c0 = r + j * n;
            const Complex* cm = j > 0 ? c0 - n : nullptr;
            const Complex* cp = j + 1 < n ? c0 + n : nullptr;
            const double sl = sq[j];
            const double sr = sq[j + 1];
            const double* dre = dre_.data() + j * n;
            const double* dim = dim_.data() + j * n;
            Complex* o = out + j * n;
            for (int i = hermitian_ ? j : 0; i < n; ++i) {
                const Complex v = c0[i];
                double re = dre[i] * v.real() - dim[i] * v.imag();
                double im = dre[i] * v.imag() + dim[i] * v.real();

                // -i ml X rho with (a^dagger rho) e^{it} + (a rho) e^{-it}
                const Complex up = i > 0 ? sq[i] * c0[i - 1] : Complex(0.0);
                const Complex dn = i + 1 < n ? sq[i + 1] * c0[i + 1] : Complex(0.0);
                const Complex xs(cr * (up + dn).real() - ci * (up - dn).imag(),
                                 cr * (up + dn).imag() + ci * (up - dn).real());
                re += ml_ * xs.imag();
                im -= ml_ * xs.real();

                // +i mr rho X with (rho a) e^{-it} + (rho a^dagger) e^{it}
                const Complex ra = cm ? sl * cm[i] : Complex(0.0);
                const Complex rad = cp ? sr * cp[i] : Complex(0.0);
                const Complex ys(cr * (ra + rad).real() - ci * (rad - ra).imag(),
                                 cr * (ra + rad).imag() + ci * (rad - ra).real());
                re -= mr_ * ys.imag();
                im += mr_ * ys.real();

                // 2 gd a rho a^dagger and 2 gu a^dagger rho a
                if (cp && i + 1 < n) {
                    const Complex w = (down2_ * sq[i + 1] * sr) * cp[i + 1];
                    re += w.real();
                    im += w.imag();
                }
                if (cm && i > 0) {
                    const Complex w = (up2_ * sq[i] * sl) * cm[i - 1];
                    re += w.real();
                    im += w.imag();
                }
                o[i] = Complex(re, im);
            }
        }
        if (hermitian_) {
            for (int j = 1; j < n; ++j)
                for (int i = 0; i < j; ++i) out[j * n + i] = std::conj(out[i * n + j]);
        }
    }

    double down2() const { return down2_; }
    double up2() const { return up2_; }

private:
    int n_;
    double ml_, mr_;
    bool hermitian_;
    double down2_ = 0.0, up2_ = 0.0;
    std::vector<double> sq_;  // sq_[k] = sqrt(k); the entry at k = dim is padding
    std::vector<double> dre_, dim_;
};

int step_count(double duration, double step_angle) {
    if (!(step_angle > 0.0)) throw StepSizeError("step_angle must be positive");
    return std::max(1, static_cast<int>(std::ceil(duration / step_angle - 1e-9)));
}

// Classic RK4 with a fixed step in the rotating frame; returns the final
// (unnormalized) matrix back in the lab frame.
Matrix rk4(const BandedLindbladian& l, Matrix r, double duration, double step_angle) {
    const int steps = step_count(duration, step_angle);
    const double h = duration / steps;
    const int n = static_cast<int>(r.rows());
    Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n);
    for (int s = 0; s < steps; ++s) {
        const double t = s * h;
        l.apply(r, k1, t);
        tmp.noalias() = r + (0.5 * h) * k1;
        l.apply(tmp, k2, t + 0.5 * h);
        tmp.noalias() = r + (0.5 * h) * k2;
        l.apply(tmp, k3, t + 0.5 * h);
        tmp.noalias() = r + h * k3;
        l.apply(tmp, k4, t + h);
        r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) r(i, j) *= std::polar(1.0, -duration * (i - j));
    return r;
}

// Same scheme restricted to the populations, for diagonal states under H = n.
// Off-diagonal entries of such states stay exactly zero.
Matrix rk4_populations(const BandedLindbladian& l, const Matrix& rho, double duration,
                       double step_angle) {
    const int steps = step_count(duration, step_angle);
    const double h = duration / steps;
    const int n = static_cast<int>(rho.rows());
    const double gd = 0.5 * l.down2();
    const double gu = 0.5 * l.up2();
    auto rhs = [&](const RealVector& p, RealVector& out) {
        for (int k = 0; k < n; ++k) {
            const double aad = k + 1 < n ? double(k + 1) : 0.0;
            double v = -2.0 * (gd * k + gu * aad) * p[k];
            if (k + 1 < n) v += 2.0 * gd * (k + 1) * p[k + 1];
            if (k > 0) v += 2.0 * gu * k * p[k - 1];
            out[k] = v;
        }
    };
    RealVector p = rho.diagonal().real();
    RealVector k1(n), k2(n), k3(n), k4(n);
    for (int s = 0; s < steps; ++s) {
        rhs(p, k1);
        rhs(p + 0.5 * h * k1, k2);
        rhs(p + 0.5 * h * k2, k3);
        rhs(p + h * k3, k4);
        p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return p.cast<Complex>().asDiagonal();
}

bool is_diagonal(const Matrix& m) {
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
            if (i != j && m(i, j) != Complex(0.0)) return false;
    return true;
}

void check_drift(double before, double after) {
    if (!(std::abs(after - before) < 1e-8)) {
        throw StepSizeError("trace drifted from " + std::to_string(before) + " to " +
                            std::to_string(after) + "; refine step_angle");
    }
}

}  // namespace

FockOperator OscillatorHamiltonian::to_operator(int dim) const {
    const LadderOps ops = ladder_ops(dim);
    return FockOperator(ops.n.matrix() + linear * (ops.a.matrix() + ops.a_dag.matrix()) +
                        offset * Matrix::Identity(dim, dim));
}

DensityMatrix wait_evolution(const DensityMatrix& rho, double wait_angle, Charge charge,
                             const SystemParams& params, bool coupling_on) {
    if (wait_angle == 0.0) return rho;
    if (!coupling_on) return free_rotation(rho, wait_angle);
    const double s = sign(charge);
    return propagator(wait_angle, s * params.kappa, s * params.chi, rho.dim()).conjugate(rho);
}

FeedbackPlan feedback_plan(double mean_x, double mean_p, double eps_skip) {
    FeedbackPlan plan;
    const Complex alpha(0.5 * mean_x, 0.5 * mean_p);
    if (!(std::abs(alpha) >= eps_skip)) return plan;  // also catches NaN
    double x = mean_x;
    double p = mean_p;
    if (std::abs(x) < std::abs(p)) {
        // e^{-i pi/2 n}: (X, P) -> (P, -X); keeps |g| <= |alpha| / sqrt(2)
        plan.pre_rotation = std::numbers::pi / 2;
        x = mean_p;
        p = -mean_x;
    }
    const Complex a(0.5 * x, 0.5 * p);
    const double g = -(x * x + p * p) / (4.0 * x);
    double theta = -std::arg(g / (a + g));
    if (theta <= 0.0) theta += 2.0 * std::numbers::pi;
    plan.g = g;
    plan.theta = theta;
    plan.skip = false;
    return plan;
}

DensityMatrix apply_feedback(const DensityMatrix& rho, const FeedbackPlan& plan) {
    if (plan.skip) return rho;
    const DensityMatrix turned = plan.pre_rotation != 0.0 ? free_rotation(rho, plan.pre_rotation) : rho;
    return propagator(plan.theta, plan.g, 0.0, rho.dim()).conjugate(turned);
}

Matrix lindblad_rhs(const Matrix& rho, const FockOperator& hamiltonian, const BathParams& bath) {
    const int dim = static_cast<int>(rho.rows());
    const LadderOps ops = ladder_ops(dim);
    const Matrix& a = ops.a.matrix();
    const Matrix& ad = ops.a_dag.matrix();
    const Matrix n = ad * a;
    const Matrix aad = a * ad;
    const Matrix& h = hamiltonian.matrix();
    const double gd = 0.5 * bath.gamma_tilde * (bath.nbar + 1.0);
    const double gu = 0.5 * bath.gamma_tilde * bath.nbar;
    Matrix out = Complex(0.0, -1.0) * (h * rho - rho * h);
    out += gd * (2.0 * a * rho * ad - n * rho - rho * n);
    out += gu * (2.0 * ad * rho * a - aad * rho - rho * aad);
    return out;
}

Matrix lindblad_rhs(const Matrix& rho, const OscillatorHamiltonian& hamiltonian,
                    const BathParams& bath) {
    const int dim = static_cast<int>(rho.rows());
    BandedLindbladian l(dim, hamiltonian.linear, hamiltonian.linear, 0.0, bath, false);
    Matrix out(dim, dim);
    l.apply(rho, out);
    return out;
}

double default_step_angle(const BathParams& bath) {
    if (bath.gamma_tilde <= 0.0) return 0.01;
    return std::min(0.01, 0.1 / (bath.gamma_tilde * (bath.nbar + 1.0)));
}

DensityMatrix evolve_dissipative(const DensityMatrix& rho, const OscillatorHamiltonian& hamiltonian,
                                 const BathParams& bath, double duration, double step_angle) {
    if (duration < 0.0) throw StepSizeError("negative duration");
    if (duration == 0.0) return rho;
    // The offset only contributes a commuting phase, which cancels in rho.
    BandedLindbladian l(rho.dim(), hamiltonian.linear, hamiltonian.linear, 0.0, bath, true);
    Matrix out = hamiltonian.linear == 0.0 && is_diagonal(rho.matrix())
                     ? rk4_populations(l, rho.matrix(), duration, step_angle)
                     : rk4(l, rho.matrix(), duration, step_angle);
    check_drift(rho.trace(), out.trace().real());
    return DensityMatrix::normalized(out);
}

DensityMatrix apply_feedback_dissipative(const DensityMatrix& rho, const FeedbackPlan& plan,
                                         const BathParams& bath, double step_angle) {
    if (plan.skip) return rho;
    DensityMatrix out = rho;
    if (plan.pre_rotation != 0.0) out = evolve_dissipative(out, {}, bath, plan.pre_rotation, step_angle);
    return evolve_dissipative(out, {plan.g, 0.0}, bath, plan.theta, step_angle);
}

JointBlocks evolve_joint_blocks(const JointBlocks& blocks, const SystemParams& params,
                                const BathParams& bath, double duration, double step_angle) {
    if (duration < 0.0) throw StepSizeError("negative duration");
    if (duration == 0.0) return blocks;
    const int dim = blocks.dim();
    constexpr Charge labels[2] = {Charge::Minus, Charge::Plus};
    JointBlocks out = blocks;
    for (Charge a : labels) {
        for (Charge b : labels) {
            if (a == Charge::Minus && b == Charge::Plus) continue;
            const double ml = sign(a) * params.kappa;
            const double mr = sign(b) * params.kappa;
            const double dc = (sign(a) - sign(b)) * params.chi;
            BandedLindbladian l(dim, ml, mr, 0.0, bath, true);
            out.block(a, b) = std::polar(1.0, -dc * duration) *
                              rk4(l, blocks.block(a, b), duration, step_angle);
        }
    }
    out.block(Charge::Minus, Charge::Plus) = out.block(Charge::Plus, Charge::Minus).adjoint();
    check_drift(blocks.total_trace(), out.total_trace());
    return out;
}

}  // namespace mbcool
