#include "qteleport/bloch.hpp"

#include <cmath>
#include <stdexcept>

namespace qtel {

namespace {

const Mat& pauli(int j) {
    static const Mat sx = [] {
        Mat m(2, 2);
        m << 0, 1, 1, 0;
        return m;
    }();
    static const Mat sy = [] {
        Mat m(2, 2);
        m << Cx(0, 0), Cx(0, -1), Cx(0, 1), Cx(0, 0);
        return m;
    }();
    static const Mat sz = [] {
        Mat m(2, 2);
        m << 1, 0, 0, -1;
        return m;
    }();
    switch (j) {
        case 0: return sx;
        case 1: return sy;
        default: return sz;
    }
}

}  // namespace

BlochRotation bloch_rotation(const Mat& X) {
    if (X.rows() != 2 || X.cols() != 2)
        throw std::invalid_argument("bloch_rotation: matrix must be 2x2");
    if ((X.adjoint() * X - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("bloch_rotation: input is not unitary");

    BlochRotation rot;
    const Mat xd = X.adjoint();
    for (int j = 0; j < 3; ++j) {
        const Mat left = X * pauli(j) * xd;
        for (int k = 0; k < 3; ++k)
            rot.R(j, k) = 0.5 * (left * pauli(k)).trace().real();
    }
    const double tr = rot.R.trace();
    rot.angle = std::acos(std::clamp((tr - 1.0) / 2.0, -1.0, 1.0));
    const double s = std::sin(rot.angle);
    if (std::abs(s) >= 1e-6) {
        rot.axis[0] = (rot.R(2, 1) - rot.R(1, 2)) / (2.0 * s);
        rot.axis[1] = (rot.R(0, 2) - rot.R(2, 0)) / (2.0 * s);
        rot.axis[2] = (rot.R(1, 0) - rot.R(0, 1)) / (2.0 * s);
        rot.axis.normalize();
    } else if (rot.angle > 1.0) {
        // angle ~ pi: R + Id ~ 2 n n^T; the dominant eigenvector is the axis
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(
            0.5 * (rot.R + rot.R.transpose()) + Eigen::Matrix3d::Identity());
        rot.axis = es.eigenvectors().col(2).normalized();
    }  // angle ~ 0: axis arbitrary, keep the default
    return rot;
}

double qubit_F(const Protocol& proto, const Channel& ch) {
    if (proto.d != 2 || ch.d != 2) throw std::invalid_argument("qubit_F: requires d = 2");
    double sum = 0.0;
    for (const auto& x : proto.X) sum += bloch_rotation(x).R.trace();
    return 0.5 + ch.gamma / 24.0 * sum;
}

double delta_alpha(const BlochRotation& R) {
    return (1.0 - R.R.trace() / 3.0) / (2.0 * std::sqrt(5.0));
}

double qubit_covariance(const BlochRotation& Ra, const BlochRotation& Rb) {
    const Eigen::Matrix3d& a = Ra.R;
    const Eigen::Matrix3d& b = Rb.R;
    return (3.0 * (a * b.transpose()).trace() + 3.0 * (a * b).trace() -
            2.0 * a.trace() * b.trace()) /
           180.0;
}

QubitDeviationReport qubit_D_analytic(const Protocol& proto, const Channel& ch) {
    if (proto.d != 2 || ch.d != 2)
        throw std::invalid_argument("qubit_D_analytic: requires d = 2");
    QubitDeviationReport rep;
    std::array<BlochRotation, 4> rots;
    for (int a = 0; a < 4; ++a) {
        rots[a] = bloch_rotation(proto.X[a]);
        rep.deltas[a] = delta_alpha(rots[a]);
    }
    double sum = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const double c = qubit_covariance(rots[a], rots[b]);
            rep.covariance(a, b) = c;
            sum += c;
        }
    if (sum < -1e-9)
        throw std::logic_error("qubit_D_analytic: covariance sum negative beyond tolerance");
    double tr_sum = 0.0;
    for (const auto& r : rots) tr_sum += r.R.trace();
    rep.F = 0.5 + ch.gamma / 24.0 * tr_sum;
    rep.D = ch.gamma / 4.0 * std::sqrt(std::max(sum, 0.0));
    return rep;
}

BoundCheck tight_bound_check(double F, double D, const Channel& ch) {
    if (ch.d != 2) throw std::invalid_argument("tight_bound_check: requires d = 2");
    const double f_max = (1.0 + ch.gamma) / 2.0;
    BoundCheck out;
    out.margin = (f_max - F) / std::sqrt(5.0) - D;
    out.ok = out.margin >= -1e-9;
    return out;
}

}  // namespace qtel
