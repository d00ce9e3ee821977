#include "qteleport/qlinalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qtel {

double wrap_angle(double x) {
    const double two_pi = 2.0 * M_PI;
    double w = x - two_pi * std::floor((x + M_PI) / two_pi);
    // floor rounding can land exactly on pi; the box is half-open
    if (w >= M_PI) w -= two_pi;
    if (w < -M_PI) w += two_pi;
    return w;
}

ParamVector::ParamVector(int dim) : d(dim), v(RVec::Zero(dim * dim - 1)) {
    if (dim < 2) throw std::invalid_argument("ParamVector: dimension must be >= 2");
}

ParamVector::ParamVector(int dim, const RVec& values) : d(dim), v(values) {
    if (dim < 2) throw std::invalid_argument("ParamVector: dimension must be >= 2");
    if (v.size() != static_cast<long>(dim) * dim - 1)
        throw std::invalid_argument("ParamVector: expected d^2-1 components");
    for (long j = 0; j < v.size(); ++j) v[j] = wrap_angle(v[j]);
}

GeneratorSet su_generators(int d) {
    if (d < 2) throw std::invalid_argument("su_generators: dimension must be >= 2");
    GeneratorSet set;
    set.d = d;
    set.g.reserve(static_cast<std::size_t>(d) * d - 1);
    const Cx I(0.0, 1.0);
    // symmetric: |j><k| + |k><j|, j < k
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            Mat m = Mat::Zero(d, d);
            m(j, k) = 1.0;
            m(k, j) = 1.0;
            set.g.push_back(std::move(m));
        }
    // antisymmetric: -i|j><k| + i|k><j|, j < k
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            Mat m = Mat::Zero(d, d);
            m(j, k) = -I;
            m(k, j) = I;
            set.g.push_back(std::move(m));
        }
    // diagonal: sqrt(2/(l(l+1))) (sum_{j<l} |j><j| - l |l><l|)
    for (int l = 1; l < d; ++l) {
        Mat m = Mat::Zero(d, d);
        const double norm = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
        for (int j = 0; j < l; ++j) m(j, j) = norm;
        m(l, l) = -norm * l;
        set.g.push_back(std::move(m));
    }
    return set;
}

namespace {

// exp(-i p.sigma) in closed form: cos|p| Id - i (sin|p|/|p|) p.sigma
Mat su2_exponential(const RVec& p) {
    const double theta = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    const double c = std::cos(theta);
    const double sinc = theta < 1e-12 ? 1.0 - theta * theta / 6.0 : std::sin(theta) / theta;
    const Cx I(0.0, 1.0);
    Mat u(2, 2);
    u(0, 0) = c - I * sinc * p[2];
    u(0, 1) = -I * sinc * (p[0] - I * p[1]);
    u(1, 0) = -I * sinc * (p[0] + I * p[1]);
    u(1, 1) = c + I * sinc * p[2];
    return u;
}

}  // namespace

Mat unitary_from_params(const ParamVector& p, const GeneratorSet& gens) {
    if (p.d != gens.d)
        throw std::invalid_argument("unitary_from_params: parameter/generator dimension mismatch");
    const int d = gens.d;
    if (d == 2) return su2_exponential(p.v);
    Mat h = Mat::Zero(d, d);
    for (std::size_t j = 0; j < gens.g.size(); ++j) h += p.v[static_cast<long>(j)] * gens.g[j];
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("unitary_from_params: eigendecomposition failed");
    const Cx I(0.0, 1.0);
    Vec phases(d);
    for (int j = 0; j < d; ++j) phases[j] = std::exp(-I * es.eigenvalues()[j]);
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

ParamVector params_from_unitary(const Mat& U, const GeneratorSet& gens) {
    const int d = gens.d;
    if (U.rows() != d || U.cols() != d)
        throw std::invalid_argument("params_from_unitary: matrix/generator dimension mismatch");
    if ((U.adjoint() * U - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("params_from_unitary: input is not unitary");

    const double det_arg = std::arg(U.determinant());
    const Cx I(0.0, 1.0);
    RVec best;
    double best_score = std::numeric_limits<double>::infinity();
    // d choices of det(U)^(1/d); keep the one with the smallest parameters
    for (int k = 0; k < d; ++k) {
        const Mat u_su = U * std::exp(-I * ((det_arg + 2.0 * M_PI * k) / d));
        Eigen::ComplexSchur<Mat> schur(u_su);
        if (schur.info() != Eigen::Success)
            throw std::runtime_error("params_from_unitary: Schur decomposition failed");
        // u_su is normal, so T is diagonal up to roundoff; eigenphases of
        // exp(-iH) give H's spectrum on the principal branch
        RVec h(d);
        for (int j = 0; j < d; ++j) h[j] = -std::arg(schur.matrixT()(j, j));
        // det = 1 makes sum(h) a multiple of 2*pi; shift entries onto the
        // branch where the sum (the trace of H) vanishes
        double s = h.sum();
        while (s > M_PI) {
            int jmax = 0;
            h.maxCoeff(&jmax);
            h[jmax] -= 2.0 * M_PI;
            s -= 2.0 * M_PI;
        }
        while (s < -M_PI) {
            int jmin = 0;
            h.minCoeff(&jmin);
            h[jmin] += 2.0 * M_PI;
            s += 2.0 * M_PI;
        }
        const Mat hm = schur.matrixU() * h.cast<Cx>().asDiagonal() * schur.matrixU().adjoint();
        RVec p(d * d - 1);
        for (std::size_t j = 0; j < gens.g.size(); ++j)
            p[static_cast<long>(j)] = 0.5 * (hm * gens.g[j]).trace().real();
        const double score = p.cwiseAbs().maxCoeff();
        if (score < best_score) {
            best_score = score;
            best = p;
        }
    }
    return ParamVector(d, best);
}

Vec haar_random_state(int d, Rng& rng) {
    if (d < 2) throw std::invalid_argument("haar_random_state: dimension must be >= 2");
    Vec v(d);
    for (int j = 0; j < d; ++j) {
        const double re = rng.normal();
        const double im = rng.normal();
        v[j] = Cx(re, im);
    }
    return v / v.norm();
}

Mat haar_random_unitary(int d, Rng& rng) {
    if (d < 2) throw std::invalid_argument("haar_random_unitary: dimension must be >= 2");
    Mat z(d, d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            const double re = rng.normal();
            const double im = rng.normal();
            z(j, k) = Cx(re, im);
        }
    Eigen::HouseholderQR<Mat> qr(z);
    Mat q = qr.householderQ() * Mat::Identity(d, d);
    // phase-fix with the R diagonal, otherwise the distribution is not Haar
    for (int j = 0; j < d; ++j) {
        const Cx r = qr.matrixQR()(j, j);
        const double a = std::abs(r);
        q.col(j) *= a > 0.0 ? r / a : Cx(1.0, 0.0);
    }
    return q;
}

double state_fidelity(const Mat& rho, const Vec& target) {
    if (rho.rows() != rho.cols() || rho.rows() != target.size())
        throw std::invalid_argument("state_fidelity: dimension mismatch");
    const double f = (target.adjoint() * rho * target)(0, 0).real();
    if (f < -1e-10 || f > 1.0 + 1e-10)
        throw std::runtime_error("state_fidelity: value outside [0,1] beyond tolerance");
    return std::clamp(f, 0.0, 1.0);
}

}  // namespace qtel
