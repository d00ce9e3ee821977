#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qteleport/rng.hpp"

namespace qtel {

using Cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;   // dense complex matrix (U, V, X, rho carriers)
using Vec = Eigen::VectorXcd;   // pure-state amplitudes
using RVec = Eigen::VectorXd;   // real parameter values, radians

// wrap an angle into [-pi, pi)
double wrap_angle(double x);

// Real control-parameter vector of length d^2-1; components are stored wrapped
// into [-pi, pi). Wrapping is a search-space convention: exp(-i p.G) is not
// periodic in p for d > 2, so callers that need a specific unitary must supply
// parameters already inside the box (optimal_protocol does; see its tests).
struct ParamVector {
    int d = 0;
    RVec v;

    ParamVector() = default;
    explicit ParamVector(int dim);            // zeros
    ParamVector(int dim, const RVec& values); // wraps each component
    int size() const { return static_cast<int>(v.size()); }
};

// The d^2-1 generalized Gell-Mann generators: Hermitian, traceless, with
// tr(g_i g_j) = 2 delta_ij. Order: symmetric pairs (j<k row-major), then
// antisymmetric pairs, then diagonal. d=2 yields exactly (sigma_x, sigma_y,
// sigma_z).
struct GeneratorSet {
    int d = 0;
    std::vector<Mat> g;
};

GeneratorSet su_generators(int d);

// U(p) = exp(-i sum_j p_j g_j). Closed form for d=2, eigendecomposition of the
// Hermitian combination otherwise.
Mat unitary_from_params(const ParamVector& p, const GeneratorSet& gens);

// Inverse of unitary_from_params up to global phase: finds p with
// unitary_from_params(p) = U / det(U)^{1/d} for the d-th root that keeps the
// components smallest. Utility for constructing parameterized versions of
// known unitaries; round-trip is exact up to phase (tested).
ParamVector params_from_unitary(const Mat& U, const GeneratorSet& gens);

// Haar-uniform pure state: d i.i.d. standard complex Gaussians, normalized.
Vec haar_random_state(int d, Rng& rng);

// Haar-uniform unitary: complex Ginibre matrix, QR decomposition, then the
// R-diagonal phase correction (without it QR is not Haar).
Mat haar_random_unitary(int d, Rng& rng);

// <target| rho |target>, clipped into [0,1] when the violation is numerical
// dust (<= 1e-10); larger violations throw.
double state_fidelity(const Mat& rho, const Vec& target);

}  // namespace qtel
