#pragma once

#include <array>

#include "qteleport/teleport.hpp"

namespace qtel {

// SO(3) image of a 2x2 unitary: R_jk = (1/2) tr(X sigma_j X^dagger sigma_k).
// Global phases of X drop out. angle in [0, pi]; axis is unit norm and
// arbitrary (set to z) at angle 0.
struct BlochRotation {
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    double angle = 0.0;
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
};

BlochRotation bloch_rotation(const Mat& X);

// F = 1/2 + (gamma/24) sum_alpha tr(R_alpha); equals analytic_F through the
// identity |tr X|^2 = 1 + tr R.
double qubit_F(const Protocol& proto, const Channel& ch);

// Delta = (1/(2 sqrt 5)) (1 - tr(R)/3): the per-correction fidelity deviation
// at gamma = 1.
double delta_alpha(const BlochRotation& R);

// Pairwise covariance of xi_a, xi_b over Haar inputs:
//   C_ab = [3 tr(Ra Rb^T) + 3 tr(Ra Rb) - 2 tr(Ra) tr(Rb)] / 180.
// Derived from the product form of Schur's lemma and validated against
// brute-force Bloch-sphere integration (acceptance gate). Diagonal reduces
// to delta_alpha^2.
double qubit_covariance(const BlochRotation& Ra, const BlochRotation& Rb);

struct QubitDeviationReport {
    double F = 0.0;
    double D = 0.0;
    std::array<double, 4> deltas{};
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();
};

// D = (gamma/4) sqrt( sum_ab C_ab ), assembled from the closed-form pairwise
// covariances of the four correction rotations.
QubitDeviationReport qubit_D_analytic(const Protocol& proto, const Channel& ch);

struct BoundCheck {
    bool ok = false;
    double margin = 0.0;  // (F_max - F)/sqrt(5) - D
};

// Tight qubit bound D <= (F_max - F)/sqrt(5) with F_max = (1+gamma)/2.
BoundCheck tight_bound_check(double F, double D, const Channel& ch);

}  // namespace qtel
