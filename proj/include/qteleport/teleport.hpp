#pragma once

#include <string>
#include <vector>

#include "qteleport/qlinalg.hpp"

namespace qtel {

// Isotropic (Werner-type) resource: gamma |Psi0><Psi0| + (1-gamma)/d^2 * Id,
// with |Psi0> the canonical maximally entangled state.
struct Channel {
    int d = 2;
    double gamma = 1.0;
};

Channel make_channel(int d, double gamma);  // validates d >= 2, gamma in [0,1]

Mat channel_density(const Channel& ch);

// Teleportation protocol: d^2 measurement-defining unitaries U_alpha and d^2
// correction unitaries V_alpha, each parameterized by a ParamVector. The
// unitaries and the correction operators X_alpha = V_alpha U_alpha^dagger are
// cached at construction and never mutated in place.
struct Protocol {
    int d = 0;
    std::vector<ParamVector> alice;  // d^2 entries, defines U_alpha
    std::vector<ParamVector> bob;    // d^2 entries, defines V_alpha
    std::vector<Mat> U, V, X;        // caches, built by make_protocol
};

Protocol make_protocol(int d, std::vector<ParamVector> alice,
                       std::vector<ParamVector> bob);

// U_alpha = shift^m clock^n (Weyl-Heisenberg basis), alpha = m*d + n, and
// V_alpha = U_alpha, so every X_alpha is the identity. The generated
// measurement basis is verified complete at construction.
Protocol optimal_protocol(int d);

// All 2 d^2 parameter vectors drawn uniformly from [-pi, pi)^(d^2-1).
Protocol random_protocol(int d, Rng& rng);

const std::vector<Mat>& correction_ops(const Protocol& proto);

// Diagnostic: does {(U_alpha x Id)|Psi0>} resolve the identity? Arbitrary
// noisy protocols generally fail this; the F/D formulas below are operational
// definitions and are applied regardless.
bool is_complete(const Protocol& proto, double tol = 1e-9);

// f = (gamma/d^2) sum_alpha |<phi|X_alpha|phi>|^2 + (1-gamma)/d
double input_fidelity(const Protocol& proto, const Channel& ch, const Vec& phi);

// rho_out = (gamma/d^2) sum_alpha X_alpha rho_phi X_alpha^dagger + ((1-gamma)/d) Id
Mat simulate_output(const Protocol& proto, const Channel& ch, const Vec& phi);

// Closed form: F = F_max - (gamma/(d+1)) (d - (1/d^3) sum_alpha |tr X_alpha|^2)
double analytic_F(const Protocol& proto, const Channel& ch);

// E = (gamma/d^4) sum_alpha |tr X_alpha|^2 + (1-gamma)/d^2;  F = (dE+1)/(d+1)
double entanglement_quantity_E(const Protocol& proto, const Channel& ch);

// Haar average of xi = |<phi|X|phi>|^2:  (|tr X|^2 + d) / (d (d+1))
double schur_mean_xi(const Mat& X, int d);

struct FidelityBounds {
    double f_min = 0.0;  // 1/d - gamma/(d(d+1))
    double f_max = 0.0;  // gamma + (1-gamma)/d
    double d_max = 0.0;  // gamma * mean_delta
};

FidelityBounds fidelity_bounds(const Channel& ch, double mean_delta);

struct FDReport {
    double F = 0.0;
    double D = 0.0;
    enum class Method { analytic, monte_carlo } method = Method::analytic;
    long samples = 0;       // 0 for analytic
    double stderr_F = 0.0;  // 0 for analytic
    double stderr_D = 0.0;
};

// Flat text serialization: line 1 is d, then 2 d^2 lines of d^2-1 radians
// (alice rows by alpha, then bob rows by alpha). Values are written with
// shortest-round-trip formatting, so save -> load is bit-exact.
void save_protocol(const Protocol& proto, const std::string& path);
Protocol load_protocol(const std::string& path);

}  // namespace qtel
