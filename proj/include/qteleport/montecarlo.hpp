#pragma once

#include <cstdint>
#include <vector>

#include "qteleport/teleport.hpp"

namespace qtel {

struct MCConfig {
    long samples = 100000;
    std::uint64_t seed = 0;
    long batch = 4096;  // streaming/parallel accumulation granularity
};

// Haar-sampling oracle for (F, D): draws cfg.samples input states, evaluates
// f for each, and returns the sample mean, the plug-in deviation
// sqrt(max(0, m2 - m1^2)) and standard errors (delta method for D). Results
// are reproducible for a fixed seed independent of the thread count: each
// batch uses its own rng substream and batches are reduced in index order.
FDReport mc_estimate_FD(const Protocol& proto, const Channel& ch,
                        const MCConfig& cfg, int threads = 1);

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Monte-Carlo mean of xi = |<phi|X|phi>|^2 over Haar states; the oracle for
// the Schur-integral closed form.
MeanStderr mc_schur_xi(const Mat& X, long samples, std::uint64_t seed);

// Operational noise: p -> wrap(p + eta * eps), eps_j ~ U[-pi, pi] i.i.d. per
// component and per operator.
struct NoiseModel {
    double eta = 0.0;
};

NoiseModel make_noise(double eta);  // validates eta in [0, 1]

Protocol perturb_protocol(const Protocol& proto, const NoiseModel& noise, Rng& rng);

struct DeteriorationRow {
    double eta = 0.0;
    double mean_F = 0.0, std_F = 0.0;
    double mean_D = 0.0, std_D = 0.0;
    long trials = 0;
    std::uint64_t seed = 0;
};

// Fig.-2-style experiment: for each eta, `trials` independent perturbations of
// the optimal protocol; F analytically, D analytically at d=2 (Monte-Carlo
// with cfg otherwise). std_* are sample standard deviations (the figure's
// error bars).
std::vector<DeteriorationRow> deterioration_experiment(
    const Channel& ch, const std::vector<double>& eta_grid, long trials,
    const MCConfig& cfg, int threads = 1);

}  // namespace qtel
