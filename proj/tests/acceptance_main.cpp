// Acceptance gate: one criterion per --criterion value, one [PASS]/[FAIL]
// line each, exit 0 iff everything requested passed.
//
// Criterion 5 (the desk-scale deterioration point) is currently expected to
// FAIL: under the pinned noise model the measured means sit at F ~ 0.616 and
// D ~ 0.093, outside the stated bands. The run prints the measured values; the
// analysis lives in the README ("Known results").

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qteleport/bloch.hpp"
#include "qteleport/montecarlo.hpp"
#include "qteleport/stabilizer.hpp"

using namespace qtel;

namespace {

int worker_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

// 1. optimal protocol attains F_max exactly and is exactly universal at d=2
Outcome criterion_1() {
    Outcome out;
    double worst_f = 0.0, worst_d = 0.0;
    for (int d = 2; d <= 4; ++d) {
        const Protocol proto = optimal_protocol(d);
        for (double g : {0.0, 1.0 / 3.0, 1.0 / std::sqrt(2.0), 1.0}) {
            const Channel ch = make_channel(d, g);
            worst_f = std::max(worst_f,
                               std::abs(analytic_F(proto, ch) - (g + (1.0 - g) / d)));
            if (d == 2) worst_d = std::max(worst_d, qubit_D_analytic(proto, ch).D);
        }
    }
    out.pass = worst_f <= 1e-10 && worst_d <= 1e-12;
    out.detail << "max |F - F_max| = " << num(worst_f) << " (tol 1e-10), max qubit D = "
               << num(worst_d) << " (tol 1e-12)";
    return out;
}

// 2. Monte-Carlo oracle vs closed forms on random protocols
Outcome criterion_2() {
    Outcome out;
    const int threads = worker_threads();
    double worst_zf = 0.0, worst_zd = 0.0;
    Rng proto_rng(777);
    const Channel ch2 = make_channel(2, 0.85);
    for (int k = 0; k < 100; ++k) {
        const Protocol p = random_protocol(2, proto_rng);
        const FDReport mc = mc_estimate_FD(p, ch2, MCConfig{100000, 1000u + static_cast<std::uint64_t>(k), 4096}, threads);
        worst_zf = std::max(worst_zf, std::abs(mc.F - analytic_F(p, ch2)) / mc.stderr_F);
        const double d_exact = qubit_D_analytic(p, ch2).D;
        worst_zd = std::max(worst_zd, std::abs(mc.D - d_exact) / mc.stderr_D);
    }
    const Channel ch3 = make_channel(3, 0.85);
    for (int k = 0; k < 30; ++k) {
        const Protocol p = random_protocol(3, proto_rng);
        const FDReport mc = mc_estimate_FD(p, ch3, MCConfig{100000, 2000u + static_cast<std::uint64_t>(k), 4096}, threads);
        worst_zf = std::max(worst_zf, std::abs(mc.F - analytic_F(p, ch3)) / mc.stderr_F);
    }
    out.pass = worst_zf <= 4.0 && worst_zd <= 4.0;
    out.detail << "worst F deviation = " << num(worst_zf)
               << " sigma, worst D deviation = " << num(worst_zd) << " sigma (gate 4)";
    return out;
}

// 3. Schur-integral closed form vs MC
Outcome criterion_3() {
    Outcome out;
    double worst_z = 0.0;
    Rng rng(888);
    std::uint64_t seed = 3000;
    for (int d = 2; d <= 5; ++d) {
        for (int k = 0; k < 20; ++k) {
            const Mat u = haar_random_unitary(d, rng);
            const MeanStderr mc = mc_schur_xi(u, 100000, seed++);
            worst_z = std::max(worst_z, std::abs(mc.mean - schur_mean_xi(u, d)) / mc.stderr_);
        }
    }
    out.pass = worst_z <= 4.0;
    out.detail << "worst deviation = " << num(worst_z) << " sigma (gate 4)";
    return out;
}

// 4. qubit bound suite on 10^4 random protocols
Outcome criterion_4() {
    Outcome out;
    Rng rng(999);
    double worst_tight = -1.0, worst_r2 = -1.0, worst_cov_hi = -1.0, worst_cov_lo = -1.0,
           worst_var = -1.0;
    for (int k = 0; k < 10000; ++k) {
        const Protocol p = random_protocol(2, rng);
        const QubitDeviationReport base = qubit_D_analytic(p, make_channel(2, 1.0));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double dd = base.deltas[static_cast<std::size_t>(i)] *
                                  base.deltas[static_cast<std::size_t>(j)];
                worst_cov_hi = std::max(worst_cov_hi, base.covariance(i, j) - dd);
                worst_cov_lo = std::max(worst_cov_lo, -0.5 * dd - base.covariance(i, j));
            }
        for (double g : {1.0 / 3.0, 1.0 / std::sqrt(2.0), 1.0}) {
            const Channel ch = make_channel(2, g);
            const QubitDeviationReport rep = qubit_D_analytic(p, ch);
            worst_tight = std::max(worst_tight, -tight_bound_check(rep.F, rep.D, ch).margin);
            double mean_delta = 0.0;
            for (double dl : rep.deltas) mean_delta += dl / 4.0;
            worst_r2 = std::max(worst_r2, rep.D - g * mean_delta);
            worst_var = std::max(worst_var, rep.D * rep.D - rep.F * (1.0 - rep.F));
        }
    }
    out.pass = worst_tight <= 1e-9 && worst_r2 <= 1e-9 && worst_cov_hi <= 1e-12 &&
               worst_cov_lo <= 1e-12 && worst_var <= 1e-12;
    out.detail << "excesses: tight " << num(worst_tight) << ", Result-2 " << num(worst_r2)
               << ", cov upper " << num(worst_cov_hi) << ", cov lower " << num(worst_cov_lo)
               << ", D^2<=F(1-F) " << num(worst_var);
    return out;
}

// 5. Fig.-2 desk-scale point (currently red; see file header)
Outcome criterion_5() {
    Outcome out;
    const auto rows = deterioration_experiment(make_channel(2, 1.0), {1.0}, 1000,
                                               MCConfig{10000, 20202, 4096},
                                               worker_threads());
    const double mean_f = rows[0].mean_F, mean_d = rows[0].mean_D;
    const bool f_ok = mean_f >= 0.50 && mean_f <= 0.52;
    const bool d_ok = mean_d >= 0.038 && mean_d <= 0.048;
    out.pass = f_ok && d_ok;
    out.detail << "mean F = " << num(mean_f) << " (band [0.50, 0.52]), mean D = "
               << num(mean_d) << " (band [0.038, 0.048])";
    return out;
}

// 6. Fig.-3 desk-scale recovery for the three named channels
Outcome criterion_6() {
    Outcome out;
    const DEConfig cfg = make_de_config(100, 0.5, 0.1, 1000, 30303);
    const std::vector<Channel> channels{make_channel(2, 1.0 / 3.0),
                                        make_channel(2, 1.0 / std::sqrt(2.0)),
                                        make_channel(2, 1.0)};
    const auto traces = recover_experiment(channels, cfg, 50, worker_threads());
    const double f_floor[3] = {0.66, 0.84, 0.985};
    out.pass = true;
    for (int c = 0; c < 3; ++c) {
        double mean_f = 0.0, mean_d = 0.0;
        for (int r = 0; r < 50; ++r) {
            const GenRecord& last = traces[static_cast<std::size_t>(c * 50 + r)].records.back();
            mean_f += last.best_F / 50.0;
            mean_d += last.best_D / 50.0;
        }
        const bool ok = mean_f >= f_floor[c] && mean_d <= 0.005;
        out.pass = out.pass && ok;
        out.detail << (c ? "; " : "") << "gamma=" << num(channels[static_cast<std::size_t>(c)].gamma)
                   << ": mean final F = " << num(mean_f) << " (floor " << num(f_floor[c])
                   << "), mean final D = " << num(mean_d) << " (cap 0.005)";
    }
    return out;
}

// 7. Fig.-4 property: recovery between shocks, disruption at shocks
Outcome criterion_7() {
    Outcome out;
    const int period = 50, cycles = 22, repeats = 20, burn_in = 2;
    const DEConfig cfg = make_de_config(100, 0.5, 0.1, 0, 40404);
    const auto traces = realtime_stabilization(make_channel(2, 1.0), cfg, period,
                                               make_noise(1.0), cycles, repeats,
                                               worker_threads());
    long recovered = 0, cycles_counted = 0;
    double min_drop = 1.0;
    bool shocks_marked = true;
    for (const RecoverTrace& tr : traces) {
        for (int c = burn_in + 1; c <= cycles; ++c) {
            const std::size_t shock_at = static_cast<std::size_t>((c - 1) * period + 1);
            shocks_marked = shocks_marked && tr.records[shock_at].shock;
            min_drop = std::min(min_drop, tr.records[shock_at - 1].pop_mean_F -
                                              tr.records[shock_at].pop_mean_F);
            const std::size_t cycle_end = static_cast<std::size_t>(c * period);
            ++cycles_counted;
            if (tr.records[cycle_end].best_F >= 0.95) ++recovered;
        }
    }
    const double frac = static_cast<double>(recovered) / static_cast<double>(cycles_counted);
    out.pass = frac >= 0.80 && min_drop >= 0.2 && shocks_marked;
    out.detail << "recovered cycles: " << num(100.0 * frac) << "% (floor 80%), min shock drop = "
               << num(min_drop) << " (floor 0.2)";
    return out;
}

// 8. pre-build gate: derived covariance closed form vs brute-force integration
Outcome criterion_8() {
    Outcome out;
    Rng rng(50505);
    double worst_z = 0.0, worst_diag = 0.0;
    const long batches = 100, batch_size = 10000;
    for (int pair = 0; pair < 20; ++pair) {
        const Mat xa = haar_random_unitary(2, rng);
        const Mat xb = haar_random_unitary(2, rng);
        const BlochRotation ra = bloch_rotation(xa);
        const BlochRotation rb = bloch_rotation(xb);
        worst_diag = std::max(worst_diag, std::abs(qubit_covariance(ra, ra) -
                                                   delta_alpha(ra) * delta_alpha(ra)));

        Rng sampler = rng.substream(600u + static_cast<std::uint64_t>(pair));
        double sum_cov = 0.0, sum_cov2 = 0.0;
        for (long b = 0; b < batches; ++b) {
            double sa = 0.0, sb = 0.0, sab = 0.0;
            for (long i = 0; i < batch_size; ++i) {
                const Vec phi = haar_random_state(2, sampler);
                const double xia = std::norm((phi.adjoint() * (xa * phi))(0, 0));
                const double xib = std::norm((phi.adjoint() * (xb * phi))(0, 0));
                sa += xia;
                sb += xib;
                sab += xia * xib;
            }
            const double n = static_cast<double>(batch_size);
            const double cov_b = sab / n - (sa / n) * (sb / n);
            sum_cov += cov_b;
            sum_cov2 += cov_b * cov_b;
        }
        const double mean_cov = sum_cov / static_cast<double>(batches);
        const double var_cov =
            (sum_cov2 / static_cast<double>(batches) - mean_cov * mean_cov) /
            static_cast<double>(batches - 1);
        const double z = std::abs(mean_cov - qubit_covariance(ra, rb)) / std::sqrt(var_cov);
        worst_z = std::max(worst_z, z);
    }
    out.pass = worst_z <= 4.0 && worst_diag <= 1e-10;
    out.detail << "worst MC deviation = " << num(worst_z)
               << " sigma (gate 4), worst |C_aa - Delta^2| = " << num(worst_diag)
               << " (tol 1e-10)";
    return out;
}

const char* kNames[8] = {
    "optimal-protocol exactness",   "oracle agreement",
    "Schur-integral check",         "qubit bound suite",
    "Fig.-2 desk-scale point",      "Fig.-3 desk-scale recovery",
    "Fig.-4 shock/recovery",        "covariance derivation gate",
};

Outcome run_criterion(int k) {
    switch (k) {
        case 1: return criterion_1();
        case 2: return criterion_2();
        case 3: return criterion_3();
        case 4: return criterion_4();
        case 5: return criterion_5();
        case 6: return criterion_6();
        case 7: return criterion_7();
        default: return criterion_8();
    }
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
            if (only < 1 || only > 8) {
                std::fprintf(stderr, "invalid criterion %s (want 1..8)\n", argv[i]);
                return 2;
            }
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }

    bool all_pass = true;
    for (int k = 1; k <= 8; ++k) {
        if (only != 0 && k != only) continue;
        const Outcome out = run_criterion(k);
        all_pass = all_pass && out.pass;
        std::printf("[%s] criterion %d (%s): %s\n", out.pass ? "PASS" : "FAIL", k,
                    kNames[k - 1], out.detail.str().c_str());
    }
    return all_pass ? 0 : 1;
}
