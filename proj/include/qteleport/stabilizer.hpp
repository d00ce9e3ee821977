#pragma once

#include <cstdint>
#include <vector>

#include "qteleport/montecarlo.hpp"

namespace qtel {

struct DEConfig {
    int n_pop = 100;
    double weight = 0.5;     // differential weight W
    double crossover = 0.1;  // crossover rate C_r
    int iterations = 1000;
    std::uint64_t seed = 0;
};

DEConfig make_de_config(int n_pop, double weight, double crossover,
                        int iterations, std::uint64_t seed);  // validates

// One DE candidate: the full concatenation of 2 d^2 parameter vectors
// (alice by alpha, then bob by alpha) plus its cached fitness F.
struct Candidate {
    std::vector<ParamVector> genome;
    double fitness = 0.0;
};

struct Population {
    int d = 0;
    std::vector<Candidate> members;
    Candidate best;  // best-so-far; non-decreasing across generations
};

// Fitness = closed-form analytic F of the genome's protocol. Fast d=2 path;
// identical to analytic_F(make_protocol(...)) (tested to 1e-12).
double genome_fitness(const std::vector<ParamVector>& genome, const Channel& ch);

Population init_population(int d, const Channel& ch, const DEConfig& cfg, Rng& rng);

namespace detail {
// a, b, c uniform over {0..n_pop-1} \ {i}, pairwise distinct.
void pick_partners(int i, int n_pop, Rng& rng, int& a, int& b, int& c);
}  // namespace detail

// DE/rand/1: nu = p_a + W (p_b - p_c), components wrapped to [-pi, pi).
Candidate mutate(const Population& pop, int i, const DEConfig& cfg, Rng& rng);

// Binomial crossover: per component, keep the parent's value when
// R > C_r (R ~ U[0,1)), else take the mutant's.
Candidate crossover(const Candidate& parent, const Candidate& mutant,
                    const DEConfig& cfg, const Channel& ch, Rng& rng);

// Greedy selection; ties go to the trial.
const Candidate& select(const Candidate& parent, const Candidate& trial);

struct GenRecord {
    int iteration = 0;      // 0 = initial population
    double best_F = 0.0;    // best-so-far fitness
    double best_D = 0.0;    // analytic D of the best candidate (d=2; NaN else)
    double pop_mean_F = 0.0;
    bool shock = false;     // a perturbation was applied before this iteration
};

// Synchronous generations: all trials are built from and compared against the
// parent generation. Per-candidate randomness comes from a substream keyed by
// (generation, index), so traces are bit-reproducible for a fixed seed.
std::vector<GenRecord> evolve(Population& pop, const Channel& ch,
                              const DEConfig& cfg);

struct RecoverTrace {
    double gamma = 0.0;
    int run_id = 0;
    std::uint64_t seed = 0;  // substream seed of this run
    std::vector<GenRecord> records;
};

// Independent evolutions from random populations for each channel; one trace
// per (channel, repeat). Repeats run in parallel slots when threads > 1.
std::vector<RecoverTrace> recover_experiment(const std::vector<Channel>& channels,
                                             const DEConfig& cfg, int repeats,
                                             int threads = 1);

// Alternates evolution with operational shocks: before every generation that
// is a positive multiple of shock_period, every member and the best-so-far
// candidate are perturbed (eta from `noise`), and the optimizer re-solves.
// Shock randomness uses a stream separate from the evolution stream, so an
// eta = 0 shock leaves the trace identical to uninterrupted evolve.
std::vector<RecoverTrace> realtime_stabilization(const Channel& ch,
                                                 const DEConfig& cfg,
                                                 int shock_period,
                                                 const NoiseModel& noise,
                                                 int cycles, int repeats,
                                                 int threads = 1);

}  // namespace qtel
