#include "qteleport/stabilizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qteleport/bloch.hpp"
#include "parallel.hpp"

namespace qtel {

namespace {

// substream id layout per run: generations use gen * n_pop + i (well below
// 2^32); everything else lives above 2^32 so the streams never collide
constexpr std::uint64_t kInitStream = 0x1'0000'0000ULL;
constexpr std::uint64_t kShockStream = 0x2'0000'0000ULL;

// per-run seed derivation, shared by recover_experiment and
// realtime_stabilization so that an eta = 0 stabilization run reproduces the
// corresponding uninterrupted evolution exactly
std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run) {
    return splitmix64(seed ^ splitmix64(0xA001ULL + run));
}

double clipped_F(double f, double gamma, int d) {
    const double f_max = gamma + (1.0 - gamma) / d;
    const double f_min = 1.0 / d - gamma / (static_cast<double>(d) * (d + 1));
    if (f < f_min - 1e-9 || f > f_max + 1e-9)
        throw std::logic_error("genome_fitness: value escaped the Result-1 bounds");
    return std::min(std::max(f, f_min), f_max);
}

}  // namespace

DEConfig make_de_config(int n_pop, double weight, double crossover, int iterations,
                        std::uint64_t seed) {
    if (n_pop < 4)
        throw std::invalid_argument("make_de_config: mutation needs 3 partners plus the target");
    if (!(crossover >= 0.0 && crossover <= 1.0))
        throw std::invalid_argument("make_de_config: crossover rate must be in [0, 1]");
    if (iterations < 0) throw std::invalid_argument("make_de_config: iterations must be >= 0");
    if (!std::isfinite(weight)) throw std::invalid_argument("make_de_config: weight must be finite");
    return DEConfig{n_pop, weight, crossover, iterations, seed};
}

double genome_fitness(const std::vector<ParamVector>& genome, const Channel& ch) {
    const int d = ch.d;
    const std::size_t n = static_cast<std::size_t>(d) * d;
    if (genome.size() != 2 * n)
        throw std::invalid_argument("genome_fitness: genome must hold 2 d^2 parameter vectors");

    double trace_sq_sum = 0.0;
    if (d == 2) {
        for (std::size_t a = 0; a < 4; ++a) {
            const RVec& pu = genome[a].v;
            const RVec& pv = genome[4 + a].v;
            const double tu = std::sqrt(pu[0] * pu[0] + pu[1] * pu[1] + pu[2] * pu[2]);
            const double tv = std::sqrt(pv[0] * pv[0] + pv[1] * pv[1] + pv[2] * pv[2]);
            const double ku = tu < 1e-12 ? 1.0 - tu * tu / 6.0 : std::sin(tu) / tu;
            const double kv = tv < 1e-12 ? 1.0 - tv * tv / 6.0 : std::sin(tv) / tv;
            const double dot = pu[0] * pv[0] + pu[1] * pv[1] + pu[2] * pv[2];
            // tr(V U^dagger) / 2 for SU(2) in (cos, sinc * p) form
            const double half_tr = std::cos(tv) * std::cos(tu) + kv * ku * dot;
            trace_sq_sum += 4.0 * half_tr * half_tr;
        }
    } else {
        const GeneratorSet gens = su_generators(d);
        for (std::size_t a = 0; a < n; ++a) {
            const Mat u = unitary_from_params(genome[a], gens);
            const Mat v = unitary_from_params(genome[n + a], gens);
            trace_sq_sum += std::norm((v * u.adjoint()).trace());
        }
    }
    const double f_max = ch.gamma + (1.0 - ch.gamma) / d;
    const double f = f_max - ch.gamma / (d + 1.0) *
                                 (d - trace_sq_sum / (static_cast<double>(d) * d * d));
    return clipped_F(f, ch.gamma, d);
}

Population init_population(int d, const Channel& ch, const DEConfig& cfg, Rng& rng) {
    if (d != ch.d) throw std::invalid_argument("init_population: dimension mismatch");
    if (cfg.n_pop < 4) throw std::invalid_argument("init_population: n_pop must be >= 4");
    const std::size_t vecs = 2 * static_cast<std::size_t>(d) * d;
    const long len = static_cast<long>(d) * d - 1;

    Population pop;
    pop.d = d;
    pop.members.resize(static_cast<std::size_t>(cfg.n_pop));
    for (auto& cand : pop.members) {
        cand.genome.reserve(vecs);
        for (std::size_t k = 0; k < vecs; ++k) {
            RVec v(len);
            for (long j = 0; j < len; ++j) v[j] = rng.uniform(-M_PI, M_PI);
            cand.genome.emplace_back(d, v);
        }
        cand.fitness = genome_fitness(cand.genome, ch);
    }
    pop.best = pop.members[0];
    for (const auto& cand : pop.members)
        if (cand.fitness > pop.best.fitness) pop.best = cand;
    return pop;
}

namespace detail {

void pick_partners(int i, int n_pop, Rng& rng, int& a, int& b, int& c) {
    do {
        a = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_pop)));
    } while (a == i);
    do {
        b = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_pop)));
    } while (b == i || b == a);
    do {
        c = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_pop)));
    } while (c == i || c == a || c == b);
}

}  // namespace detail

Candidate mutate(const Population& pop, int i, const DEConfig& cfg, Rng& rng) {
    if (i < 0 || i >= static_cast<int>(pop.members.size()))
        throw std::invalid_argument("mutate: target index out of range");
    int a, b, c;
    detail::pick_partners(i, static_cast<int>(pop.members.size()), rng, a, b, c);
    const auto& ga = pop.members[static_cast<std::size_t>(a)].genome;
    const auto& gb = pop.members[static_cast<std::size_t>(b)].genome;
    const auto& gc = pop.members[static_cast<std::size_t>(c)].genome;

    Candidate nu;
    nu.genome.reserve(ga.size());
    for (std::size_t k = 0; k < ga.size(); ++k) {
        RVec v(ga[k].v.size());
        for (long j = 0; j < v.size(); ++j)
            v[j] = wrap_angle(ga[k].v[j] + cfg.weight * (gb[k].v[j] - gc[k].v[j]));
        nu.genome.emplace_back(pop.d, v);
    }
    nu.fitness = std::numeric_limits<double>::quiet_NaN();  // not evaluated yet
    return nu;
}

Candidate crossover(const Candidate& parent, const Candidate& mutant,
                    const DEConfig& cfg, const Channel& ch, Rng& rng) {
    if (parent.genome.size() != mutant.genome.size())
        throw std::invalid_argument("crossover: genome size mismatch");
    Candidate trial;
    trial.genome.reserve(parent.genome.size());
    for (std::size_t k = 0; k < parent.genome.size(); ++k) {
        RVec v(parent.genome[k].v.size());
        for (long j = 0; j < v.size(); ++j) {
            const double r = rng.uniform01();
            v[j] = r > cfg.crossover ? parent.genome[k].v[j] : mutant.genome[k].v[j];
        }
        trial.genome.emplace_back(parent.genome[k].d, v);
    }
    trial.fitness = genome_fitness(trial.genome, ch);
    return trial;
}

const Candidate& select(const Candidate& parent, const Candidate& trial) {
    return trial.fitness >= parent.fitness ? trial : parent;
}

namespace {

Protocol protocol_from_genome(int d, const std::vector<ParamVector>& genome) {
    const std::size_t n = static_cast<std::size_t>(d) * d;
    std::vector<ParamVector> alice(genome.begin(), genome.begin() + static_cast<long>(n));
    std::vector<ParamVector> bob(genome.begin() + static_cast<long>(n), genome.end());
    return make_protocol(d, std::move(alice), std::move(bob));
}

GenRecord snapshot(const Population& pop, const Channel& ch, int iteration, bool shock) {
    GenRecord rec;
    rec.iteration = iteration;
    rec.shock = shock;
    rec.best_F = pop.best.fitness;
    if (pop.d == 2)
        rec.best_D = qubit_D_analytic(protocol_from_genome(2, pop.best.genome), ch).D;
    else
        rec.best_D = std::numeric_limits<double>::quiet_NaN();
    detail::KahanSum mean;
    for (const auto& cand : pop.members) mean.add(cand.fitness);
    rec.pop_mean_F = mean.value() / static_cast<double>(pop.members.size());
    return rec;
}

// one synchronous generation; all randomness comes from substreams keyed by
// the absolute generation index, so interleaving shocks does not shift it
void de_generation(Population& pop, const Channel& ch, const DEConfig& cfg, long gen) {
    const Rng base(cfg.seed);
    const int n = static_cast<int>(pop.members.size());
    std::vector<Candidate> trials(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rng sub = base.substream(static_cast<std::uint64_t>(gen) * n + i);
        const Candidate nu = mutate(pop, i, cfg, sub);
        trials[static_cast<std::size_t>(i)] = crossover(pop.members[static_cast<std::size_t>(i)],
                                                        nu, cfg, ch, sub);
    }
    for (int i = 0; i < n; ++i) {
        auto& parent = pop.members[static_cast<std::size_t>(i)];
        auto& trial = trials[static_cast<std::size_t>(i)];
        if (&select(parent, trial) == &trial) parent = std::move(trial);
        if (parent.fitness > pop.best.fitness) pop.best = parent;
    }
}

void shock_population(Population& pop, const Channel& ch, const NoiseModel& noise, Rng& rng) {
    if (noise.eta == 0.0) return;
    auto jitter = [&](Candidate& cand) {
        for (auto& p : cand.genome)
            for (long j = 0; j < p.v.size(); ++j)
                p.v[j] = wrap_angle(p.v[j] + noise.eta * rng.uniform(-M_PI, M_PI));
        cand.fitness = genome_fitness(cand.genome, ch);
    };
    for (auto& cand : pop.members) jitter(cand);
    jitter(pop.best);
    // the perturbed best may now trail the population; re-resolve
    for (const auto& cand : pop.members)
        if (cand.fitness > pop.best.fitness) pop.best = cand;
}

}  // namespace

std::vector<GenRecord> evolve(Population& pop, const Channel& ch, const DEConfig& cfg) {
    if (pop.d != ch.d) throw std::invalid_argument("evolve: dimension mismatch");
    std::vector<GenRecord> trace;
    trace.reserve(static_cast<std::size_t>(cfg.iterations) + 1);
    trace.push_back(snapshot(pop, ch, 0, false));
    for (long gen = 1; gen <= cfg.iterations; ++gen) {
        de_generation(pop, ch, cfg, gen);
        trace.push_back(snapshot(pop, ch, static_cast<int>(gen), false));
    }
    return trace;
}

std::vector<RecoverTrace> recover_experiment(const std::vector<Channel>& channels,
                                             const DEConfig& cfg, int repeats,
                                             int threads) {
    if (channels.empty()) throw std::invalid_argument("recover_experiment: no channels");
    if (repeats < 1) throw std::invalid_argument("recover_experiment: repeats must be >= 1");
    const long total = static_cast<long>(channels.size()) * repeats;
    std::vector<RecoverTrace> traces(static_cast<std::size_t>(total));
    detail::parallel_for(total, threads, [&](long run) {
        const Channel& ch = channels[static_cast<std::size_t>(run) / repeats];
        const int run_id = static_cast<int>(run % repeats);
        DEConfig local = cfg;
        local.seed = run_seed(cfg.seed, static_cast<std::uint64_t>(run));
        Rng init_rng = Rng(local.seed).substream(kInitStream);
        Population pop = init_population(ch.d, ch, local, init_rng);
        RecoverTrace& out = traces[static_cast<std::size_t>(run)];
        out.gamma = ch.gamma;
        out.run_id = run_id;
        out.seed = local.seed;
        out.records = evolve(pop, ch, local);
    });
    return traces;
}

std::vector<RecoverTrace> realtime_stabilization(const Channel& ch, const DEConfig& cfg,
                                                 int shock_period, const NoiseModel& noise,
                                                 int cycles, int repeats, int threads) {
    if (shock_period < 1)
        throw std::invalid_argument("realtime_stabilization: shock period must be >= 1");
    if (cycles < 1 || repeats < 1)
        throw std::invalid_argument("realtime_stabilization: cycles and repeats must be >= 1");

    const long total_gens = static_cast<long>(cycles) * shock_period;
    std::vector<RecoverTrace> traces(static_cast<std::size_t>(repeats));
    detail::parallel_for(repeats, threads, [&](long run) {
        DEConfig local = cfg;
        local.seed = run_seed(cfg.seed, static_cast<std::uint64_t>(run));
        Rng init_rng = Rng(local.seed).substream(kInitStream);
        Population pop = init_population(ch.d, ch, local, init_rng);
        RecoverTrace& out = traces[static_cast<std::size_t>(run)];
        out.gamma = ch.gamma;
        out.run_id = static_cast<int>(run);
        out.seed = local.seed;
        out.records.reserve(static_cast<std::size_t>(total_gens) + 1);
        out.records.push_back(snapshot(pop, ch, 0, false));
        long shock_index = 0;
        for (long gen = 1; gen <= total_gens; ++gen) {
            bool shocked = false;
            if (gen > 1 && (gen - 1) % shock_period == 0) {
                Rng shock_rng = Rng(local.seed).substream(kShockStream + shock_index++);
                shock_population(pop, ch, noise, shock_rng);
                shocked = noise.eta > 0.0;
            }
            de_generation(pop, ch, local, gen);
            out.records.push_back(snapshot(pop, ch, static_cast<int>(gen), shocked));
        }
    });
    return traces;
}

}  // namespace qtel
