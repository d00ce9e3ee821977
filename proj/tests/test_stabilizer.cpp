#include <cmath>
#include <vector>

#include "doctest.h"
#include "qteleport/bloch.hpp"
#include "qteleport/stabilizer.hpp"

using namespace qtel;

namespace {

ParamVector pv3(double a, double b, double c) {
    RVec v(3);
    v << a, b, c;
    return ParamVector(2, v);
}

std::vector<ParamVector> constant_genome(const ParamVector& p) {
    return std::vector<ParamVector>(8, p);
}

}  // namespace

TEST_SUITE("stabilizer") {

TEST_CASE("make_de_config validation") {
    CHECK_NOTHROW(make_de_config(4, 0.5, 0.0, 10, 1));
    CHECK_NOTHROW(make_de_config(100, 0.5, 1.0, 0, 1));
    CHECK_THROWS_AS(make_de_config(3, 0.5, 0.1, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_de_config(10, 0.5, -0.1, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_de_config(10, 0.5, 1.1, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_de_config(10, 0.5, 0.1, -1, 1), std::invalid_argument);
}

TEST_CASE("genome_fitness equals analytic_F of the assembled protocol") {
    Rng rng(51);
    const Channel ch = make_channel(2, 0.77);
    for (int k = 0; k < 100; ++k) {
        std::vector<ParamVector> genome;
        for (int j = 0; j < 8; ++j)
            genome.push_back(pv3(rng.uniform(-M_PI, M_PI), rng.uniform(-M_PI, M_PI),
                                 rng.uniform(-M_PI, M_PI)));
        std::vector<ParamVector> alice(genome.begin(), genome.begin() + 4);
        std::vector<ParamVector> bob(genome.begin() + 4, genome.end());
        CHECK(genome_fitness(genome, ch) ==
              doctest::Approx(analytic_F(make_protocol(2, alice, bob), ch)).epsilon(1e-12));
    }
}

TEST_CASE("init_population: determinism, size, fitness range") {
    const Channel ch = make_channel(2, 1.0);
    const DEConfig cfg = make_de_config(100, 0.5, 0.1, 10, 3);
    Rng a(8), b(8);
    const Population p1 = init_population(2, ch, cfg, a);
    const Population p2 = init_population(2, ch, cfg, b);
    REQUIRE(p1.members.size() == 100);
    long vectors = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        REQUIRE(p1.members[i].genome.size() == 8);  // 2 d^2 = 800 vectors total
        vectors += 8;
        CHECK(p1.members[i].fitness == p2.members[i].fitness);
        CHECK(p1.members[i].fitness >= 1.0 / 3.0 - 1e-12);
        CHECK(p1.members[i].fitness <= 1.0 + 1e-12);
    }
    CHECK(vectors == 800);
    double best = 0.0;
    for (const Candidate& c : p1.members) best = std::max(best, c.fitness);
    CHECK(p1.best.fitness == best);
}

TEST_CASE("pick_partners excludes the target and repeats") {
    Rng rng(52);
    for (int k = 0; k < 2000; ++k) {
        int a = -1, b = -1, c = -1;
        detail::pick_partners(3, 7, rng, a, b, c);
        CHECK(a != 3);
        CHECK(b != 3);
        CHECK(c != 3);
        CHECK(a != b);
        CHECK(a != c);
        CHECK(b != c);
        CHECK(a >= 0);
        CHECK(a < 7);
    }
}

TEST_CASE("mutate applies nu = p_a + W (p_b - p_c)") {
    const Channel ch = make_channel(2, 1.0);

    // learn which partner indices the next draws will produce, then place the
    // worked example's vectors there: nu must come out as (0.7, -0.1, 0.6)
    Rng rng(53);
    Rng probe = rng;
    int a = -1, b = -1, c = -1;
    detail::pick_partners(3, 4, probe, a, b, c);

    Population pop;
    pop.d = 2;
    pop.members.resize(4);
    for (Candidate& m : pop.members) m.genome = constant_genome(pv3(0, 0, 0));
    pop.members[a].genome = constant_genome(pv3(0.2, 0.4, 0.6));
    pop.members[b].genome = constant_genome(pv3(1.0, 0.0, 0.0));
    pop.members[c].genome = constant_genome(pv3(0.0, 1.0, 0.0));
    for (Candidate& m : pop.members) m.fitness = genome_fitness(m.genome, ch);
    pop.best = pop.members[0];

    const DEConfig cfg = make_de_config(4, 0.5, 0.1, 10, 1);
    const Candidate nu = mutate(pop, 3, cfg, rng);
    for (const ParamVector& p : nu.genome) {
        CHECK(p.v[0] == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(p.v[1] == doctest::Approx(-0.1).epsilon(1e-12));
        CHECK(p.v[2] == doctest::Approx(0.6).epsilon(1e-12));
    }

    // W = 0 reduces to p_a; identical partners reduce to p_a for any W
    Rng rng2(54);
    Rng probe2 = rng2;
    detail::pick_partners(0, 4, probe2, a, b, c);
    Population pop2 = pop;
    pop2.members[1].genome = constant_genome(pv3(0.5, -0.5, 1.5));
    pop2.members[2].genome = constant_genome(pv3(0.5, -0.5, 1.5));
    pop2.members[3].genome = constant_genome(pv3(0.5, -0.5, 1.5));
    const DEConfig cfg_w7 = make_de_config(4, 0.7, 0.1, 10, 1);
    const Candidate nu2 = mutate(pop2, 0, cfg_w7, rng2);
    for (const ParamVector& p : nu2.genome) {
        CHECK(p.v[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(p.v[1] == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(p.v[2] == doctest::Approx(1.5).epsilon(1e-12));
    }
}

TEST_CASE("mutant components are wrapped into [-pi, pi)") {
    const Channel ch = make_channel(2, 1.0);
    Rng rng(55);
    const DEConfig cfg = make_de_config(12, 0.9, 0.1, 10, 1);
    Rng init(56);
    Population pop = init_population(2, ch, cfg, init);
    for (int k = 0; k < 200; ++k) {
        const Candidate nu = mutate(pop, k % 12, cfg, rng);
        for (const ParamVector& p : nu.genome)
            for (int j = 0; j < 3; ++j) {
                CHECK(p.v[j] >= -M_PI);
                CHECK(p.v[j] < M_PI);
            }
    }
}

TEST_CASE("crossover extremes and mixing rate") {
    const Channel ch = make_channel(2, 1.0);
    Candidate parent, mutant;
    parent.genome = constant_genome(pv3(0, 0, 0));
    mutant.genome = constant_genome(pv3(1, 1, 1));
    parent.fitness = genome_fitness(parent.genome, ch);
    mutant.fitness = genome_fitness(mutant.genome, ch);

    Rng rng(57);
    const DEConfig keep = make_de_config(4, 0.5, 0.0, 10, 1);
    const Candidate all_parent = crossover(parent, mutant, keep, ch, rng);
    for (const ParamVector& p : all_parent.genome)
        CHECK(p.v.cwiseAbs().maxCoeff() == 0.0);

    const DEConfig take = make_de_config(4, 0.5, 1.0, 10, 1);
    const Candidate all_mutant = crossover(parent, mutant, take, ch, rng);
    for (const ParamVector& p : all_mutant.genome)
        CHECK((p.v - RVec::Ones(3)).cwiseAbs().maxCoeff() == 0.0);

    const DEConfig mix = make_de_config(4, 0.5, 0.1, 10, 1);
    long mutant_components = 0, total = 0;
    while (total < 100000) {
        const Candidate trial = crossover(parent, mutant, mix, ch, rng);
        for (const ParamVector& p : trial.genome)
            for (int j = 0; j < 3; ++j) {
                mutant_components += p.v[j] == 1.0 ? 1 : 0;
                ++total;
            }
    }
    const double frac = static_cast<double>(mutant_components) / static_cast<double>(total);
    CHECK(std::abs(frac - 0.1) <= 0.005);
}

TEST_CASE("crossover caches the trial fitness") {
    const Channel ch = make_channel(2, 0.8);
    Rng rng(58);
    const DEConfig cfg = make_de_config(10, 0.5, 0.5, 10, 1);
    Rng init(59);
    Population pop = init_population(2, ch, cfg, init);
    for (int k = 0; k < 50; ++k) {
        const Candidate nu = mutate(pop, k % 10, cfg, rng);
        const Candidate trial = crossover(pop.members[k % 10], nu, cfg, ch, rng);
        CHECK(trial.fitness == doctest::Approx(genome_fitness(trial.genome, ch)).epsilon(1e-14));
    }
}

TEST_CASE("select is greedy with ties to the trial") {
    Candidate lo, hi;
    lo.genome = constant_genome(pv3(0, 0, 0));
    hi.genome = constant_genome(pv3(1, 0, 0));
    lo.fitness = 0.4;
    hi.fitness = 0.6;
    CHECK(&select(lo, hi) == &hi);   // better trial taken
    CHECK(&select(hi, lo) == &hi);   // worse trial rejected
    Candidate tie = lo;
    tie.fitness = 0.4;
    CHECK(&select(lo, tie) == &tie);  // tie goes to the trial
}

TEST_CASE("evolve: zero iterations, monotone best, reproducible") {
    const Channel ch = make_channel(2, 1.0);
    const DEConfig cfg0 = make_de_config(20, 0.5, 0.1, 0, 11);
    Rng init(60);
    Population pop = init_population(2, ch, cfg0, init);
    const double f0 = pop.best.fitness;
    const auto trace0 = evolve(pop, ch, cfg0);
    REQUIRE(trace0.size() == 1);
    CHECK(trace0[0].iteration == 0);
    CHECK(trace0[0].best_F == f0);

    const DEConfig cfg = make_de_config(40, 0.5, 0.1, 120, 12);
    Rng ia(61), ib(61);
    Population pa = init_population(2, ch, cfg, ia);
    Population pb = init_population(2, ch, cfg, ib);
    const auto ta = evolve(pa, ch, cfg);
    const auto tb = evolve(pb, ch, cfg);
    REQUIRE(ta.size() == 121);
    for (std::size_t i = 0; i < ta.size(); ++i) {
        CHECK(ta[i].best_F == tb[i].best_F);
        CHECK(ta[i].best_D == tb[i].best_D);
        if (i > 0) CHECK(ta[i].best_F >= ta[i - 1].best_F);
    }
    CHECK(pa.best.fitness == ta.back().best_F);
    for (const Candidate& m : pa.members) CHECK(m.fitness <= pa.best.fitness);
    CHECK(ta.back().best_F > ta.front().best_F);  // it actually optimizes
}

TEST_CASE("recover_experiment: gamma=0 pins F at 1/2") {
    const DEConfig cfg = make_de_config(10, 0.5, 0.1, 30, 13);
    const auto traces = recover_experiment({make_channel(2, 0.0)}, cfg, 2);
    REQUIRE(traces.size() == 2);
    for (const RecoverTrace& tr : traces) {
        CHECK(tr.gamma == 0.0);
        REQUIRE(tr.records.size() == 31);
        for (const GenRecord& rec : tr.records) {
            CHECK(rec.best_F == doctest::Approx(0.5).epsilon(1e-12));
            CHECK(rec.best_D == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("recover_experiment: shape, ids, thread invariance") {
    const std::vector<Channel> chs{make_channel(2, 1.0 / 3.0), make_channel(2, 1.0)};
    const DEConfig cfg = make_de_config(20, 0.5, 0.1, 40, 14);
    const auto a = recover_experiment(chs, cfg, 3, 1);
    const auto b = recover_experiment(chs, cfg, 3, 4);
    REQUIRE(a.size() == 6);
    REQUIRE(b.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(a[i].gamma == b[i].gamma);
        CHECK(a[i].run_id == b[i].run_id);
        CHECK(a[i].seed == b[i].seed);
        REQUIRE(a[i].records.size() == 41);
        for (std::size_t j = 0; j < 41; ++j) {
            CHECK(a[i].records[j].best_F == b[i].records[j].best_F);
            CHECK(a[i].records[j].pop_mean_F == b[i].records[j].pop_mean_F);
        }
    }
    CHECK(a[0].gamma == doctest::Approx(1.0 / 3.0));
    CHECK(a[3].gamma == doctest::Approx(1.0));
}

TEST_CASE("realtime_stabilization with eta=0 equals uninterrupted evolve") {
    const Channel ch = make_channel(2, 1.0);
    const DEConfig cfg = make_de_config(15, 0.5, 0.1, 50, 15);
    const auto calm = realtime_stabilization(ch, cfg, 10, make_noise(0.0), 5, 2);
    const auto plain = recover_experiment({ch}, cfg, 2);
    REQUIRE(calm.size() == 2);
    for (std::size_t r = 0; r < 2; ++r) {
        REQUIRE(calm[r].records.size() == plain[r].records.size());
        for (std::size_t j = 0; j < calm[r].records.size(); ++j) {
            CHECK(calm[r].records[j].best_F == plain[r].records[j].best_F);
            CHECK(calm[r].records[j].pop_mean_F == plain[r].records[j].pop_mean_F);
            CHECK_FALSE(calm[r].records[j].shock);
        }
    }
}

TEST_CASE("realtime_stabilization: shocks are marked and disruptive") {
    const Channel ch = make_channel(2, 1.0);
    const DEConfig cfg = make_de_config(30, 0.5, 0.1, 0, 16);
    const auto traces = realtime_stabilization(ch, cfg, 10, make_noise(1.0), 4, 2);
    for (const RecoverTrace& tr : traces) {
        REQUIRE(tr.records.size() == 41);
        int shocks = 0;
        for (std::size_t j = 1; j < tr.records.size(); ++j) {
            if (tr.records[j].shock) {
                ++shocks;
                CHECK((j - 1) % 10 == 0);  // shocks fire on the period
                CHECK(tr.records[j].pop_mean_F < tr.records[j - 1].pop_mean_F);
            }
        }
        CHECK(shocks == 3);  // cycles - 1 interior shocks for 4 cycles
    }
}

}  // TEST_SUITE
