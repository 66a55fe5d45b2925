#include <gtest/gtest.h>

#include "dense_oracle.hpp"
#include "quads/dynamics.hpp"
#include "quads/protocol.hpp"

using namespace quads;
using namespace quads::dynamics;

namespace {

ec3::Ec3Instance usa(int n, std::uint64_t seed) {
    if (n == 3) {
        return ec3::Ec3Instance(3, {ec3::Clause{1, 2, 3}});
    }
    Rng rng(seed);
    return ec3::generate_usa_instance(n, rng);
}

EvolutionConfig config_for(double T) {
    EvolutionConfig c;
    c.total_time = T;
    return c;
}

noise::NoiseParams noisy_params(double p_bar, noise::Polarization pol) {
    noise::NoiseParams p;
    p.p_bar = p_bar;
    p.polarization = pol;
    return p;
}

}  // namespace

TEST(Evolve, NoClausesLeavesInitialState) {
    const auto problem = ProblemData::from_instance(ec3::Ec3Instance(4, {}));
    const auto res = evolve(problem, nullptr, config_for(5.0));
    const auto psi0 = hamiltonian::ground_state_initial(4);
    const Complex overlap = inner(psi0, res.psi);
    EXPECT_NEAR(std::abs(overlap), 1.0, 1e-12);
    EXPECT_NEAR(success_probability(res.psi, problem.diag), 1.0, 1e-12);
}

TEST(Evolve, NormPreserved) {
    const auto problem = ProblemData::from_instance(usa(6, 1));
    for (double T : {0.5, 5.0, 40.0}) {
        const auto res = evolve(problem, nullptr, config_for(T));
        EXPECT_NEAR(res.psi.norm(), 1.0, 1e-8);
        EXPECT_LT(res.max_drift, 1e-4);
    }
}

TEST(Evolve, NoisyNormPreserved) {
    const auto problem = ProblemData::from_instance(usa(6, 2));
    Rng rng(3);
    const auto env = noise::sample_environment(noisy_params(0.013, noise::Polarization::xyz), 30.0, 6, rng);
    ASSERT_FALSE(env.empty());
    const auto res = evolve(problem, &env, config_for(30.0));
    EXPECT_NEAR(res.psi.norm(), 1.0, 1e-8);
}

TEST(Evolve, StepHalvingConverges) {
    const auto problem = ProblemData::from_instance(usa(7, 4));
    auto coarse = config_for(20.0);
    auto fine = coarse;
    fine.divisions = 2 * coarse.divisions;
    fine.spectral_step_limit = coarse.spectral_step_limit / 2.0;
    const auto a = evolve(problem, nullptr, coarse);
    const auto b = evolve(problem, nullptr, fine);
    EXPECT_GT(b.steps, a.steps);
    EXPECT_LT(max_abs_diff(a.psi, b.psi), 1e-6);
}

TEST(Evolve, MatchesDenseRk4Noiseless) {
    for (int n = 3; n <= 4; ++n) {
        const auto inst = usa(n, 10 + static_cast<std::uint64_t>(n));
        const auto problem = ProblemData::from_instance(inst);
        for (double T : {1.0, 7.5}) {
            const auto cfg = config_for(T);
            const auto sched = build_schedule(problem, nullptr, cfg);
            const auto got = evolve(problem, nullptr, cfg).psi;
            const auto want = oracle::from_eigen(
                oracle::rk4_reference(oracle::initial_hamiltonian(inst), oracle::problem_hamiltonian(inst), sched, T),
                n);
            EXPECT_LT(max_abs_diff(got, want), 1e-8) << "n=" << n << " T=" << T;
        }
    }
}

TEST(Evolve, MatchesDenseRk4WithNoise) {
    for (auto pol : {noise::Polarization::x, noise::Polarization::y, noise::Polarization::z,
                     noise::Polarization::xyz}) {
        for (int n = 3; n <= 4; ++n) {
            const auto inst = usa(n, 20 + static_cast<std::uint64_t>(n));
            const auto problem = ProblemData::from_instance(inst);
            const double T = 12.0;
            Rng rng(30 + static_cast<std::uint64_t>(n));
            const auto env = noise::sample_environment(noisy_params(0.05, pol), T, n, rng);
            ASSERT_FALSE(env.empty());
            const auto cfg = config_for(T);
            const auto sched = build_schedule(problem, &env, cfg);
            const auto got = evolve(problem, &env, cfg).psi;
            const auto want = oracle::from_eigen(
                oracle::rk4_reference(oracle::initial_hamiltonian(inst), oracle::problem_hamiltonian(inst), sched, T),
                n);
            EXPECT_LT(max_abs_diff(got, want), 1e-8);
        }
    }
}

TEST(Evolve, AgreesWithExponentialPropagator) {
    const auto inst = usa(4, 40);
    const auto problem = ProblemData::from_instance(inst);
    const double T = 6.0;
    Rng rng(41);
    const auto env = noise::sample_environment(noisy_params(0.05, noise::Polarization::xyz), T, 4, rng);
    const auto cfg = config_for(T);
    const auto sched = build_schedule(problem, &env, cfg);
    const auto got = evolve(problem, &env, cfg).psi;
    const auto want = oracle::from_eigen(
        oracle::exponential_reference(oracle::initial_hamiltonian(inst), oracle::problem_hamiltonian(inst), sched, T, 4),
        4);
    // Midpoint exponential is second order; the difference is its error.
    EXPECT_LT(max_abs_diff(got, want), 1e-5);
}

TEST(Evolve, InitialEnergyIsZero) {
    const auto inst = usa(6, 50);
    const auto problem = ProblemData::from_instance(inst);
    const auto psi0 = hamiltonian::ground_state_initial(6);
    const auto h = hamiltonian::apply_interpolated(0.0, problem.degrees, problem.diag, psi0);
    EXPECT_NEAR(std::abs(inner(psi0, h)), 0.0, 1e-12);
}

TEST(Evolve, SuccessGrowsWithRuntime) {
    const auto problem = ProblemData::from_instance(usa(6, 60));
    const std::vector<double> grid{0.5, 2.0, 8.0, 32.0, 128.0};
    std::vector<double> p;
    for (double T : grid) {
        p.push_back(success_probability(evolve(problem, nullptr, config_for(T)).psi, problem.diag));
    }
    EXPECT_GE(*std::max_element(p.begin(), p.end()), p.front());
    EXPECT_GT(p.back(), p.front());
}

TEST(Evolve, AdiabaticLimitAtLongRuntime) {
    const auto problem = ProblemData::from_instance(usa(5, 70));
    const auto res = evolve(problem, nullptr, config_for(1000.0));
    EXPECT_GE(success_probability(res.psi, problem.diag), 0.95);
}

TEST(Evolve, EnvironmentValidation) {
    const auto problem = ProblemData::from_instance(usa(4, 80));
    const auto wrong_size = noise::NoiseEnvironment::quiet(3, 10.0);
    EXPECT_THROW(evolve(problem, &wrong_size, config_for(5.0)), InputError);
    const auto too_short = noise::NoiseEnvironment::quiet(4, 2.0);
    EXPECT_THROW(evolve(problem, &too_short, config_for(5.0)), InputError);
    EXPECT_THROW(evolve(problem, nullptr, config_for(0.0)), InputError);
}

TEST(SuccessProbability, Examples) {
    const auto problem = ProblemData::from_instance(ec3::Ec3Instance(3, {ec3::Clause{1, 2, 3}}));
    // Solutions are indices 1, 2, 4.
    StateVector psi(3);
    psi[1] = 1.0;
    EXPECT_DOUBLE_EQ(success_probability(psi, problem.diag), 1.0);
    StateVector mixed(3);
    mixed[0] = std::sqrt(0.5);
    mixed[4] = Complex{0.0, std::sqrt(0.5)};
    EXPECT_NEAR(success_probability(mixed, problem.diag), 0.5, 1e-15);
    EXPECT_NEAR(expected_cost(mixed, problem.diag), 0.5, 1e-15);
    EXPECT_NEAR(success_probability(hamiltonian::ground_state_initial(3), problem.diag), 3.0 / 8.0, 1e-15);
    EXPECT_THROW(success_probability(StateVector(4), problem.diag), InputError);
}

TEST(SuccessProbability, NoZeroCostState) {
    // Every triple of four bits; no assignment has exactly one set bit in all four.
    const ec3::Ec3Instance inst(4, {ec3::Clause{1, 2, 3}, ec3::Clause{1, 2, 4}, ec3::Clause{1, 3, 4},
                                    ec3::Clause{2, 3, 4}});
    ASSERT_TRUE(ec3::solution_indices(inst).empty());
    const auto problem = ProblemData::from_instance(inst);
    EXPECT_THROW(success_probability(hamiltonian::ground_state_initial(4), problem.diag), InputError);
}

TEST(BuildSchedule, SegmentsAlignWithPulseEdges) {
    const auto problem = ProblemData::from_instance(usa(4, 90));
    Rng rng(91);
    const double T = 25.0;
    const auto env = noise::sample_environment(noisy_params(0.02, noise::Polarization::y), T, 4, rng);
    const auto sched = build_schedule(problem, &env, config_for(T));
    std::vector<double> bounds;
    for (const auto& seg : sched.segments) {
        bounds.push_back(seg.begin);
        EXPECT_LE(seg.step(), sched.base_step * (1.0 + 1e-9));
        EXPECT_EQ(seg.fields, noise::fields_at(env, 0.5 * (seg.begin + seg.end)));
    }
    EXPECT_EQ(sched.segments.front().begin, 0.0);
    EXPECT_EQ(sched.segments.back().end, T);
    for (double e : noise::pulse_edges(env)) {
        if (e < T) {
            EXPECT_NE(std::find(bounds.begin(), bounds.end(), e), bounds.end()) << e;
        }
    }
    EXPECT_LE(sched.base_step, 0.1 * env.params().tau);
}

TEST(BuildSchedule, BaseStepRules) {
    const auto problem = ProblemData::from_instance(usa(5, 95));
    const auto s1 = build_schedule(problem, nullptr, config_for(10.0));
    EXPECT_DOUBLE_EQ(s1.base_step, 10.0 / 2000.0);
    const auto s2 = build_schedule(problem, nullptr, config_for(4000.0));
    const double bound = spectral_bound(problem, 0.0);
    EXPECT_DOUBLE_EQ(s2.base_step, 0.25 / bound);
}
