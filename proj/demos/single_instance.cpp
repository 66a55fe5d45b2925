// Generates one unique-solution EC3 instance, measures its required runtime
// and prints the success probability over a range of evolution times.
//
//   single_instance [n_bits] [seed]

#include <cstdio>
#include <cstdlib>

#include "quads/quads.hpp"

int main(int argc, char** argv) {
    using namespace quads;
    const int n = argc > 1 ? std::atoi(argv[1]) : 7;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;

    Rng rng(seed);
    const auto inst = ec3::generate_usa_instance(n, rng);
    const auto problem = dynamics::ProblemData::from_instance(inst);
    const auto solution = ec3::solution_indices(inst).front();
    std::printf("N=%d, %zu clauses, solution index %llu\n", n, inst.size(),
                static_cast<unsigned long long>(solution));

    const auto search = protocol::required_runtime(problem, nullptr, 0.125, protocol::ProbePolicy{});
    std::printf("T* = %.4f (p = %.4f, %zu probes)\n\n", search.t_star, search.success, search.probes);

    std::printf("%10s %10s\n", "T", "p(T)");
    for (double T = 1.0; T <= 640.0; T *= 2.0) {
        dynamics::EvolutionConfig cfg;
        cfg.total_time = T;
        const auto res = dynamics::evolve(problem, nullptr, cfg);
        std::printf("%10.1f %10.4f\n", T, dynamics::success_probability(res.psi, problem.diag));
    }
}
