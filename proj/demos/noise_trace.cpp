// Samples one noise environment and writes the per-qubit field as CSV
// (t, qubit, x, y, z) on a uniform time grid, followed by its measured power.
//
//   noise_trace [p_bar] [T] [n_qubits] [seed] > trace.csv

#include <cstdio>
#include <cstdlib>

#include "quads/quads.hpp"

int main(int argc, char** argv) {
    using namespace quads;
    noise::NoiseParams params;
    params.p_bar = argc > 1 ? std::atof(argv[1]) : 0.013;
    const double T = argc > 2 ? std::atof(argv[2]) : 40.0;
    const int n = argc > 3 ? std::atoi(argv[3]) : 3;
    Rng rng(argc > 4 ? std::strtoull(argv[4], nullptr, 10) : 1);

    const auto env = noise::sample_environment(params, T, n, rng);
    std::printf("t,qubit,x,y,z\n");
    for (double t = 0.0; t < T; t += 0.05) {
        for (int j = 1; j <= n; ++j) {
            const auto f = noise::field_at(env, j, t);
            std::printf("%.2f,%d,%.6f,%.6f,%.6f\n", t, j, f[0], f[1], f[2]);
        }
    }
    std::fprintf(stderr, "%zu pulses, measured power %.6f (nominal %.6f)\n", env.pulse_count(),
                 noise::measured_average_power(env), params.p_bar);
}
