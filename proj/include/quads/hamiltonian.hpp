#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "quads/ec3.hpp"
#include "quads/state.hpp"

/**
 * @file
 * Matrix-free action of the interpolated search Hamiltonian
 *
 *     H(s) = (1 - s) H_i + s H_P,   s = t / T,
 *
 * with H_i = sum_j (d_j / 2)(1 - sigma_x^j), d_j the number of clauses that
 * touch bit j, and H_P diagonal in the computational basis holding the
 * clause-violation count of each basis state.
 */

namespace quads::hamiltonian {

/// Violation count per basis state; integer spectrum.
struct ProblemDiagonal {
    int n_bits = 0;
    std::vector<std::uint32_t> costs;

    std::size_t dim() const { return costs.size(); }
    std::uint32_t max_cost() const {
        std::uint32_t m = 0;
        for (auto c : costs) {
            m = std::max(m, c);
        }
        return m;
    }
};

/// Clause degree of each bit, 0-based storage (entry j-1 for bit j).
struct DegreeVector {
    std::vector<int> degrees;

    int n_bits() const { return static_cast<int>(degrees.size()); }
    int total() const { return std::accumulate(degrees.begin(), degrees.end(), 0); }
};

struct InterpolationSchedule {
    double total_time = 1.0;

    double s(double t) const {
        if (t <= 0.0) {
            return 0.0;
        }
        if (t >= total_time) {
            return 1.0;
        }
        return t / total_time;
    }
};

inline ProblemDiagonal build_problem_diagonal(const ec3::Ec3Instance& instance,
                                              int cap = ec3::kDefaultEnumerationCap) {
    if (instance.n_bits() > cap) {
        throw ResourceError("problem diagonal for " + std::to_string(instance.n_bits()) + " bits exceeds cap " +
                            std::to_string(cap));
    }
    ProblemDiagonal diag;
    diag.n_bits = instance.n_bits();
    const std::uint64_t dim = std::uint64_t{1} << instance.n_bits();
    diag.costs.resize(dim);
    for (std::uint64_t k = 0; k < dim; ++k) {
        diag.costs[k] = ec3::violation_count(instance, k);
    }
    return diag;
}

inline DegreeVector degree_vector(const ec3::Ec3Instance& instance) {
    DegreeVector d;
    d.degrees.assign(static_cast<std::size_t>(instance.n_bits()), 0);
    for (const auto& cl : instance.clauses()) {
        ++d.degrees[static_cast<std::size_t>(cl.a - 1)];
        ++d.degrees[static_cast<std::size_t>(cl.b - 1)];
        ++d.degrees[static_cast<std::size_t>(cl.c - 1)];
    }
    return d;
}

inline StateVector ground_state_initial(int n_bits) {
    StateVector psi(n_bits);
    const double amp = std::pow(2.0, -0.5 * n_bits);
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        psi[k] = Complex{amp, 0.0};
    }
    return psi;
}

namespace detail {

inline void check_dims(const DegreeVector& degrees, const StateVector& psi) {
    if (degrees.n_bits() != psi.n_qubits()) {
        throw InputError("degree vector has " + std::to_string(degrees.n_bits()) + " bits but state has " +
                         std::to_string(psi.n_qubits()) + " qubits");
    }
}

inline void check_dims(const ProblemDiagonal& diag, const StateVector& psi) {
    if (diag.dim() != psi.dim()) {
        throw InputError("problem diagonal dimension does not match state dimension");
    }
}

}  // namespace detail

inline StateVector apply_initial(const DegreeVector& degrees, const StateVector& psi) {
    detail::check_dims(degrees, psi);
    StateVector out(psi.n_qubits());
    const double diag = 0.5 * degrees.total();
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        out[k] = diag * psi[k];
    }
    for (int j = 0; j < psi.n_qubits(); ++j) {
        const double c = 0.5 * degrees.degrees[static_cast<std::size_t>(j)];
        const std::size_t m = std::size_t{1} << j;
        for (std::size_t k = 0; k < psi.dim(); ++k) {
            out[k] -= c * psi[k ^ m];
        }
    }
    return out;
}

inline StateVector apply_problem(const ProblemDiagonal& diag, const StateVector& psi) {
    detail::check_dims(diag, psi);
    StateVector out(psi.n_qubits());
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        out[k] = static_cast<double>(diag.costs[k]) * psi[k];
    }
    return out;
}

inline StateVector apply_interpolated(double s, const DegreeVector& degrees, const ProblemDiagonal& diag,
                                      const StateVector& psi) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw InputError("interpolation parameter s must lie in [0, 1]");
    }
    detail::check_dims(degrees, psi);
    detail::check_dims(diag, psi);
    auto hi = apply_initial(degrees, psi);
    auto hp = apply_problem(diag, psi);
    StateVector out(psi.n_qubits());
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        out[k] = (1.0 - s) * hi[k] + s * hp[k];
    }
    return out;
}

}  // namespace quads::hamiltonian
