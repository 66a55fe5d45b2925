#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "quads/core.hpp"

namespace quads {

/// Amplitudes of an n-qubit register, indexed by basis state (qubit 1 = LSB).
class StateVector {
  public:
    StateVector() = default;
    explicit StateVector(int n_qubits) : n_qubits_(check_qubits(n_qubits)), amps_(std::size_t{1} << n_qubits) {}
    StateVector(int n_qubits, std::vector<Complex> amps) : n_qubits_(check_qubits(n_qubits)), amps_(std::move(amps)) {
        if (amps_.size() != (std::size_t{1} << n_qubits_)) {
            throw InputError("amplitude count " + std::to_string(amps_.size()) + " is not 2^" +
                             std::to_string(n_qubits_));
        }
    }

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }

    Complex& operator[](std::size_t k) { return amps_[k]; }
    const Complex& operator[](std::size_t k) const { return amps_[k]; }

    std::span<Complex> amplitudes() { return amps_; }
    std::span<const Complex> amplitudes() const { return amps_; }

    double norm_squared() const {
        double acc = 0.0;
        for (const auto& a : amps_) {
            acc += std::norm(a);
        }
        return acc;
    }
    double norm() const { return std::sqrt(norm_squared()); }

    StateVector& operator*=(Complex alpha) {
        for (auto& a : amps_) {
            a *= alpha;
        }
        return *this;
    }

  private:
    static int check_qubits(int n) {
        if (n < 1 || n > 30) {
            throw InputError("qubit count must be in [1, 30]");
        }
        return n;
    }

    int n_qubits_ = 0;
    std::vector<Complex> amps_;
};

/// <a|b>, conjugate-linear in the first argument.
inline Complex inner(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) {
        throw InputError("inner product of states with different dimensions");
    }
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < a.dim(); ++k) {
        acc += std::conj(a[k]) * b[k];
    }
    return acc;
}

inline double max_abs_diff(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) {
        throw InputError("comparison of states with different dimensions");
    }
    double m = 0.0;
    for (std::size_t k = 0; k < a.dim(); ++k) {
        m = std::max(m, std::abs(a[k] - b[k]));
    }
    return m;
}

}  // namespace quads
