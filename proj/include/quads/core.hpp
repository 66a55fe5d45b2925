#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>

namespace quads {

inline constexpr const char* kVersion = "0.1.0";

using Complex = std::complex<double>;
using Rng = std::mt19937_64;

// Caller supplied bad arguments (out-of-range index, mismatched dimensions).
class InputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Request exceeds a configured size cap.
class ResourceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Integrator norm drift exceeded the hard limit within a single step.
class NumericalInstabilityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NonConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Mixes a master seed with a job key so that every job gets an independent,
/// reproducible stream regardless of the order jobs are executed in.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = splitmix64(master);
    for (auto k : keys) {
        h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    }
    return h;
}

inline std::uint64_t seed_key(double value) { return std::bit_cast<std::uint64_t>(value); }

// Domain tags mixed into derived seeds.
enum class SeedDomain : std::uint64_t { instance = 1, environment = 2 };

}  // namespace quads
