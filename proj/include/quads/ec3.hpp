#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "quads/core.hpp"

/**
 * @file
 * N-bit Exact Cover 3 instances.
 *
 * Bit j (1-based) of an assignment maps to bit (j-1) of the basis-state
 * index, so z_1 is the least significant bit.
 */

namespace quads::ec3 {

inline constexpr int kDefaultEnumerationCap = 24;

/// A clause over three distinct bits, 1-based, stored with a < b < c.
struct Clause {
    int a = 1;
    int b = 2;
    int c = 3;

    constexpr std::uint64_t mask() const {
        return (std::uint64_t{1} << (a - 1)) | (std::uint64_t{1} << (b - 1)) | (std::uint64_t{1} << (c - 1));
    }

    auto operator<=>(const Clause&) const = default;
};

inline Clause make_clause(int a, int b, int c) {
    if (!(1 <= a && a < b && b < c)) {
        throw InputError("clause indices must satisfy 1 <= a < b < c, got (" + std::to_string(a) + "," +
                         std::to_string(b) + "," + std::to_string(c) + ")");
    }
    return Clause{a, b, c};
}

class Assignment {
  public:
    Assignment() = default;
    explicit Assignment(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
        for (auto v : bits_) {
            if (v > 1) {
                throw InputError("assignment bits must be 0 or 1");
            }
        }
    }

    static Assignment from_index(std::uint64_t index, int n_bits) {
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_bits));
        for (int j = 0; j < n_bits; ++j) {
            bits[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>((index >> j) & 1U);
        }
        return Assignment(std::move(bits));
    }

    std::uint64_t to_index() const {
        std::uint64_t k = 0;
        for (std::size_t j = 0; j < bits_.size(); ++j) {
            k |= std::uint64_t{bits_[j]} << j;
        }
        return k;
    }

    std::size_t size() const { return bits_.size(); }
    /// 1-based access matching clause indices.
    int bit(int j) const { return bits_.at(static_cast<std::size_t>(j - 1)); }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    bool operator==(const Assignment&) const = default;

  private:
    std::vector<std::uint8_t> bits_;
};

class Ec3Instance {
  public:
    Ec3Instance() = default;
    Ec3Instance(int n_bits, std::vector<Clause> clauses) : n_bits_(n_bits), clauses_(std::move(clauses)) {
        if (n_bits_ < 1 || n_bits_ > 63) {
            throw InputError("n_bits must be in [1, 63]");
        }
        for (const auto& cl : clauses_) {
            if (!(1 <= cl.a && cl.a < cl.b && cl.b < cl.c && cl.c <= n_bits_)) {
                throw InputError("clause index out of range for n_bits=" + std::to_string(n_bits_));
            }
        }
        auto sorted = clauses_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw InputError("duplicate clause in instance");
        }
    }

    int n_bits() const { return n_bits_; }
    const std::vector<Clause>& clauses() const { return clauses_; }
    std::size_t size() const { return clauses_.size(); }

    bool operator==(const Ec3Instance&) const = default;

  private:
    int n_bits_ = 1;
    std::vector<Clause> clauses_;
};

inline bool clause_satisfied(const Clause& clause, const Assignment& z) {
    const int n = static_cast<int>(z.size());
    if (clause.a < 1 || clause.c > n || !(clause.a < clause.b && clause.b < clause.c)) {
        throw InputError("clause index out of range for assignment of length " + std::to_string(n));
    }
    return z.bit(clause.a) + z.bit(clause.b) + z.bit(clause.c) == 1;
}

/// Violations for the basis state encoded by `state`; no range checks.
inline std::uint32_t violation_count(const Ec3Instance& instance, std::uint64_t state) {
    std::uint32_t count = 0;
    for (const auto& cl : instance.clauses()) {
        count += std::popcount(state & cl.mask()) != 1 ? 1U : 0U;
    }
    return count;
}

inline std::uint32_t violation_count(const Ec3Instance& instance, const Assignment& z) {
    if (static_cast<int>(z.size()) != instance.n_bits()) {
        throw InputError("assignment length does not match instance n_bits");
    }
    std::uint32_t count = 0;
    for (const auto& cl : instance.clauses()) {
        count += clause_satisfied(cl, z) ? 0U : 1U;
    }
    return count;
}

/// Solution basis-state indices, ascending.
inline std::vector<std::uint64_t> solution_indices(const Ec3Instance& instance,
                                                   int cap = kDefaultEnumerationCap) {
    if (instance.n_bits() > cap) {
        throw ResourceError("enumeration of " + std::to_string(instance.n_bits()) + " bits exceeds cap " +
                            std::to_string(cap));
    }
    std::vector<std::uint64_t> out;
    const std::uint64_t dim = std::uint64_t{1} << instance.n_bits();
    for (std::uint64_t k = 0; k < dim; ++k) {
        if (violation_count(instance, k) == 0) {
            out.push_back(k);
        }
    }
    return out;
}

inline std::vector<Assignment> enumerate_solutions(const Ec3Instance& instance, int cap = kDefaultEnumerationCap) {
    std::vector<Assignment> out;
    for (auto k : solution_indices(instance, cap)) {
        out.push_back(Assignment::from_index(k, instance.n_bits()));
    }
    return out;
}

inline std::vector<Clause> all_clauses(int n_bits) {
    std::vector<Clause> out;
    for (int a = 1; a <= n_bits; ++a) {
        for (int b = a + 1; b <= n_bits; ++b) {
            for (int c = b + 1; c <= n_bits; ++c) {
                out.push_back(Clause{a, b, c});
            }
        }
    }
    return out;
}

/**
 * Draws distinct random clauses, filtering the surviving solution set after
 * each one, until at most one assignment survives. Accepts when exactly one
 * does; otherwise starts over with a fresh clause set.
 */
inline Ec3Instance generate_usa_instance(int n_bits, Rng& rng, int cap = kDefaultEnumerationCap) {
    if (n_bits < 3) {
        throw InputError("USA generation needs n_bits >= 3");
    }
    if (n_bits > cap) {
        throw ResourceError("USA generation at " + std::to_string(n_bits) + " bits exceeds cap " +
                            std::to_string(cap));
    }
    const auto pool_template = all_clauses(n_bits);
    const std::uint64_t dim = std::uint64_t{1} << n_bits;

    for (;;) {
        auto pool = pool_template;
        std::vector<Clause> chosen;
        std::vector<std::uint64_t> survivors(dim);
        for (std::uint64_t k = 0; k < dim; ++k) {
            survivors[k] = k;
        }
        while (survivors.size() > 1 && !pool.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            const std::size_t i = pick(rng);
            const Clause cl = pool[i];
            pool[i] = pool.back();
            pool.pop_back();
            chosen.push_back(cl);
            const auto m = cl.mask();
            std::erase_if(survivors, [m](std::uint64_t k) { return std::popcount(k & m) != 1; });
        }
        if (survivors.size() == 1) {
            return Ec3Instance(n_bits, std::move(chosen));
        }
        if (pool.empty() && survivors.size() > 1) {
            // Only possible at 3 bits: the single clause leaves three solutions.
            throw InputError("no unique-solution EC3 instance exists on " + std::to_string(n_bits) + " bits");
        }
    }
}

}  // namespace quads::ec3
