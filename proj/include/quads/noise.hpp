#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "quads/core.hpp"
#include "quads/state.hpp"

/**
 * @file
 * Classical telegraph-style noise fields coupled to each qubit through the
 * Zeeman term H_int(t) = -sum_j sigma_j . N_j(t).
 *
 * Each N_j(t) is a sum of square pulses of width 2 tau. Pulse centers form a
 * Poisson process of rate n = P / (2 sigma^2 tau) on [0, T]; each active axis
 * of a pulse carries an independent N(0, sigma^2) height.
 */

namespace quads::noise {

using Vec3 = std::array<double, 3>;

enum class Polarization { x, y, z, xyz };
enum class Uniformity { uniform, non_uniform };

inline std::string_view to_string(Polarization p) {
    switch (p) {
        case Polarization::x: return "x";
        case Polarization::y: return "y";
        case Polarization::z: return "z";
        case Polarization::xyz: return "xyz";
    }
    return "?";
}

inline std::string_view to_string(Uniformity u) { return u == Uniformity::uniform ? "uniform" : "non-uniform"; }

inline Polarization parse_polarization(std::string_view s) {
    if (s == "x") return Polarization::x;
    if (s == "y") return Polarization::y;
    if (s == "z") return Polarization::z;
    if (s == "xyz") return Polarization::xyz;
    throw InputError("unknown polarization '" + std::string(s) + "'");
}

inline Uniformity parse_uniformity(std::string_view s) {
    if (s == "uniform") return Uniformity::uniform;
    if (s == "non-uniform" || s == "non_uniform" || s == "nonuniform") return Uniformity::non_uniform;
    throw InputError("unknown uniformity '" + std::string(s) + "'");
}

struct NoiseParams {
    double sigma = 0.2;
    double tau = 1.0;
    double p_bar = 0.0;
    Polarization polarization = Polarization::y;
    Uniformity uniformity = Uniformity::non_uniform;

    /// Mean fluctuation rate n = P / (2 sigma^2 tau).
    double rate() const {
        if (p_bar == 0.0) {
            return 0.0;
        }
        return p_bar / (2.0 * sigma * sigma * tau);
    }

    void validate() const {
        if (!(p_bar >= 0.0) || !std::isfinite(p_bar)) {
            throw InputError("average noise power must be finite and >= 0");
        }
        if (!(tau > 0.0) || !std::isfinite(tau)) {
            throw InputError("tau must be finite and > 0");
        }
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
            throw InputError("sigma must be finite and >= 0");
        }
        if (p_bar > 0.0 && sigma == 0.0) {
            throw InputError("nonzero noise power requires sigma > 0");
        }
    }

    bool active() const { return p_bar > 0.0; }

    std::array<bool, 3> active_axes() const {
        switch (polarization) {
            case Polarization::x: return {true, false, false};
            case Polarization::y: return {false, true, false};
            case Polarization::z: return {false, false, true};
            case Polarization::xyz: return {true, true, true};
        }
        return {false, false, false};
    }

    bool operator==(const NoiseParams&) const = default;
};

struct Fluctuation {
    double center = 0.0;
    Vec3 heights{0.0, 0.0, 0.0};

    bool operator==(const Fluctuation&) const = default;
};

/**
 * One realization of {N_j(t)}. Pulse lists are sorted by center. In uniform
 * mode every qubit holds the same list.
 */
class NoiseEnvironment {
  public:
    NoiseEnvironment() = default;
    NoiseEnvironment(NoiseParams params, double horizon, std::vector<std::vector<Fluctuation>> per_qubit)
        : params_(params), horizon_(horizon), per_qubit_(std::move(per_qubit)) {
        params_.validate();
        if (!(horizon_ > 0.0)) {
            throw InputError("noise horizon must be > 0");
        }
    }

    /// Noise-free environment for n qubits.
    static NoiseEnvironment quiet(int n_qubits, double horizon, NoiseParams params = {}) {
        params.p_bar = 0.0;
        return NoiseEnvironment(params, horizon, std::vector<std::vector<Fluctuation>>(static_cast<std::size_t>(n_qubits)));
    }

    const NoiseParams& params() const { return params_; }
    double horizon() const { return horizon_; }
    int n_qubits() const { return static_cast<int>(per_qubit_.size()); }
    /// 1-based qubit index.
    const std::vector<Fluctuation>& pulses(int qubit) const { return per_qubit_.at(static_cast<std::size_t>(qubit - 1)); }
    const std::vector<std::vector<Fluctuation>>& per_qubit() const { return per_qubit_; }

    std::size_t pulse_count() const {
        std::size_t n = 0;
        for (const auto& q : per_qubit_) {
            n += q.size();
        }
        return n;
    }
    bool empty() const { return pulse_count() == 0; }

    /// Pulses with centers in [0, horizon]. Because centers are generated as
    /// an ordered Poisson stream per qubit, this equals sampling directly on
    /// the shorter horizon with the same seed.
    NoiseEnvironment restricted(double horizon) const {
        if (!(horizon > 0.0) || horizon > horizon_) {
            throw InputError("restriction horizon must lie in (0, " + std::to_string(horizon_) + "]");
        }
        std::vector<std::vector<Fluctuation>> out(per_qubit_.size());
        for (std::size_t j = 0; j < per_qubit_.size(); ++j) {
            for (const auto& f : per_qubit_[j]) {
                if (f.center > horizon) {
                    break;
                }
                out[j].push_back(f);
            }
        }
        return NoiseEnvironment(params_, horizon, std::move(out));
    }

    bool operator==(const NoiseEnvironment&) const = default;

  private:
    NoiseParams params_{};
    double horizon_ = 1.0;
    std::vector<std::vector<Fluctuation>> per_qubit_;
};

namespace detail {

inline std::vector<Fluctuation> sample_pulse_stream(const NoiseParams& params, double horizon, std::uint64_t seed) {
    std::vector<Fluctuation> out;
    const double rate = params.rate();
    if (rate <= 0.0) {
        return out;
    }
    Rng rng(seed);
    std::exponential_distribution<double> gap(rate);
    std::normal_distribution<double> height(0.0, params.sigma);
    const auto axes = params.active_axes();
    double t = 0.0;
    for (;;) {
        t += gap(rng);
        if (t > horizon) {
            break;
        }
        Fluctuation f;
        f.center = t;
        for (std::size_t a = 0; a < 3; ++a) {
            if (axes[a]) {
                f.heights[a] = height(rng);
            }
        }
        out.push_back(f);
    }
    return out;
}

}  // namespace detail

/**
 * Pulse centers per stream are generated as ordered exponential gaps at rate
 * n, which makes the count on [0, T] Poisson(nT) with uniformly distributed
 * centers. Each qubit stream gets its own sub-seed drawn from `rng`.
 */
inline NoiseEnvironment sample_environment(const NoiseParams& params, double horizon, int n_qubits, Rng& rng) {
    params.validate();
    if (!(horizon > 0.0)) {
        throw InputError("noise horizon must be > 0");
    }
    if (n_qubits < 1) {
        throw InputError("noise environment needs at least one qubit");
    }
    std::vector<std::vector<Fluctuation>> per_qubit(static_cast<std::size_t>(n_qubits));
    if (params.uniformity == Uniformity::uniform) {
        const auto shared = detail::sample_pulse_stream(params, horizon, rng());
        for (auto& q : per_qubit) {
            q = shared;
        }
    } else {
        std::vector<std::uint64_t> seeds(per_qubit.size());
        for (auto& s : seeds) {
            s = rng();
        }
        for (std::size_t j = 0; j < per_qubit.size(); ++j) {
            per_qubit[j] = detail::sample_pulse_stream(params, horizon, seeds[j]);
        }
    }
    return NoiseEnvironment(params, horizon, std::move(per_qubit));
}

/// Support of each pulse is the half-open window [center - tau, center + tau).
inline Vec3 field_at(const NoiseEnvironment& env, int qubit, double t) {
    if (qubit < 1 || qubit > env.n_qubits()) {
        throw InputError("qubit index " + std::to_string(qubit) + " out of range");
    }
    const double tau = env.params().tau;
    Vec3 f{0.0, 0.0, 0.0};
    for (const auto& p : env.pulses(qubit)) {
        if (p.center - tau > t) {
            break;
        }
        if (t < p.center + tau) {
            for (std::size_t a = 0; a < 3; ++a) {
                f[a] += p.heights[a];
            }
        }
    }
    return f;
}

inline std::vector<Vec3> fields_at(const NoiseEnvironment& env, double t) {
    std::vector<Vec3> out(static_cast<std::size_t>(env.n_qubits()));
    for (int j = 1; j <= env.n_qubits(); ++j) {
        out[static_cast<std::size_t>(j - 1)] = field_at(env, j, t);
    }
    return out;
}

/// -sum_j (f_j . sigma_j) psi for fixed per-qubit fields.
inline StateVector apply_field_term(std::span<const Vec3> fields, const StateVector& psi) {
    if (static_cast<int>(fields.size()) != psi.n_qubits()) {
        throw InputError("field count does not match qubit count");
    }
    StateVector out(psi.n_qubits());
    const Complex i{0.0, 1.0};
    for (int j = 0; j < psi.n_qubits(); ++j) {
        const auto& f = fields[static_cast<std::size_t>(j)];
        const std::size_t m = std::size_t{1} << j;
        for (std::size_t k = 0; k < psi.dim(); ++k) {
            const bool one = (k & m) != 0;
            // sigma_x: flip. sigma_y|0> = i|1>, sigma_y|1> = -i|0>. sigma_z: +-1.
            const Complex flipped = psi[k ^ m];
            const Complex sy = one ? i * flipped : -i * flipped;
            const double sz = one ? -1.0 : 1.0;
            out[k] -= f[0] * flipped + f[1] * sy + f[2] * sz * psi[k];
        }
    }
    return out;
}

inline StateVector apply_interaction(const NoiseEnvironment& env, double t, const StateVector& psi) {
    if (env.n_qubits() != psi.n_qubits()) {
        throw InputError("noise environment has " + std::to_string(env.n_qubits()) + " qubits but state has " +
                         std::to_string(psi.n_qubits()));
    }
    const auto fields = fields_at(env, t);
    return apply_field_term(fields, psi);
}

/// Sorted, unique pulse edges strictly inside (0, horizon).
inline std::vector<double> pulse_edges(const NoiseEnvironment& env) {
    std::vector<double> edges;
    const double tau = env.params().tau;
    for (const auto& q : env.per_qubit()) {
        for (const auto& p : q) {
            for (double e : {p.center - tau, p.center + tau}) {
                if (e > 0.0 && e < env.horizon()) {
                    edges.push_back(e);
                }
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

/**
 * (1 / (N T)) sum_j int_0^T |N_j(t)|^2 dt, integrated exactly over the
 * piecewise-constant fields. Pulses straddling 0 or T are clipped.
 */
inline double measured_average_power(const NoiseEnvironment& env) {
    const double horizon = env.horizon();
    const double tau = env.params().tau;
    double total = 0.0;
    for (const auto& q : env.per_qubit()) {
        std::vector<double> cuts{0.0, horizon};
        for (const auto& p : q) {
            for (double e : {p.center - tau, p.center + tau}) {
                if (e > 0.0 && e < horizon) {
                    cuts.push_back(e);
                }
            }
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
            Vec3 f{0.0, 0.0, 0.0};
            for (const auto& p : q) {
                if (p.center - tau <= mid && mid < p.center + tau) {
                    for (std::size_t a = 0; a < 3; ++a) {
                        f[a] += p.heights[a];
                    }
                }
            }
            total += (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]) * (cuts[i + 1] - cuts[i]);
        }
    }
    return total / (static_cast<double>(env.n_qubits()) * horizon);
}

/// Probability that some pulse covers t = 0 (or t = T): P tau / (2 sigma^2 T).
inline double endpoint_fluctuation_probability(const NoiseParams& params, double total_time) {
    if (!(params.sigma > 0.0)) {
        throw InputError("sigma must be > 0");
    }
    if (!(total_time > 0.0)) {
        throw InputError("total time must be > 0");
    }
    return params.p_bar * params.tau / (2.0 * params.sigma * params.sigma * total_time);
}

}  // namespace quads::noise
