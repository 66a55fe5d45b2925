#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "quads/ec3.hpp"
#include "quads/hamiltonian.hpp"
#include "quads/log.hpp"
#include "quads/noise.hpp"
#include "quads/state.hpp"

/**
 * @file
 * Integration of i d(psi)/dt = [H(t/T) + H_int(t)] psi with classical RK4.
 *
 * The noise field is piecewise constant, so the interval [0, T] is first cut
 * at every pulse edge and each piece is then split into equal steps no longer
 * than the resolved base step. No step straddles a field discontinuity.
 */

namespace quads::dynamics {

using hamiltonian::DegreeVector;
using hamiltonian::ProblemDiagonal;
using noise::NoiseEnvironment;
using noise::Vec3;

/// Instance data the integrator needs: H_i degrees and the H_P diagonal.
struct ProblemData {
    DegreeVector degrees;
    ProblemDiagonal diag;

    int n_bits() const { return degrees.n_bits(); }

    static ProblemData from_instance(const ec3::Ec3Instance& instance) {
        return ProblemData{hamiltonian::degree_vector(instance), hamiltonian::build_problem_diagonal(instance)};
    }
};

struct EvolutionConfig {
    double total_time = 1.0;
    /// Explicit base step; 0 selects total_time / divisions.
    double base_step = 0.0;
    int divisions = 2000;
    /// Step is also capped at tau * this when noise is present.
    double noise_step_fraction = 0.1;
    /// Step is also capped so that step * ||H||_bound <= this.
    double spectral_step_limit = 0.25;
    double renorm_tolerance = 1e-8;
    double instability_limit = 1e-4;

    void validate() const {
        if (!(total_time > 0.0) || !std::isfinite(total_time)) {
            throw InputError("total evolution time must be finite and > 0");
        }
        if (base_step < 0.0 || divisions < 1) {
            throw InputError("invalid step configuration");
        }
        if (!(spectral_step_limit > 0.0) || !(noise_step_fraction > 0.0)) {
            throw InputError("step limits must be > 0");
        }
    }
};

/// A stretch of constant noise field, integrated with `steps` equal steps.
struct Segment {
    double begin = 0.0;
    double end = 0.0;
    std::size_t steps = 1;
    std::vector<Vec3> fields;

    double step() const { return (end - begin) / static_cast<double>(steps); }
};

struct Schedule {
    double base_step = 0.0;
    std::vector<Segment> segments;

    std::size_t total_steps() const {
        std::size_t n = 0;
        for (const auto& s : segments) {
            n += s.steps;
        }
        return n;
    }
};

/// Upper bound on ||H(s) + H_int|| over the run for the given fields.
inline double spectral_bound(const ProblemData& problem, double max_field_sum) {
    const double hi = static_cast<double>(problem.degrees.total());
    const double hp = static_cast<double>(problem.diag.max_cost());
    return std::max(hi, hp) + max_field_sum;
}

inline Schedule build_schedule(const ProblemData& problem, const NoiseEnvironment* env, const EvolutionConfig& config) {
    config.validate();
    const double T = config.total_time;
    const int n = problem.n_bits();
    if (env != nullptr && env->n_qubits() != n) {
        throw InputError("noise environment qubit count does not match problem");
    }
    if (env != nullptr && env->horizon() + 1e-12 * T < T) {
        throw InputError("noise environment horizon is shorter than the evolution time");
    }

    std::vector<double> cuts{0.0, T};
    const bool noisy = env != nullptr && !env->empty();
    if (noisy) {
        const double tau = env->params().tau;
        for (const auto& q : env->per_qubit()) {
            for (const auto& p : q) {
                for (double e : {p.center - tau, p.center + tau}) {
                    if (e > 0.0 && e < T) {
                        cuts.push_back(e);
                    }
                }
            }
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    }

    Schedule sched;
    double max_field_sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Segment seg;
        seg.begin = cuts[i];
        seg.end = cuts[i + 1];
        if (noisy) {
            seg.fields = noise::fields_at(*env, 0.5 * (seg.begin + seg.end));
        } else {
            seg.fields.assign(static_cast<std::size_t>(n), Vec3{0.0, 0.0, 0.0});
        }
        double sum = 0.0;
        for (const auto& f : seg.fields) {
            sum += std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
        }
        max_field_sum = std::max(max_field_sum, sum);
        sched.segments.push_back(std::move(seg));
    }

    double dt = config.base_step > 0.0 ? config.base_step : T / config.divisions;
    if (noisy || (env != nullptr && env->params().active())) {
        dt = std::min(dt, config.noise_step_fraction * env->params().tau);
    }
    const double bound = spectral_bound(problem, max_field_sum);
    if (bound > 0.0) {
        dt = std::min(dt, config.spectral_step_limit / bound);
    }
    sched.base_step = dt;
    for (auto& seg : sched.segments) {
        const double len = seg.end - seg.begin;
        seg.steps = static_cast<std::size_t>(std::max(1.0, std::ceil(len / dt - 1e-9)));
    }
    return sched;
}

/**
 * Fused matrix-free application of (1-s) H_i + s H_P - sum_j f_j . sigma_j
 * for piecewise-constant fields f_j.
 */
class HamiltonianKernel {
  public:
    explicit HamiltonianKernel(const ProblemData& problem)
        : problem_(problem),
          n_(problem.n_bits()),
          dim_(std::size_t{1} << n_),
          half_degree_sum_(0.5 * problem.degrees.total()),
          fields_(static_cast<std::size_t>(n_), Vec3{0.0, 0.0, 0.0}),
          zdiag_(dim_, 0.0) {
        if (problem.diag.dim() != dim_) {
            throw InputError("problem diagonal dimension does not match degree vector");
        }
    }

    void set_fields(std::span<const Vec3> fields) {
        if (fields.size() != fields_.size()) {
            throw InputError("field count does not match qubit count");
        }
        std::copy(fields.begin(), fields.end(), fields_.begin());
        has_z_ = std::any_of(fields_.begin(), fields_.end(), [](const Vec3& f) { return f[2] != 0.0; });
        if (has_z_) {
            for (std::size_t k = 0; k < dim_; ++k) {
                double acc = 0.0;
                for (int j = 0; j < n_; ++j) {
                    const double fz = fields_[static_cast<std::size_t>(j)][2];
                    acc += ((k >> j) & 1U) ? fz : -fz;
                }
                zdiag_[k] = acc;
            }
        }
    }

    /// out = H psi. `in` and `out` must not alias.
    void apply(double s, std::span<const Complex> in, std::span<Complex> out) const {
        const double ws = 1.0 - s;
        const auto& costs = problem_.diag.costs;
        const double base = ws * half_degree_sum_;
        if (has_z_) {
            for (std::size_t k = 0; k < dim_; ++k) {
                out[k] = (base + s * costs[k] + zdiag_[k]) * in[k];
            }
        } else {
            for (std::size_t k = 0; k < dim_; ++k) {
                out[k] = (base + s * costs[k]) * in[k];
            }
        }
        for (int j = 0; j < n_; ++j) {
            const auto& f = fields_[static_cast<std::size_t>(j)];
            // Coefficient on psi[k ^ m] is re + i*im for bit j of k equal to 0,
            // and re - i*im for bit j equal to 1.
            const double re = -ws * 0.5 * problem_.degrees.degrees[static_cast<std::size_t>(j)] - f[0];
            const double im = f[1];
            const std::size_t m = std::size_t{1} << j;
            for (std::size_t blk = 0; blk < dim_; blk += 2 * m) {
                for (std::size_t k0 = blk; k0 < blk + m; ++k0) {
                    const std::size_t k1 = k0 | m;
                    const double ar = in[k0].real(), ai = in[k0].imag();
                    const double br = in[k1].real(), bi = in[k1].imag();
                    out[k0] += Complex{re * br - im * bi, re * bi + im * br};
                    out[k1] += Complex{re * ar + im * ai, re * ai - im * ar};
                }
            }
        }
    }

  private:
    const ProblemData& problem_;
    int n_;
    std::size_t dim_;
    double half_degree_sum_;
    std::vector<Vec3> fields_;
    std::vector<double> zdiag_;
    bool has_z_ = false;
};

inline Complex times_minus_i(Complex z) { return Complex{z.imag(), -z.real()}; }

struct EvolutionResult {
    StateVector psi;
    std::size_t steps = 0;
    std::size_t renormalizations = 0;
    double max_drift = 0.0;
    double base_step = 0.0;
};

/// Evolves the uniform superposition from t = 0 to T. `env` may be null.
inline EvolutionResult evolve(const ProblemData& problem, const NoiseEnvironment* env, const EvolutionConfig& config) {
    const Schedule sched = build_schedule(problem, env, config);
    const double T = config.total_time;
    const std::size_t dim = problem.diag.dim();

    EvolutionResult result;
    result.psi = hamiltonian::ground_state_initial(problem.n_bits());
    result.base_step = sched.base_step;
    HamiltonianKernel kernel(problem);

    std::vector<Complex> stage(dim), hpsi(dim), acc(dim);
    auto psi = result.psi.amplitudes();

    for (const auto& seg : sched.segments) {
        kernel.set_fields(seg.fields);
        const double h = seg.step();
        for (std::size_t step = 0; step < seg.steps; ++step) {
            const double t = seg.begin + h * static_cast<double>(step);
            const double s0 = std::min(t / T, 1.0);
            const double s_mid = std::min((t + 0.5 * h) / T, 1.0);
            const double s1 = std::min((t + h) / T, 1.0);

            std::copy(psi.begin(), psi.end(), acc.begin());

            kernel.apply(s0, psi, hpsi);
            for (std::size_t k = 0; k < dim; ++k) {
                const Complex kk = times_minus_i(hpsi[k]);
                acc[k] += (h / 6.0) * kk;
                stage[k] = psi[k] + (0.5 * h) * kk;
            }
            kernel.apply(s_mid, stage, hpsi);
            for (std::size_t k = 0; k < dim; ++k) {
                const Complex kk = times_minus_i(hpsi[k]);
                acc[k] += (h / 3.0) * kk;
                stage[k] = psi[k] + (0.5 * h) * kk;
            }
            kernel.apply(s_mid, stage, hpsi);
            for (std::size_t k = 0; k < dim; ++k) {
                const Complex kk = times_minus_i(hpsi[k]);
                acc[k] += (h / 3.0) * kk;
                stage[k] = psi[k] + h * kk;
            }
            kernel.apply(s1, stage, hpsi);
            double norm2 = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                psi[k] = acc[k] + (h / 6.0) * times_minus_i(hpsi[k]);
                norm2 += std::norm(psi[k]);
            }

            const double norm = std::sqrt(norm2);
            const double drift = std::abs(norm - 1.0);
            result.max_drift = std::max(result.max_drift, drift);
            if (drift > config.instability_limit) {
                throw NumericalInstabilityError("norm drift " + std::to_string(drift) + " at t=" + std::to_string(t) +
                                                " exceeds limit; step " + std::to_string(h) + " is too large");
            }
            if (drift > config.renorm_tolerance) {
                const double inv = 1.0 / norm;
                for (auto& a : psi) {
                    a *= inv;
                }
                ++result.renormalizations;
            }
            ++result.steps;
        }
    }
    if (result.renormalizations > 0) {
        log(LogLevel::debug, "evolve: T=" + std::to_string(T) + " renormalized " +
                                 std::to_string(result.renormalizations) + " times over " +
                                 std::to_string(result.steps) + " steps (max drift " +
                                 std::to_string(result.max_drift) + ")");
    }
    return result;
}

/// Probability mass on zero-cost basis states.
inline double success_probability(const StateVector& psi, const ProblemDiagonal& diag) {
    if (psi.dim() != diag.dim()) {
        throw InputError("state dimension does not match problem diagonal");
    }
    double p = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        if (diag.costs[k] == 0) {
            p += std::norm(psi[k]);
            any = true;
        }
    }
    if (!any) {
        throw InputError("problem has no zero-cost state; success probability is undefined");
    }
    return std::min(p, 1.0);
}

inline double expected_cost(const StateVector& psi, const ProblemDiagonal& diag) {
    double e = 0.0;
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        e += std::norm(psi[k]) * diag.costs[k];
    }
    return e;
}

}  // namespace quads::dynamics
