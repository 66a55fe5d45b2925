#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "quads/core.hpp"
#include "quads/dynamics.hpp"
#include "quads/ec3.hpp"
#include "quads/log.hpp"
#include "quads/noise.hpp"
#include "quads/statistics.hpp"

/**
 * @file
 * The runtime-measurement campaign: for every (N, P) pair, every instance
 * and every noise environment, find the shortest evolution time whose
 * success probability reaches the threshold, then reduce to medians with
 * 95% confidence limits.
 */

namespace quads::protocol {

using dynamics::EvolutionConfig;
using dynamics::ProblemData;
using noise::NoiseEnvironment;
using noise::NoiseParams;

struct ProbePolicy {
    double t0 = 1.0;
    double growth = 1.3;
    double rel_width = 0.05;
    double ceiling = 1e4;

    void validate() const {
        if (!(t0 > 0.0) || !(growth > 1.0) || !(rel_width > 0.0 && rel_width < 1.0) || !(ceiling >= t0)) {
            throw InputError("invalid runtime probe policy");
        }
    }
};

struct RuntimeSearch {
    double t_star = 0.0;
    double success = 0.0;
    /// Largest probed time below t_star, or 0 when t0 already succeeded.
    double t_below = 0.0;
    double success_below = std::numeric_limits<double>::quiet_NaN();
    std::size_t probes = 0;
};

/// Success probability after evolving for `total_time`.
inline double probe_success(const ProblemData& problem, const NoiseEnvironment* env, double total_time,
                            const EvolutionConfig& base) {
    EvolutionConfig cfg = base;
    cfg.total_time = total_time;
    if (env != nullptr && !env->empty()) {
        const auto window = env->restricted(total_time);
        return dynamics::success_probability(dynamics::evolve(problem, &window, cfg).psi, problem.diag);
    }
    return dynamics::success_probability(dynamics::evolve(problem, nullptr, cfg).psi, problem.diag);
}

/**
 * Geometric scan T <- growth * T from t0 until the threshold is met, then
 * bisection between the last failing and first passing times until the
 * bracket is narrower than rel_width relative to its upper end.
 *
 * `env`, when given, must cover the ceiling; each probe sees only the pulses
 * centered inside its own [0, T].
 */
inline RuntimeSearch required_runtime(const ProblemData& problem, const NoiseEnvironment* env, double p_star,
                                      const ProbePolicy& policy, const EvolutionConfig& evolution = {}) {
    policy.validate();
    if (!(p_star > 0.0 && p_star < 1.0)) {
        throw InputError("success threshold must lie in (0, 1)");
    }
    RuntimeSearch out;
    double t = policy.t0;
    double lo = 0.0;
    double p_lo = std::numeric_limits<double>::quiet_NaN();
    double p = 0.0;
    for (;;) {
        p = probe_success(problem, env, t, evolution);
        ++out.probes;
        if (p >= p_star) {
            break;
        }
        lo = t;
        p_lo = p;
        if (t >= policy.ceiling) {
            throw NonConvergenceError("success probability " + std::to_string(p) + " below threshold at ceiling T=" +
                                      std::to_string(policy.ceiling));
        }
        t = std::min(t * policy.growth, policy.ceiling);
    }
    double hi = t;
    double p_hi = p;
    if (lo > 0.0) {
        while ((hi - lo) / hi > policy.rel_width) {
            const double mid = 0.5 * (lo + hi);
            const double pm = probe_success(problem, env, mid, evolution);
            ++out.probes;
            if (pm >= p_star) {
                hi = mid;
                p_hi = pm;
            } else {
                lo = mid;
                p_lo = pm;
            }
        }
    }
    out.t_star = hi;
    out.success = p_hi;
    out.t_below = lo;
    out.success_below = p_lo;
    return out;
}

struct CampaignConfig {
    std::vector<int> n_values;
    std::vector<double> p_bars{0.0};
    int instances_per_n = 75;
    int envs_per_instance = 10;
    double success_threshold = 0.125;
    std::uint64_t master_seed = 1;
    unsigned jobs = 1;
    /// Same instances for every noise power at a given N.
    bool shared_instances = true;
    NoiseParams noise{};
    ProbePolicy probe{};
    EvolutionConfig evolution{};
    double degraded_fraction = 0.02;

    void validate() const {
        if (n_values.empty()) {
            throw InputError("campaign needs at least one N value");
        }
        for (int n : n_values) {
            if (n < 3 || n > 20) {
                throw InputError("campaign N values must lie in [3, 20]");
            }
        }
        if (p_bars.empty()) {
            throw InputError("campaign needs at least one noise power");
        }
        for (double p : p_bars) {
            if (!(p >= 0.0) || !std::isfinite(p)) {
                throw InputError("noise powers must be finite and >= 0");
            }
        }
        if (instances_per_n < 1 || envs_per_instance < 1) {
            throw InputError("instances_per_n and envs_per_instance must be >= 1");
        }
        if (!(success_threshold > 0.0 && success_threshold < 1.0)) {
            throw InputError("success threshold must lie in (0, 1)");
        }
        if (jobs < 1) {
            throw InputError("jobs must be >= 1");
        }
        noise.validate();
        probe.validate();
        evolution.validate();
    }

    /// Noise-free campaigns have a single, empty environment per instance.
    int envs_for(double p_bar) const { return p_bar > 0.0 ? envs_per_instance : 1; }
};

struct RuntimeRecord {
    int n_bits = 0;
    double p_bar = 0.0;
    int instance_id = 0;
    int env_id = 0;
    double t_star = 0.0;
    double success = 0.0;
    double t_below = 0.0;
    bool quarantined = false;
    std::string note;
};

struct MedianPoint {
    int n_bits = 0;
    double p_bar = 0.0;
    double median = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_quarantined = 0;
    bool degraded = false;
};

struct CampaignResult {
    /// Canonical order: N, P, instance, environment. Includes quarantined runs.
    std::vector<RuntimeRecord> records;
    std::vector<MedianPoint> medians;

    std::vector<RuntimeRecord> quarantine() const {
        std::vector<RuntimeRecord> q;
        std::copy_if(records.begin(), records.end(), std::back_inserter(q), [](auto& r) { return r.quarantined; });
        return q;
    }
    bool degraded() const {
        return std::any_of(medians.begin(), medians.end(), [](auto& m) { return m.degraded; });
    }
};

inline std::uint64_t instance_seed(const CampaignConfig& cfg, int n_bits, int instance_id, double p_bar) {
    if (cfg.shared_instances) {
        return derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(SeedDomain::instance),
                                             static_cast<std::uint64_t>(n_bits),
                                             static_cast<std::uint64_t>(instance_id)});
    }
    return derive_seed(cfg.master_seed,
                       {static_cast<std::uint64_t>(SeedDomain::instance), static_cast<std::uint64_t>(n_bits),
                        static_cast<std::uint64_t>(instance_id), seed_key(p_bar)});
}

inline std::uint64_t environment_seed(const CampaignConfig& cfg, int n_bits, double p_bar, int instance_id,
                                      int env_id) {
    return derive_seed(cfg.master_seed,
                       {static_cast<std::uint64_t>(SeedDomain::environment), static_cast<std::uint64_t>(n_bits),
                        seed_key(p_bar), static_cast<std::uint64_t>(instance_id),
                        static_cast<std::uint64_t>(env_id)});
}

/// Generates the USA instance for a campaign slot from its derived seed.
inline ec3::Ec3Instance campaign_instance(const CampaignConfig& cfg, int n_bits, int instance_id, double p_bar = 0.0) {
    Rng rng(instance_seed(cfg, n_bits, instance_id, p_bar));
    return ec3::generate_usa_instance(n_bits, rng);
}

inline NoiseEnvironment campaign_environment(const CampaignConfig& cfg, int n_bits, double p_bar, int instance_id,
                                             int env_id) {
    NoiseParams params = cfg.noise;
    params.p_bar = p_bar;
    Rng rng(environment_seed(cfg, n_bits, p_bar, instance_id, env_id));
    return noise::sample_environment(params, cfg.probe.ceiling, n_bits, rng);
}

/// Supplies the instance for (N, instance id, P). Defaults to generation.
using InstanceSource = std::function<ec3::Ec3Instance(int n_bits, int instance_id, double p_bar)>;

/// Computes one record in isolation; used by the campaign and for audits.
inline RuntimeRecord run_job(const CampaignConfig& cfg, const ProblemData& problem, int n_bits, double p_bar,
                             int instance_id, int env_id) {
    RuntimeRecord rec;
    rec.n_bits = n_bits;
    rec.p_bar = p_bar;
    rec.instance_id = instance_id;
    rec.env_id = env_id;
    try {
        RuntimeSearch search;
        if (p_bar > 0.0) {
            const auto env = campaign_environment(cfg, n_bits, p_bar, instance_id, env_id);
            search = required_runtime(problem, &env, cfg.success_threshold, cfg.probe, cfg.evolution);
        } else {
            search = required_runtime(problem, nullptr, cfg.success_threshold, cfg.probe, cfg.evolution);
        }
        rec.t_star = search.t_star;
        rec.success = search.success;
        rec.t_below = search.t_below;
    } catch (const NonConvergenceError& e) {
        rec.quarantined = true;
        rec.t_star = cfg.probe.ceiling;
        rec.note = e.what();
    } catch (const NumericalInstabilityError& e) {
        rec.quarantined = true;
        rec.t_star = std::numeric_limits<double>::quiet_NaN();
        rec.note = e.what();
    }
    return rec;
}

namespace detail {

/// Runs task(i) for i in [0, count) on up to `workers` threads.
template <typename Task>
void parallel_for(std::size_t count, unsigned workers, Task&& task) {
    workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= count) {
                        return;
                    }
                    try {
                        task(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                        next.store(count);
                        return;
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace detail

inline std::vector<MedianPoint> summarize(const CampaignConfig& cfg, const std::vector<RuntimeRecord>& records) {
    std::map<std::pair<int, double>, std::vector<const RuntimeRecord*>> groups;
    for (const auto& r : records) {
        groups[{r.n_bits, r.p_bar}].push_back(&r);
    }
    std::vector<MedianPoint> out;
    for (const auto& [key, recs] : groups) {
        std::vector<double> samples;
        std::size_t quarantined = 0;
        for (const auto* r : recs) {
            if (r->quarantined) {
                ++quarantined;
            } else {
                samples.push_back(r->t_star);
            }
        }
        if (samples.size() < stats::kMinMedianSamples) {
            log(LogLevel::warning, "N=" + std::to_string(key.first) + " P=" + std::to_string(key.second) + ": only " +
                                       std::to_string(samples.size()) + " usable runtimes; no median reported");
            continue;
        }
        const auto est = stats::median_with_ci(samples);
        MedianPoint mp;
        mp.n_bits = key.first;
        mp.p_bar = key.second;
        mp.median = est.median;
        mp.ci_low = est.ci_low;
        mp.ci_high = est.ci_high;
        mp.n_samples = est.n_samples;
        mp.n_quarantined = quarantined;
        mp.degraded = static_cast<double>(quarantined) > cfg.degraded_fraction * static_cast<double>(recs.size());
        out.push_back(mp);
    }
    return out;
}

inline CampaignResult run_campaign(const CampaignConfig& cfg, const InstanceSource& source = {}) {
    cfg.validate();
    auto n_values = cfg.n_values;
    std::sort(n_values.begin(), n_values.end());
    n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
    auto p_bars = cfg.p_bars;
    std::sort(p_bars.begin(), p_bars.end());
    p_bars.erase(std::unique(p_bars.begin(), p_bars.end()), p_bars.end());

    struct InstanceKey {
        int n_bits;
        int instance_id;
        double p_bar;  // 0 when instances are shared
    };
    std::vector<InstanceKey> inst_keys;
    for (int n : n_values) {
        if (cfg.shared_instances) {
            for (int i = 0; i < cfg.instances_per_n; ++i) {
                inst_keys.push_back({n, i, 0.0});
            }
        } else {
            for (double p : p_bars) {
                for (int i = 0; i < cfg.instances_per_n; ++i) {
                    inst_keys.push_back({n, i, p});
                }
            }
        }
    }
    std::vector<ProblemData> problems(inst_keys.size());
    detail::parallel_for(inst_keys.size(), cfg.jobs, [&](std::size_t idx) {
        const auto& k = inst_keys[idx];
        const auto inst =
            source ? source(k.n_bits, k.instance_id, k.p_bar) : campaign_instance(cfg, k.n_bits, k.instance_id, k.p_bar);
        if (inst.n_bits() != k.n_bits) {
            throw InputError("instance source returned wrong bit count");
        }
        problems[idx] = ProblemData::from_instance(inst);
    });
    auto problem_index = [&](int n, int i, double p) {
        for (std::size_t idx = 0; idx < inst_keys.size(); ++idx) {
            const auto& k = inst_keys[idx];
            if (k.n_bits == n && k.instance_id == i && (cfg.shared_instances || k.p_bar == p)) {
                return idx;
            }
        }
        throw InputError("missing instance");
    };

    struct JobKey {
        int n_bits;
        double p_bar;
        int instance_id;
        int env_id;
        std::size_t problem;
    };
    std::vector<JobKey> jobs;
    for (int n : n_values) {
        for (double p : p_bars) {
            for (int i = 0; i < cfg.instances_per_n; ++i) {
                const auto pi = problem_index(n, i, p);
                for (int e = 0; e < cfg.envs_for(p); ++e) {
                    jobs.push_back({n, p, i, e, pi});
                }
            }
        }
    }

    CampaignResult result;
    result.records.resize(jobs.size());
    std::atomic<std::size_t> done{0};
    detail::parallel_for(jobs.size(), cfg.jobs, [&](std::size_t idx) {
        const auto& j = jobs[idx];
        const auto start = std::chrono::steady_clock::now();
        result.records[idx] = run_job(cfg, problems[j.problem], j.n_bits, j.p_bar, j.instance_id, j.env_id);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const auto k = done.fetch_add(1) + 1;
        const auto& r = result.records[idx];
        log(LogLevel::info, "[" + std::to_string(k) + "/" + std::to_string(jobs.size()) + "] N=" +
                                std::to_string(j.n_bits) + " P=" + std::to_string(j.p_bar) + " inst=" +
                                std::to_string(j.instance_id) + " env=" + std::to_string(j.env_id) +
                                (r.quarantined ? " QUARANTINED" : " T*=" + std::to_string(r.t_star)) + " (" +
                                std::to_string(secs) + " s)");
    });
    result.medians = summarize(cfg, result.records);
    return result;
}

}  // namespace quads::protocol
