#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "quads/core.hpp"

namespace quads::stats {

inline constexpr std::size_t kMinMedianSamples = 8;

struct MedianEstimate {
    double median = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_samples = 0;
    /// Exact coverage of [ci_low, ci_high] for continuous data.
    double coverage = 0.0;
};

/// P(X <= k) for X ~ Binomial(n, 1/2), summed in log space.
inline double binomial_half_cdf(std::size_t n, std::ptrdiff_t k) {
    if (k < 0) {
        return 0.0;
    }
    if (static_cast<std::size_t>(k) >= n) {
        return 1.0;
    }
    const double log_half_n = static_cast<double>(n) * std::log(0.5);
    const double lg_n1 = std::lgamma(static_cast<double>(n) + 1.0);
    double acc = 0.0;
    for (std::ptrdiff_t i = 0; i <= k; ++i) {
        const double di = static_cast<double>(i);
        acc += std::exp(lg_n1 - std::lgamma(di + 1.0) - std::lgamma(static_cast<double>(n) - di + 1.0) + log_half_n);
    }
    return std::min(acc, 1.0);
}

/**
 * Distribution-free confidence interval for the median from order
 * statistics: [x_(l), x_(n+1-l)] with l the largest rank such that the
 * Binomial(n, 1/2) coverage 1 - 2 P(B <= l-1) stays >= `level`.
 */
inline MedianEstimate median_with_ci(std::span<const double> samples, double level = 0.95) {
    const std::size_t n = samples.size();
    if (n < kMinMedianSamples) {
        throw InputError("median confidence interval needs at least 8 samples");
    }
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());

    MedianEstimate est;
    est.n_samples = n;
    est.median = (n % 2 == 1) ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);

    std::size_t rank = 1;  // 1-based lower rank
    for (std::size_t l = 1; l <= n / 2; ++l) {
        const double cov = 1.0 - 2.0 * binomial_half_cdf(n, static_cast<std::ptrdiff_t>(l) - 1);
        if (cov >= level) {
            rank = l;
        } else {
            break;
        }
    }
    est.ci_low = x[rank - 1];
    est.ci_high = x[n - rank];
    est.coverage = 1.0 - 2.0 * binomial_half_cdf(n, static_cast<std::ptrdiff_t>(rank) - 1);
    return est;
}

struct SignTestResult {
    std::size_t positives = 0;
    std::size_t negatives = 0;
    std::size_t ties = 0;
    /// One-sided P(B >= positives) under B ~ Binomial(positives + negatives, 1/2).
    double p_value = 1.0;
};

/// Paired sign test of H1: treated > control.
inline SignTestResult sign_test_greater(std::span<const double> treated, std::span<const double> control) {
    if (treated.size() != control.size()) {
        throw InputError("sign test needs paired samples of equal length");
    }
    SignTestResult r;
    for (std::size_t i = 0; i < treated.size(); ++i) {
        if (treated[i] > control[i]) {
            ++r.positives;
        } else if (treated[i] < control[i]) {
            ++r.negatives;
        } else {
            ++r.ties;
        }
    }
    const std::size_t m = r.positives + r.negatives;
    if (m == 0) {
        r.p_value = 1.0;
        return r;
    }
    // P(B >= k) = P(B <= m - k) by symmetry.
    r.p_value = binomial_half_cdf(m, static_cast<std::ptrdiff_t>(m - r.positives));
    return r;
}

}  // namespace quads::stats
