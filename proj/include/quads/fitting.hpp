#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "quads/core.hpp"

/**
 * @file
 * Weighted least-squares fits of median runtime versus bit count to
 *
 *     power law:    y = a N^b
 *     exponential:  y = a [exp(b N) - 1]
 *
 * by damped Gauss-Newton with analytic Jacobians, plus the chi-square tail
 * probability used to judge them.
 */

namespace quads::fitting {

enum class Model { power_law, exponential };

inline std::string_view to_string(Model m) { return m == Model::power_law ? "power_law" : "exponential"; }

inline Model parse_model(std::string_view s) {
    if (s == "power_law" || s == "power") return Model::power_law;
    if (s == "exponential" || s == "exp") return Model::exponential;
    throw InputError("unknown model '" + std::string(s) + "'");
}

/// Normal quantile for a two-sided 95% interval.
inline constexpr double kCi95Z = 1.96;

struct DataPoint {
    int n_bits = 0;
    double value = 0.0;
    double sigma = 1.0;
};

/// Symmetrized standard deviation from a 95% confidence band.
inline DataPoint data_point_from_ci(int n_bits, double median, double ci_low, double ci_high) {
    return DataPoint{n_bits, median, (ci_high - ci_low) / 2.0 / kCi95Z};
}

struct FitResult {
    Model model = Model::power_law;
    double a = 0.0;
    double b = 0.0;
    double chi2 = 0.0;
    double p_value = 1.0;
    int dof = 0;
    int n_min = 0;
    int n_max = 0;
    std::size_t n_points = 0;
    int iterations = 0;
};

class FitNonConvergence : public NonConvergenceError {
  public:
    FitNonConvergence(const std::string& what, FitResult best) : NonConvergenceError(what), best_(best) {}
    const FitResult& best() const { return best_; }

  private:
    FitResult best_;
};

/// Upper tail P(chi^2_dof > chi2) = Q(dof/2, chi2/2).
inline double chi_square_tail(double chi2, int dof) {
    if (dof < 1) {
        throw InputError("chi-square tail needs dof >= 1");
    }
    if (!(chi2 >= 0.0)) {
        throw InputError("chi-square statistic must be >= 0");
    }
    if (chi2 == 0.0) {
        return 1.0;
    }
    if (std::isinf(chi2)) {
        return 0.0;
    }
    return boost::math::gamma_q(0.5 * dof, 0.5 * chi2);
}

inline double evaluate(Model model, double a, double b, double n) {
    return model == Model::power_law ? a * std::pow(n, b) : a * std::expm1(b * n);
}

namespace detail {

inline double chi2_of(Model model, double a, double b, std::span<const DataPoint> pts) {
    double acc = 0.0;
    for (const auto& p : pts) {
        const double r = (p.value - evaluate(model, a, b, p.n_bits)) / p.sigma;
        acc += r * r;
    }
    return std::isfinite(acc) ? acc : std::numeric_limits<double>::infinity();
}

inline std::array<double, 2> jacobian_row(Model model, double a, double b, double n) {
    if (model == Model::power_law) {
        const double nb = std::pow(n, b);
        return {nb, a * nb * std::log(n)};
    }
    return {std::expm1(b * n), a * n * std::exp(b * n)};
}

inline void validate_points(std::span<const DataPoint> pts) {
    if (pts.size() < 3) {
        throw InputError("fit needs at least 3 data points, got " + std::to_string(pts.size()));
    }
    std::vector<int> ns;
    for (const auto& p : pts) {
        if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
            throw InputError("data point sigma must be finite and > 0");
        }
        if (!(p.value > 0.0) || !std::isfinite(p.value)) {
            throw InputError("data point value must be finite and > 0");
        }
        if (p.n_bits < 1) {
            throw InputError("data point bit count must be >= 1");
        }
        ns.push_back(p.n_bits);
    }
    std::sort(ns.begin(), ns.end());
    if (std::adjacent_find(ns.begin(), ns.end()) != ns.end()) {
        throw InputError("fit data must have distinct bit counts");
    }
}

/// Unweighted least-squares line through (x, y): returns {intercept, slope}.
inline std::array<double, 2> line_fit(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / den;
    return {(sy - slope * sx) / n, slope};
}

inline std::array<double, 2> initial_guess(Model model, std::span<const DataPoint> pts) {
    std::vector<double> x, y;
    for (const auto& p : pts) {
        x.push_back(model == Model::power_law ? std::log(static_cast<double>(p.n_bits)) : p.n_bits);
        y.push_back(std::log(p.value));
    }
    const auto [intercept, slope] = line_fit(x, y);
    if (model == Model::power_law) {
        return {std::exp(intercept), slope};
    }
    const double b0 = slope > 1e-6 ? slope : 1e-3;
    const auto& first = *std::min_element(pts.begin(), pts.end(),
                                          [](const DataPoint& l, const DataPoint& r) { return l.n_bits < r.n_bits; });
    return {first.value / std::expm1(b0 * first.n_bits), b0};
}

}  // namespace detail

struct FitOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-10;
    /// A step that cannot lower chi2 and moves parameters by less than this
    /// relative amount means the minimum is resolved to machine precision.
    double stagnation_tolerance = 1e-9;
    /// Same, when the predicted chi2 decrease is below this fraction of chi2.
    double decrease_tolerance = 1e-12;
};

inline FitResult fit(Model model, std::span<const DataPoint> pts, const FitOptions& opt = {}) {
    detail::validate_points(pts);
    auto [a, b] = detail::initial_guess(model, pts);

    FitResult res;
    res.model = model;
    res.n_points = pts.size();
    res.dof = static_cast<int>(pts.size()) - 2;
    res.n_min = std::min_element(pts.begin(), pts.end(), [](auto& l, auto& r) { return l.n_bits < r.n_bits; })->n_bits;
    res.n_max = std::max_element(pts.begin(), pts.end(), [](auto& l, auto& r) { return l.n_bits < r.n_bits; })->n_bits;

    double chi2 = detail::chi2_of(model, a, b, pts);
    bool converged = false;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        // Normal equations (J^T J) delta = J^T r for weighted residuals.
        double jj00 = 0, jj01 = 0, jj11 = 0, jr0 = 0, jr1 = 0;
        for (const auto& p : pts) {
            const auto row = detail::jacobian_row(model, a, b, p.n_bits);
            const double w = 1.0 / p.sigma;
            const double j0 = row[0] * w;
            const double j1 = row[1] * w;
            const double r = (p.value - evaluate(model, a, b, p.n_bits)) * w;
            jj00 += j0 * j0;
            jj01 += j0 * j1;
            jj11 += j1 * j1;
            jr0 += j0 * r;
            jr1 += j1 * r;
        }
        const double grad_norm = 2.0 * std::hypot(jr0, jr1);
        if (grad_norm < opt.gradient_tolerance) {
            converged = true;
            break;
        }
        const double det = jj00 * jj11 - jj01 * jj01;
        if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
            throw InputError("degenerate fit design matrix");
        }
        const double da = (jj11 * jr0 - jj01 * jr1) / det;
        const double db = (jj00 * jr1 - jj01 * jr0) / det;

        double lambda = 1.0;
        double trial = detail::chi2_of(model, a + da, b + db, pts);
        while (!(trial < chi2) && lambda > 1e-12) {
            lambda *= 0.5;
            trial = detail::chi2_of(model, a + lambda * da, b + lambda * db, pts);
        }
        if (!(trial < chi2)) {
            const double rel = std::max(std::abs(da) / std::max(std::abs(a), 1e-300),
                                        std::abs(db) / std::max(std::abs(b), 1e-300));
            const double predicted = da * jr0 + db * jr1;  // Gauss-Newton model decrease
            converged = rel < opt.stagnation_tolerance || predicted <= opt.decrease_tolerance * chi2;
            break;
        }
        a += lambda * da;
        b += lambda * db;
        chi2 = trial;
    }

    res.a = a;
    res.b = b;
    res.chi2 = chi2;
    res.iterations = it;
    res.p_value = res.dof >= 1 ? chi_square_tail(chi2, res.dof) : 1.0;
    if (!converged || !std::isfinite(a) || !std::isfinite(b)) {
        throw FitNonConvergence(std::string(to_string(model)) + " fit did not converge after " + std::to_string(it) +
                                    " iterations",
                                res);
    }
    return res;
}

inline FitResult fit_power_law(std::span<const DataPoint> pts, const FitOptions& opt = {}) {
    return fit(Model::power_law, pts, opt);
}

inline FitResult fit_exponential(std::span<const DataPoint> pts, const FitOptions& opt = {}) {
    return fit(Model::exponential, pts, opt);
}

/// Fit on the points with n_min <= N <= n_max; the result records the range.
inline FitResult restricted_fit(std::span<const DataPoint> pts, int n_min, int n_max, Model model,
                                const FitOptions& opt = {}) {
    std::vector<DataPoint> sub;
    for (const auto& p : pts) {
        if (p.n_bits >= n_min && p.n_bits <= n_max) {
            sub.push_back(p);
        }
    }
    if (sub.size() < 3) {
        throw InputError("restricted fit range [" + std::to_string(n_min) + ", " + std::to_string(n_max) +
                         "] holds " + std::to_string(sub.size()) + " points; need at least 3");
    }
    auto res = fit(model, sub, opt);
    res.n_min = n_min;
    res.n_max = n_max;
    return res;
}

}  // namespace quads::fitting
