#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "data.hpp"
#include "gl.hpp"
#include "optimize.hpp"

namespace glfit {

/// Exponent tag for the disagreement denominator: q in {0, 1, p/2, p}.
enum class QTag { zero, one, half_p, p };

inline double resolve_q(QTag tag, double p) {
    switch (tag) {
        case QTag::zero: return 0.0;
        case QTag::one: return 1.0;
        case QTag::half_p: return 0.5 * p;
        case QTag::p: return p;
    }
    throw std::logic_error("resolve_q: unknown tag");
}

inline const char* qtag_name(QTag tag) {
    switch (tag) {
        case QTag::zero: return "0";
        case QTag::one: return "1";
        case QTag::half_p: return "p/2";
        case QTag::p: return "p";
    }
    return "?";
}

enum class Method { min_disagreement, moments, central_moments, population_stats, mle };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::min_disagreement: return "min_disagreement";
        case Method::moments: return "moments";
        case Method::central_moments: return "central_moments";
        case Method::population_stats: return "population_stats";
        case Method::mle: return "mle";
    }
    return "?";
}

/// Outcome of one fit. `objective` holds the achieved disagreement S(p,q) for
/// min_disagreement, the base-2 log-likelihood for mle, and the squared
/// relative residual norm for the moment fits; it is always recomputable from
/// (data, params).
struct FitResult {
    GLParams params;
    double objective = 0.0;
    Method method = Method::mle;
    bool converged = false;
    int iterations = 0;
    std::string note;
};

namespace detail {

// Shared power kernel with fast paths for the ubiquitous p = 1, 2.
inline double pow_abs(double base, double expo) {
    const double b = std::fabs(base);
    if (expo == 2.0) return b * b;
    if (expo == 1.0) return b;
    return std::pow(b, expo);
}

// Disagreement sum; returns +inf on overflow instead of throwing so the
// optimizer can treat wild parameter regions as infinitely bad.
inline double disagreement_raw(const FreqSeries& fs, const GLParams& params, double p,
                               double q) {
    const ShapeInfo info(params.p);
    const double ln_base = std::log(fs.n_total * fs.cell_width / params.sigma);
    double sum = 0.0;
    for (std::size_t i = 0; i < fs.x.size(); ++i) {
        const double f =
            std::exp(ln_base + info.ln_standard_pdf((fs.x[i] - params.mu) / params.sigma));
        double term = pow_abs(fs.y[i] - f, p);
        if (q == 1.0) term /= f;
        else if (q != 0.0) term /= std::pow(f, q);
        sum += term;
    }
    return sum;
}

}  // namespace detail

/// Eq-style disagreement S(p, q) = sum |Y_i - f(X_i)|^p / f(X_i)^q with f the
/// expected frequencies under params.
inline double disagreement(const FreqSeries& fs, const GLParams& params, double p,
                           QTag q_tag) {
    validate(fs);
    validate(params);
    if (!(p > 0.0) || !std::isfinite(p))
        throw std::domain_error("disagreement: p must be positive and finite");
    const double s = detail::disagreement_raw(fs, params, p, resolve_q(q_tag, p));
    if (!std::isfinite(s))
        throw std::overflow_error("disagreement: sum exceeds representable range");
    return s;
}

/// Minimizes S(p, q) over (mu, sigma) at fixed shape p (which is also the
/// power in the sum). init defaults to the weighted mean/sd of the series.
inline FitResult fit_min_disagreement(const FreqSeries& fs, double p, QTag q_tag,
                                      std::optional<GLParams> init = std::nullopt) {
    validate(fs);
    if (!(p >= min_shape) || !(p <= max_shape))
        throw std::domain_error("fit_min_disagreement: p outside [" +
                                std::to_string(min_shape) + ", " +
                                std::to_string(max_shape) + "]");
    const double q = resolve_q(q_tag, p);
    GLParams start{0.0, 1.0, p};
    if (init.has_value()) {
        validate(*init);
        start = *init;
        start.p = p;
    } else {
        const FreqStats fstats = freq_stats(fs);
        start.mu = fstats.mean;
        start.sigma = fstats.sd;
    }

    Objective obj;
    obj.arity = 2;
    obj.transforms = {Transform::linear, Transform::log_scale};
    obj.evaluate = [&fs, p, q](const std::vector<double>& v) {
        return detail::disagreement_raw(fs, {v[0], v[1], p}, p, q);
    };
    const MinResult mr = nelder_mead(obj, {start.mu, start.sigma});

    FitResult out;
    out.params = {mr.argmin[0], mr.argmin[1], p};
    out.objective = mr.value;
    out.method = Method::min_disagreement;
    out.converged = mr.converged;
    out.iterations = mr.iterations;
    return out;
}

namespace detail {

inline std::vector<int> normalize_orders(const std::vector<int>& orders, int min_order,
                                         const std::vector<int>& fallback) {
    std::set<int> uniq;
    for (int k : orders) {
        if (k < min_order)
            throw std::invalid_argument("moment orders must be >= " +
                                        std::to_string(min_order) + ", got " +
                                        std::to_string(k));
        uniq.insert(k);
    }
    if (uniq.empty()) uniq.insert(fallback.begin(), fallback.end());
    return {uniq.begin(), uniq.end()};
}

}  // namespace detail

/// Squared relative residual of the raw-moment equations
/// sum X^k Y ~ sum X^k f(X) for the given orders.
inline double moment_residual(const FreqSeries& fs, const GLParams& params,
                              const std::vector<int>& orders) {
    validate(fs);
    validate(params);
    const std::vector<double> f = model_freq(fs, params);
    double total = 0.0;
    for (int k : orders) {
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < fs.x.size(); ++i) {
            const double xk = (k == 0) ? 1.0 : std::pow(fs.x[i], k);
            lhs += xk * fs.y[i];
            rhs += xk * f[i];
        }
        const double r = (lhs - rhs) / std::max(std::fabs(lhs), 1.0);
        total += r * r;
    }
    return total;
}

/// Squared relative residual of the central-moment equations: the mandatory
/// first-moment equation sum XY ~ sum X f, then sum Y (X - Xbar)^k ~
/// sum (X - Xbar)^k f for the given orders, with Xbar the weighted data mean.
inline double central_moment_residual(const FreqSeries& fs, const GLParams& params,
                                      const std::vector<int>& orders) {
    validate(fs);
    validate(params);
    const std::vector<double> f = model_freq(fs, params);
    double wsum = 0.0, xsum = 0.0;
    for (std::size_t i = 0; i < fs.x.size(); ++i) {
        wsum += fs.y[i];
        xsum += fs.x[i] * fs.y[i];
    }
    const double xbar = xsum / wsum;

    double rhs1 = 0.0;
    for (std::size_t i = 0; i < fs.x.size(); ++i) rhs1 += fs.x[i] * f[i];
    double r = (xsum - rhs1) / std::max(std::fabs(xsum), 1.0);
    double total = r * r;

    for (int k : orders) {
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < fs.x.size(); ++i) {
            const double dk = std::pow(fs.x[i] - xbar, k);
            lhs += fs.y[i] * dk;
            rhs += dk * f[i];
        }
        r = (lhs - rhs) / std::max(std::fabs(lhs), 1.0);
        total += r * r;
    }
    return total;
}

namespace detail {

inline FitResult fit_moment_family(const FreqSeries& fs, const GLParams& params0,
                                   std::vector<int> orders, bool fit_p, Method method) {
    validate(fs);
    validate(params0);
    const bool central = (method == Method::central_moments);
    const std::size_t free_params = fit_p ? 3 : 2;
    // The central fit always carries the mandatory first-moment equation.
    const std::size_t n_equations = orders.size() + (central ? 1 : 0);

    auto residual = [&fs, central](const GLParams& params,
                                   const std::vector<int>& ords) {
        return central ? central_moment_residual(fs, params, ords)
                       : moment_residual(fs, params, ords);
    };

    Objective obj;
    obj.arity = static_cast<int>(free_params);
    if (fit_p) {
        obj.transforms = {Transform::linear, Transform::log_scale, Transform::log_scale};
        obj.lower = {-std::numeric_limits<double>::infinity(), 0.0, min_shape};
        obj.upper = {std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity(), max_shape};
        obj.evaluate = [&](const std::vector<double>& v) {
            return residual({v[0], v[1], v[2]}, orders);
        };
    } else {
        obj.transforms = {Transform::linear, Transform::log_scale};
        obj.evaluate = [&](const std::vector<double>& v) {
            return residual({v[0], v[1], params0.p}, orders);
        };
    }

    std::vector<double> init{params0.mu, params0.sigma};
    if (fit_p) init.push_back(params0.p);
    const MinResult mr = nelder_mead(obj, init);

    FitResult out;
    out.params = {mr.argmin[0], mr.argmin[1], fit_p ? mr.argmin[2] : params0.p};
    out.objective = mr.value;
    out.method = method;
    out.converged = mr.converged;
    out.iterations = mr.iterations;
    if (n_equations < free_params)
        out.note = "rank warning: " + std::to_string(n_equations) +
                   " equations for " + std::to_string(free_params) + " free parameters";
    return out;
}

}  // namespace detail

/// Method-of-moments fit on the raw-moment equations (orders default {0,1,2},
/// or {0,1,2,4} when the shape is free). params0 seeds the search and fixes p
/// unless fit_p is set.
inline FitResult fit_moments(const FreqSeries& fs, const GLParams& params0,
                             const std::vector<int>& orders = {}, bool fit_p = false) {
    const auto ords = detail::normalize_orders(
        orders, 0, fit_p ? std::vector<int>{0, 1, 2, 4} : std::vector<int>{0, 1, 2});
    return detail::fit_moment_family(fs, params0, ords, fit_p, Method::moments);
}

/// Central-moment fit: mandatory first-moment equation plus central orders
/// (default {2}, or {2,4} when the shape is free).
inline FitResult fit_central_moments(const FreqSeries& fs, const GLParams& params0,
                                     const std::vector<int>& orders = {},
                                     bool fit_p = false) {
    const auto ords = detail::normalize_orders(
        orders, 2, fit_p ? std::vector<int>{2, 4} : std::vector<int>{2});
    return detail::fit_moment_family(fs, params0, ords, fit_p, Method::central_moments);
}

/// Closed-form population-statistics fit: mu = mean, sigma = sd (n-1), and
/// p from inverting the sample kurtosis when fit_p is set (else p = 2).
inline FitResult fit_population_stats(const Sample& sample, bool fit_p = false) {
    const SampleStats st = stats(sample);
    FitResult out;
    out.params.mu = st.mean;
    out.params.sigma = st.sd;
    out.params.p = fit_p ? kurtosis_to_p(st.kurtosis) : 2.0;
    out.objective = 0.0;
    out.method = Method::population_stats;
    out.converged = true;
    out.iterations = 0;
    return out;
}

/// Base-2 log-likelihood sum log2 pdf(x_i; params).
inline double log2_likelihood(const Sample& sample, const GLParams& params) {
    validate(params);
    const ShapeInfo info(params.p);
    constexpr double ln2 = 0.693147180559945309417232121458176568;
    const double inv_spread = 1.0 / (params.sigma * info.scale());
    double pow_sum = 0.0;
    for (double x : sample.values())
        pow_sum += detail::pow_abs((x - params.mu) * inv_spread, params.p);
    const double n = static_cast<double>(sample.size());
    const double ln_norm_part =
        n * (info.ln_standard_pdf(0.0) - std::log(params.sigma));
    // ln_standard_pdf(0) is the log normalizer since |0|^p = 0.
    return (ln_norm_part - pow_sum) / ln2;
}

/// Maximum-likelihood fit of (mu, sigma) at fixed shape p; the objective field
/// holds the achieved log-2 likelihood (larger is better).
inline FitResult fit_mle(const Sample& sample, double p,
                         std::optional<GLParams> init = std::nullopt) {
    if (!(p >= min_shape) || !(p <= max_shape))
        throw std::domain_error("fit_mle: p outside [" + std::to_string(min_shape) +
                                ", " + std::to_string(max_shape) + "]");
    GLParams start{0.0, 1.0, p};
    if (init.has_value()) {
        validate(*init);
        start = *init;
        start.p = p;
    } else {
        const SampleStats st = stats(sample);
        start.mu = st.mean;
        start.sigma = st.sd;
    }

    Objective obj;
    obj.arity = 2;
    obj.transforms = {Transform::linear, Transform::log_scale};
    obj.evaluate = [&sample, p](const std::vector<double>& v) {
        return -log2_likelihood(sample, {v[0], v[1], p});
    };
    const MinResult mr = nelder_mead(obj, {start.mu, start.sigma});

    FitResult out;
    out.params = {mr.argmin[0], mr.argmin[1], p};
    out.objective = -mr.value;
    out.method = Method::mle;
    out.converged = mr.converged;
    out.iterations = mr.iterations;
    return out;
}

struct ProfilePoint {
    double p = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    double mle = 0.0;
};

/// Likelihood profile over the shape grid plus the quartic-in-log2(p) summary.
/// quartic stores (c4, c3, c2, c1, c0) of MLE ~ sum c_k (log2 p)^k. p_max and
/// mle_max describe the golden-section-refined true profile maximum;
/// poly_p_max is the quartic's own refined maximizer.
struct ProfileCurve {
    std::vector<ProfilePoint> points;
    std::array<double, 5> quartic{};
    double r_squared = 0.0;
    double p_max = 0.0;
    double mle_max = 0.0;
    double poly_p_max = 0.0;
    std::vector<double> failed_p;
};

/// Evenly spaced grid lo, lo+step, ..., capped at hi (inclusive within
/// rounding slack).
inline std::vector<double> make_p_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("make_p_grid: need lo < hi and step > 0");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double v = lo + i * step;
        if (v > hi + 1e-9 * step) break;
        grid.push_back(std::min(v, hi));
    }
    return grid;
}

namespace detail {

// Evaluates the quartic with coefficients (c4..c0) at t.
inline double quartic_eval(const std::array<double, 5>& c, double t) {
    return (((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4];
}

// Least-squares fit of y against 1, t, t^2, t^3, t^4 via the normal equations
// (5x5 Gaussian elimination with partial pivoting). Returns (c4..c0).
inline std::array<double, 5> quartic_fit(const std::vector<double>& t,
                                         const std::vector<double>& y) {
    constexpr int m = 5;
    double a[m][m] = {};
    double b[m] = {};
    for (std::size_t i = 0; i < t.size(); ++i) {
        double powers[2 * m - 1];
        powers[0] = 1.0;
        for (int k = 1; k < 2 * m - 1; ++k) powers[k] = powers[k - 1] * t[i];
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) a[r][c] += powers[r + c];
            b[r] += powers[r] * y[i];
        }
    }
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0)
            throw std::runtime_error("quartic_fit: singular normal equations");
        if (pivot != col) {
            for (int c = 0; c < m; ++c) std::swap(a[col][c], a[pivot][c]);
            std::swap(b[col], b[pivot]);
        }
        for (int r = col + 1; r < m; ++r) {
            const double factor = a[r][col] / a[col][col];
            for (int c = col; c < m; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    double x[m];
    for (int r = m - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < m; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return {x[4], x[3], x[2], x[1], x[0]};
}

}  // namespace detail

/// Runs fit_mle over the grid (warm-starting each point from its predecessor
/// unless disabled), fits the quartic in log2(p), and refines both the
/// polynomial maximizer and the true profile maximizer by golden section over
/// [grid front, grid back]. Points whose fit fails are excluded and listed in
/// failed_p.
inline ProfileCurve mle_profile(const Sample& sample, const std::vector<double>& p_grid,
                                bool warm_start = true) {
    if (p_grid.size() < 6)
        throw std::invalid_argument("mle_profile: grid too short (need at least 6 points, got " +
                                    std::to_string(p_grid.size()) + ")");
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        if (!(p_grid[i] >= min_shape) || !(p_grid[i] <= max_shape))
            throw std::domain_error("mle_profile: grid value outside supported shape range");
        if (i > 0 && !(p_grid[i] > p_grid[i - 1]))
            throw std::invalid_argument("mle_profile: grid must be strictly increasing");
    }

    ProfileCurve curve;
    std::optional<GLParams> carry;
    for (double p : p_grid) {
        FitResult fit;
        bool failed = false;
        try {
            fit = fit_mle(sample, p, warm_start ? carry : std::nullopt);
            failed = !fit.converged;
        } catch (const std::exception&) {
            failed = true;
        }
        if (failed) {
            curve.failed_p.push_back(p);
            continue;
        }
        curve.points.push_back({p, fit.params.mu, fit.params.sigma, fit.objective});
        carry = fit.params;
    }
    if (curve.points.size() < 5)
        throw std::runtime_error("mle_profile: fewer than 5 grid points converged");

    std::vector<double> t, y;
    for (const auto& pt : curve.points) {
        t.push_back(std::log2(pt.p));
        y.push_back(pt.mle);
    }
    curve.quartic = detail::quartic_fit(t, y);

    double y_mean = 0.0;
    for (double v : y) y_mean += v;
    y_mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double fit_y = detail::quartic_eval(curve.quartic, t[i]);
        ss_res += (y[i] - fit_y) * (y[i] - fit_y);
        ss_tot += (y[i] - y_mean) * (y[i] - y_mean);
    }
    curve.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;

    const double lo = p_grid.front(), hi = p_grid.back();

    Objective poly_obj;
    poly_obj.arity = 1;
    poly_obj.evaluate = [&curve](const std::vector<double>& v) {
        return -detail::quartic_eval(curve.quartic, std::log2(v[0]));
    };
    curve.poly_p_max = golden_section(poly_obj, lo, hi, 1e-6).argmin[0];

    // True profile maximum: each probe warm-starts from the nearest grid fit.
    Objective prof_obj;
    prof_obj.arity = 1;
    prof_obj.evaluate = [&sample, &curve](const std::vector<double>& v) {
        const double p = v[0];
        const ProfilePoint* nearest = &curve.points.front();
        for (const auto& pt : curve.points)
            if (std::fabs(pt.p - p) < std::fabs(nearest->p - p)) nearest = &pt;
        const FitResult fit =
            fit_mle(sample, p, GLParams{nearest->mu, nearest->sigma, p});
        return -fit.objective;
    };
    const MinResult refined = golden_section(prof_obj, lo, hi, 1e-4);
    curve.p_max = refined.argmin[0];
    curve.mle_max = -refined.value;
    return curve;
}

}  // namespace glfit
