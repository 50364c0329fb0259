#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace glfit {

/// Per-coordinate search-space tag. log_scale coordinates are optimized as
/// their natural log, so they can never be driven to a nonpositive value.
enum class Transform { linear, log_scale };

/// A scalar objective over `arity` coordinates. Optional box bounds (in user
/// space) and per-coordinate transforms; empty vectors mean none/all-linear.
/// Evaluations outside the bounds, and non-finite evaluations, are treated as
/// +infinity by every minimizer in this header.
struct Objective {
    int arity = 0;
    std::function<double(const std::vector<double>&)> evaluate;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<Transform> transforms;
};

struct MinResult {
    std::vector<double> argmin;
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    int restarts_used = 0;
};

struct NelderMeadOptions {
    double ftol = 1e-10;   // convergence: simplex function spread below this...
    double xtol = 1e-9;    // ...and coordinate spread below this
    int max_iter = 2000;   // per run
    int restarts = 1;      // automatic restarts from the best point found
    // Stagnation certificate: also declare convergence after this many
    // consecutive iterations without a relative improvement above ftol. On
    // non-smooth objectives (cusp minima) the spread criterion is unattainable
    // in double precision even though the search has reached a fixed point.
    int stall_iter = 200;
};

namespace detail {

inline void check_objective(const Objective& obj) {
    if (obj.arity < 1 || !obj.evaluate)
        throw std::invalid_argument("Objective: arity must be >= 1 and evaluate set");
    const auto n = static_cast<std::size_t>(obj.arity);
    if (!obj.lower.empty() && obj.lower.size() != n)
        throw std::invalid_argument("Objective: lower bound size mismatch");
    if (!obj.upper.empty() && obj.upper.size() != n)
        throw std::invalid_argument("Objective: upper bound size mismatch");
    if (!obj.transforms.empty() && obj.transforms.size() != n)
        throw std::invalid_argument("Objective: transforms size mismatch");
}

inline double eval_guarded(const Objective& obj, const std::vector<double>& user) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < user.size(); ++i) {
        if (!obj.lower.empty() && user[i] < obj.lower[i]) return inf;
        if (!obj.upper.empty() && user[i] > obj.upper[i]) return inf;
    }
    const double v = obj.evaluate(user);
    return std::isfinite(v) ? v : inf;
}

}  // namespace detail

/// Nelder-Mead simplex minimizer (reflect 1, expand 2, contract 0.5, shrink
/// 0.5). init is given in user space and must respect the bounds; log_scale
/// coordinates must start positive. `converged` means either the simplex
/// spread fell below (ftol, xtol) or the best value stopped improving for
/// stall_iter iterations (see NelderMeadOptions).
inline MinResult nelder_mead(const Objective& obj, const std::vector<double>& init,
                             const NelderMeadOptions& opt = {}) {
    detail::check_objective(obj);
    const int n = obj.arity;
    if (static_cast<int>(init.size()) != n)
        throw std::invalid_argument("nelder_mead: init size mismatch");
    if (!(opt.ftol > 0.0) || !(opt.xtol > 0.0) || opt.max_iter < 1 ||
        opt.restarts < 0 || opt.stall_iter < 1)
        throw std::invalid_argument("nelder_mead: bad options");

    auto is_log = [&](int i) {
        return !obj.transforms.empty() &&
               obj.transforms[static_cast<std::size_t>(i)] == Transform::log_scale;
    };
    auto to_user = [&](const std::vector<double>& z) {
        std::vector<double> u(z.size());
        for (int i = 0; i < n; ++i)
            u[static_cast<std::size_t>(i)] =
                is_log(i) ? std::exp(z[static_cast<std::size_t>(i)])
                          : z[static_cast<std::size_t>(i)];
        return u;
    };

    std::vector<double> z0(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double v = init[static_cast<std::size_t>(i)];
        if (is_log(i)) {
            if (!(v > 0.0))
                throw std::invalid_argument(
                    "nelder_mead: log_scale coordinate must start positive");
            z0[static_cast<std::size_t>(i)] = std::log(v);
        } else {
            z0[static_cast<std::size_t>(i)] = v;
        }
    }
    for (int i = 0; i < n; ++i) {
        const double v = init[static_cast<std::size_t>(i)];
        if ((!obj.lower.empty() && v < obj.lower[static_cast<std::size_t>(i)]) ||
            (!obj.upper.empty() && v > obj.upper[static_cast<std::size_t>(i)]))
            throw std::invalid_argument("nelder_mead: init violates bounds");
    }

    auto f = [&](const std::vector<double>& z) {
        return detail::eval_guarded(obj, to_user(z));
    };

    MinResult result;
    std::vector<std::vector<double>> simplex;
    std::vector<double> fvals;

    auto build_simplex = [&](const std::vector<double>& center) {
        simplex.assign(1, center);
        for (int i = 0; i < n; ++i) {
            auto vertex = center;
            const double step =
                std::max(0.05 * std::fabs(vertex[static_cast<std::size_t>(i)]), 0.05);
            vertex[static_cast<std::size_t>(i)] += step;
            simplex.push_back(vertex);
        }
        fvals.resize(simplex.size());
        for (std::size_t k = 0; k < simplex.size(); ++k) fvals[k] = f(simplex[k]);
    };

    auto order = [&]() {
        std::vector<std::size_t> idx(simplex.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (std::size_t k : idx) {
            s2.push_back(simplex[k]);
            f2.push_back(fvals[k]);
        }
        simplex.swap(s2);
        fvals.swap(f2);
    };

    auto spread_ok = [&]() {
        if (!(fvals.back() - fvals.front() < opt.ftol)) return false;
        for (int i = 0; i < n; ++i) {
            double lo = simplex[0][static_cast<std::size_t>(i)], hi = lo;
            for (const auto& v : simplex) {
                lo = std::min(lo, v[static_cast<std::size_t>(i)]);
                hi = std::max(hi, v[static_cast<std::size_t>(i)]);
            }
            if (!(hi - lo < opt.xtol)) return false;
        }
        return true;
    };

    std::vector<double> start = z0;
    for (int run = 0; run <= opt.restarts; ++run) {
        build_simplex(start);
        bool converged = false;
        double best_seen = *std::min_element(fvals.begin(), fvals.end());
        int stalled = 0;
        for (int iter = 0; iter < opt.max_iter; ++iter) {
            order();
            if (spread_ok()) {
                converged = true;
                break;
            }
            if (stalled >= opt.stall_iter) {
                converged = true;
                break;
            }
            ++result.iterations;

            std::vector<double> centroid(static_cast<std::size_t>(n), 0.0);
            for (std::size_t k = 0; k + 1 < simplex.size(); ++k)
                for (int i = 0; i < n; ++i)
                    centroid[static_cast<std::size_t>(i)] +=
                        simplex[k][static_cast<std::size_t>(i)];
            for (auto& c : centroid) c /= n;

            auto blend = [&](double coeff, const std::vector<double>& away) {
                std::vector<double> p(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i)
                    p[static_cast<std::size_t>(i)] =
                        centroid[static_cast<std::size_t>(i)] +
                        coeff * (away[static_cast<std::size_t>(i)] -
                                 centroid[static_cast<std::size_t>(i)]);
                return p;
            };

            const auto& worst = simplex.back();
            auto reflected = blend(-1.0, worst);
            const double fr = f(reflected);
            if (fr < fvals.front()) {
                auto expanded = blend(-2.0, worst);
                const double fe = f(expanded);
                if (fe < fr) {
                    simplex.back() = expanded;
                    fvals.back() = fe;
                } else {
                    simplex.back() = reflected;
                    fvals.back() = fr;
                }
            } else if (fr < fvals[fvals.size() - 2]) {
                simplex.back() = reflected;
                fvals.back() = fr;
            } else {
                const bool outside = fr < fvals.back();
                auto contracted = outside ? blend(-0.5, worst) : blend(0.5, worst);
                const double fc = f(contracted);
                if (fc < std::min(fr, fvals.back())) {
                    simplex.back() = contracted;
                    fvals.back() = fc;
                } else {
                    for (std::size_t k = 1; k < simplex.size(); ++k) {
                        for (int i = 0; i < n; ++i)
                            simplex[k][static_cast<std::size_t>(i)] =
                                simplex[0][static_cast<std::size_t>(i)] +
                                0.5 * (simplex[k][static_cast<std::size_t>(i)] -
                                       simplex[0][static_cast<std::size_t>(i)]);
                        fvals[k] = f(simplex[k]);
                    }
                }
            }

            const double best_now = *std::min_element(fvals.begin(), fvals.end());
            if (best_now < best_seen - opt.ftol * std::max(1.0, std::fabs(best_seen))) {
                best_seen = best_now;
                stalled = 0;
            } else {
                ++stalled;
            }
        }
        order();
        result.converged = converged;
        result.restarts_used = run;
        start = simplex.front();
        if (run == opt.restarts) break;
    }

    result.argmin = to_user(simplex.front());
    result.value = fvals.front();
    return result;
}

/// Golden-section search for a 1-D objective on [lo, hi]; stops when the
/// bracket is narrower than tol.
inline MinResult golden_section(const Objective& obj, double lo, double hi, double tol) {
    detail::check_objective(obj);
    if (obj.arity != 1)
        throw std::invalid_argument("golden_section: objective must be 1-D");
    if (!(lo < hi) || !(tol > 0.0))
        throw std::invalid_argument("golden_section: need lo < hi and tol > 0");

    constexpr double invphi = 0.61803398874989484820;
    auto f = [&](double x) { return detail::eval_guarded(obj, {x}); };

    MinResult result;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        ++result.iterations;
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
        if (result.iterations > 500) break;
    }
    const double x = fc < fd ? c : d;
    result.argmin = {x};
    result.value = std::min(fc, fd);
    result.converged = (b - a) <= tol;
    return result;
}

/// One axis of a grid search: `steps` evenly spaced points from lo to hi.
struct GridRange {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 0;
};

/// Exhaustive evaluation over the Cartesian grid. Intended as a slow oracle:
/// guaranteed global argmin over the grid, ties resolved toward the
/// lexicographically smallest coordinate vector.
inline MinResult grid_oracle(const Objective& obj, const std::vector<GridRange>& ranges) {
    detail::check_objective(obj);
    if (static_cast<int>(ranges.size()) != obj.arity)
        throw std::invalid_argument("grid_oracle: one range per coordinate required");
    double total = 1.0;
    for (const auto& r : ranges) {
        if (r.steps < 2 || !(r.lo < r.hi))
            throw std::invalid_argument("grid_oracle: each range needs lo < hi and steps >= 2");
        total *= r.steps;
    }
    if (total > 1e7)
        throw std::length_error("grid_oracle: grid larger than 1e7 points");

    const auto n = ranges.size();
    std::vector<int> idx(n, 0);
    std::vector<double> point(n);
    MinResult result;
    for (;;) {
        for (std::size_t i = 0; i < n; ++i)
            point[i] = ranges[i].lo +
                       (ranges[i].hi - ranges[i].lo) * idx[i] / (ranges[i].steps - 1);
        const double v = detail::eval_guarded(obj, point);
        ++result.iterations;
        if (v < result.value) {
            result.value = v;
            result.argmin = point;
        }
        // Odometer increment, last coordinate fastest: visits points in
        // lexicographic order, so strict improvement keeps the smallest tie.
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < ranges[pos].steps) break;
            idx[pos] = 0;
            if (pos == 0) {
                if (result.argmin.empty())
                    throw std::runtime_error("grid_oracle: no finite value on grid");
                result.converged = true;
                return result;
            }
        }
    }
}

}  // namespace glfit
