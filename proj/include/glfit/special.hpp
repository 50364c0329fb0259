#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace glfit {

inline constexpr double pi = 3.141592653589793238462643383279502884;

namespace detail {

// Lanczos approximation, g = 7, 9 coefficients. Valid for x >= 0.5.
inline double ln_gamma_lanczos(double x) {
    static constexpr double g = 7.0;
    static constexpr double coef[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    const double z = x - 1.0;
    double sum = coef[0];
    for (int k = 1; k < 9; ++k) sum += coef[k] / (z + k);
    const double base = z + g + 0.5;
    return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(base) - base + std::log(sum);
}

}  // namespace detail

/// Natural log of the gamma function for x > 0.
inline double ln_gamma(double x) {
    if (!std::isfinite(x) || x <= 0.0)
        throw std::domain_error("ln_gamma: argument must be finite and positive, got " +
                                std::to_string(x));
    if (x < 0.5) {
        // Reflection keeps the Lanczos series on its accurate branch.
        return std::log(pi / std::sin(pi * x)) - detail::ln_gamma_lanczos(1.0 - x);
    }
    return detail::ln_gamma_lanczos(x);
}

/// Gamma function for x > 0.
inline double gamma_fn(double x) { return std::exp(ln_gamma(x)); }

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 500;
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) return h;
    }
    throw std::runtime_error("reg_inc_beta: continued fraction failed to converge");
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in [0, 1].
inline double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("reg_inc_beta: shape parameters must be positive");
    if (!(x >= 0.0) || !(x <= 1.0))
        throw std::domain_error("reg_inc_beta: x must lie in [0, 1], got " + std::to_string(x));
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    // Use whichever tail the continued fraction converges fastest on.
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::beta_cf(a, b, x) / a;
    return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// Inverse of reg_inc_beta in x: finds x with I_x(a, b) = prob.
inline double inv_reg_inc_beta(double a, double b, double prob) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("inv_reg_inc_beta: shape parameters must be positive");
    if (!(prob >= 0.0) || !(prob <= 1.0))
        throw std::domain_error("inv_reg_inc_beta: prob must lie in [0, 1]");
    if (prob == 0.0) return 0.0;
    if (prob == 1.0) return 1.0;
    const double ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    double lo = 0.0, hi = 1.0;
    double x = 0.5;
    for (int iter = 0; iter < 100; ++iter) {
        const double err = reg_inc_beta(a, b, x) - prob;
        if (std::fabs(err) < 1e-14) break;
        if (err > 0.0) hi = x; else lo = x;
        // Newton step off the beta density; fall back to bisection when it escapes.
        const double ln_pdf = (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - ln_beta;
        double next = x - err / std::exp(ln_pdf);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - x) < 1e-16) { x = next; break; }
        x = next;
    }
    return x;
}

/// CDF of Student's t distribution with df degrees of freedom.
inline double student_t_cdf(double t, double df) {
    if (!(df > 0.0))
        throw std::domain_error("student_t_cdf: df must be positive, got " + std::to_string(df));
    if (!std::isfinite(t)) return t > 0.0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double tail = 0.5 * reg_inc_beta(0.5 * df, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

/// Quantile of Student's t distribution: returns t with CDF(t) = prob.
inline double student_t_quantile(double prob, double df) {
    if (!(df > 0.0))
        throw std::domain_error("student_t_quantile: df must be positive");
    if (!(prob > 0.0) || !(prob < 1.0))
        throw std::domain_error("student_t_quantile: prob must lie in (0, 1), got " +
                                std::to_string(prob));
    if (prob == 0.5) return 0.0;
    if (prob < 0.5) return -student_t_quantile(1.0 - prob, df);

    // Bracket the root, then polish with safeguarded Newton (bisection fallback).
    double lo = 0.0, hi = 1.0;
    while (student_t_cdf(hi, df) < prob) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("student_t_quantile: bracket expansion failed");
    }
    const double ln_norm = ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df) -
                           0.5 * std::log(df * pi);
    double t = 0.5 * (lo + hi);
    for (int iter = 0; iter < 100; ++iter) {
        const double err = student_t_cdf(t, df) - prob;
        if (err > 0.0) hi = t; else lo = t;
        const double ln_pdf = ln_norm - 0.5 * (df + 1.0) * std::log1p(t * t / df);
        double next = t - err / std::exp(ln_pdf);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - t) <= 1e-12 * std::max(1.0, std::fabs(t)) &&
            std::fabs(err) < 1e-14) {
            t = next;
            break;
        }
        t = next;
    }
    return t;
}

}  // namespace glfit
