#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"
#include "special.hpp"

namespace glfit {

/// Supported shape-exponent range. Below 0.25 the density spike defeats double
/// precision; above 64 the family is numerically indistinguishable from uniform
/// on [mu - sigma*a, mu + sigma*a].
inline constexpr double min_shape = 0.25;
inline constexpr double max_shape = 64.0;

/// Location mu, scale sigma (> 0), shape exponent p. p = 2 is the normal
/// distribution, p = 1 the Laplace; sigma is always the standard deviation.
struct GLParams {
    double mu = 0.0;
    double sigma = 1.0;
    double p = 2.0;
};

inline void validate(const GLParams& params) {
    if (!std::isfinite(params.mu))
        throw std::domain_error("GLParams: mu must be finite");
    if (!std::isfinite(params.sigma) || !(params.sigma > 0.0))
        throw std::domain_error("GLParams: sigma must be finite and positive, got " +
                                std::to_string(params.sigma));
    if (!std::isfinite(params.p) || !(params.p >= min_shape) || !(params.p <= max_shape))
        throw std::domain_error("GLParams: p must lie in [" + std::to_string(min_shape) +
                                ", " + std::to_string(max_shape) + "], got " +
                                std::to_string(params.p));
}

/// Per-shape constants of the unit-variance family, cached so fits do not
/// recompute gamma functions on every density evaluation.
class ShapeInfo {
public:
    explicit ShapeInfo(double p) : p_(p) {
        if (!std::isfinite(p) || !(p >= min_shape) || !(p <= max_shape))
            throw std::domain_error("ShapeInfo: p must lie in [" + std::to_string(min_shape) +
                                    ", " + std::to_string(max_shape) + "], got " +
                                    std::to_string(p));
        const double lg1 = ln_gamma(1.0 / p);
        const double lg3 = ln_gamma(3.0 / p);
        scale_ = std::exp(0.5 * (lg1 - lg3));
        ln_norm_ = std::log(0.5 * p) + 0.5 * lg3 - 1.5 * lg1;
    }

    double p() const { return p_; }

    /// Scale factor a = sqrt(Gamma(1/p) / Gamma(3/p)) that makes the variance 1.
    double scale() const { return scale_; }

    /// Natural log of the unit-variance density at z.
    double ln_standard_pdf(double z) const {
        const double t = std::fabs(z) / scale_;
        double tp;
        if (p_ == 2.0) tp = t * t;
        else if (p_ == 1.0) tp = t;
        else tp = std::pow(t, p_);
        return ln_norm_ - tp;
    }

private:
    double p_;
    double scale_;
    double ln_norm_;
};

/// Density of the unit-variance family at z.
inline double standard_pdf(double z, double p) {
    return std::exp(ShapeInfo(p).ln_standard_pdf(z));
}

/// Density at x under params.
inline double pdf(double x, const GLParams& params) {
    validate(params);
    const ShapeInfo info(params.p);
    return std::exp(info.ln_standard_pdf((x - params.mu) / params.sigma)) / params.sigma;
}

/// Base-2 log density, computed in log space so far tails stay finite.
inline double log2_pdf(double x, const GLParams& params) {
    validate(params);
    const ShapeInfo info(params.p);
    constexpr double ln2 = 0.693147180559945309417232121458176568;
    const double z = (x - params.mu) / params.sigma;
    return (info.ln_standard_pdf(z) - std::log(params.sigma)) / ln2;
}

/// Kurtosis (fourth standardized moment) of the family as a function of p:
/// Gamma(5/p) Gamma(1/p) / Gamma(3/p)^2. Strictly decreasing in p; 6 at the
/// Laplace, 3 at the normal, 1.8 in the p -> infinity flat limit.
inline double kurtosis(double p) {
    if (!std::isfinite(p) || !(p >= min_shape) || !(p <= max_shape))
        throw std::domain_error("kurtosis: p must lie in [" + std::to_string(min_shape) +
                                ", " + std::to_string(max_shape) + "], got " +
                                std::to_string(p));
    return std::exp(ln_gamma(5.0 / p) + ln_gamma(1.0 / p) - 2.0 * ln_gamma(3.0 / p));
}

/// Inverts kurtosis() by bisection. kappa must be attainable within the
/// supported shape range, i.e. in [kurtosis(64), kurtosis(0.25)].
inline double kurtosis_to_p(double kappa) {
    const double k_max = kurtosis(min_shape);
    const double k_min = kurtosis(max_shape);
    if (!std::isfinite(kappa) || kappa < k_min || kappa > k_max)
        throw std::domain_error("kurtosis_to_p: kurtosis " + std::to_string(kappa) +
                                " outside attainable range [" + std::to_string(k_min) +
                                ", " + std::to_string(k_max) + "]");
    double lo = min_shape, hi = max_shape;
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        const double k = kurtosis(mid);
        if (std::fabs(k - kappa) <= 1e-9) return mid;
        if (k > kappa) lo = mid; else hi = mid;
        if (hi - lo <= 1e-13 * std::max(1.0, lo)) break;
    }
    return mid;
}

/// Draws count iid variates. Representation: X = mu + sigma * a * S * G^(1/p)
/// with S a fair sign and G ~ Gamma(1/p, 1). Deterministic for a given seed.
inline std::vector<double> sample(const GLParams& params, std::size_t count,
                                  std::uint64_t seed) {
    validate(params);
    if (count < 1)
        throw std::invalid_argument("sample: count must be at least 1");
    const ShapeInfo info(params.p);
    const double inv_p = 1.0 / params.p;
    Xoshiro256pp rng(seed);
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double g = rng.gamma(inv_p);
        out.push_back(params.mu +
                      params.sigma * info.scale() * sign * std::pow(g, inv_p));
    }
    return out;
}

}  // namespace glfit
