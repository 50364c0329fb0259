#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "data.hpp"
#include "special.hpp"

namespace glfit {

/// One round of the two-sided Grubbs test.
struct GrubbsReport {
    double g_statistic = 0.0;
    double critical = 0.0;
    double suspect_value = 0.0;
    std::size_t suspect_index = 0;  // position in the sorted sample
    double alpha = 0.0;
    bool rejected = false;
};

/// Two-sided Grubbs test: G = max |x_i - mean| / sd against the critical value
/// ((n-1)/sqrt(n)) * sqrt(t^2 / (n - 2 + t^2)) with t the upper
/// (1 - alpha/(2n)) Student-t quantile at n-2 degrees of freedom.
inline GrubbsReport grubbs_test(const Sample& sample, double alpha,
                                std::size_t min_n = 7) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("grubbs_test: alpha must lie in (0, 1)");
    const std::size_t n = sample.size();
    if (n < min_n)
        throw std::length_error("grubbs_test: need at least " + std::to_string(min_n) +
                                " values, got " + std::to_string(n));
    const SampleStats st = stats(sample);  // throws on zero variance

    const auto& xs = sample.values();
    std::size_t suspect = 0;
    double max_dev = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = std::fabs(xs[i] - st.mean);
        if (dev > max_dev) {
            max_dev = dev;
            suspect = i;
        }
    }

    const double nd = static_cast<double>(n);
    const double t = student_t_quantile(1.0 - alpha / (2.0 * nd), nd - 2.0);
    GrubbsReport report;
    report.g_statistic = max_dev / st.sd;
    report.critical = ((nd - 1.0) / std::sqrt(nd)) * std::sqrt(t * t / (nd - 2.0 + t * t));
    report.suspect_value = xs[suspect];
    report.suspect_index = suspect;
    report.alpha = alpha;
    report.rejected = report.g_statistic > report.critical;
    return report;
}

/// Iterative screening: repeatedly tests and removes the suspect while the
/// test rejects, up to max_removals. Returns the cleaned sample and every
/// round's report (the last one non-rejecting unless the removal budget or
/// size floor stopped the loop).
inline std::pair<Sample, std::vector<GrubbsReport>> grubbs_filter(
    const Sample& sample, double alpha, int max_removals, std::size_t min_n = 7) {
    if (max_removals < 1)
        throw std::length_error("grubbs_filter: max_removals must be at least 1");
    std::vector<double> values = sample.values();
    std::vector<GrubbsReport> reports;
    int removals = 0;
    while (values.size() >= min_n) {
        const GrubbsReport report = grubbs_test(Sample(values), alpha, min_n);
        reports.push_back(report);
        if (!report.rejected) break;
        values.erase(values.begin() + static_cast<std::ptrdiff_t>(report.suspect_index));
        ++removals;
        if (removals == max_removals) break;
    }
    return {Sample(std::move(values)), std::move(reports)};
}

}  // namespace glfit
