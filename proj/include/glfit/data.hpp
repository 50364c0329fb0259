#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gl.hpp"

namespace glfit {

/// Parse failure with 1-based source position.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, int line, int column)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// An observed sample: at least 3 finite values, stored sorted ascending.
class Sample {
public:
    explicit Sample(std::vector<double> values) : values_(std::move(values)) {
        if (values_.size() < 3)
            throw std::invalid_argument("Sample: need at least 3 values, got " +
                                        std::to_string(values_.size()));
        for (double v : values_)
            if (!std::isfinite(v))
                throw std::invalid_argument("Sample: values must be finite");
        std::sort(values_.begin(), values_.end());
    }

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double min() const { return values_.front(); }
    double max() const { return values_.back(); }

private:
    std::vector<double> values_;
};

/// Reads numbers separated by whitespace, commas, or semicolons. '#' starts a
/// comment running to end of line. Throws parse_error (with position) on
/// malformed tokens and std::invalid_argument if fewer than 3 values remain.
inline Sample load_sample(std::istream& in) {
    std::vector<double> values;
    std::string token;
    int line = 1, column = 0;
    int tok_line = 1, tok_column = 1;
    bool in_comment = false;

    auto flush = [&]() {
        if (token.empty()) return;
        const char* begin = token.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end != begin + token.size() || !std::isfinite(v))
            throw parse_error("malformed number '" + token + "'", tok_line, tok_column);
        values.push_back(v);
        token.clear();
    };

    char c;
    while (in.get(c)) {
        if (c == '\n') {
            flush();
            in_comment = false;
            ++line;
            column = 0;
            continue;
        }
        ++column;
        if (in_comment) continue;
        if (c == '#') {
            flush();
            in_comment = true;
            continue;
        }
        if (c == ',' || c == ';' || std::isspace(static_cast<unsigned char>(c))) {
            flush();
            continue;
        }
        if (token.empty()) {
            tok_line = line;
            tok_column = column;
        }
        token += c;
    }
    flush();
    return Sample(std::move(values));
}

inline Sample load_sample_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open input file: " + path);
    return load_sample(in);
}

/// Moment summary of a sample. skewness and kurtosis are the standardized
/// central-moment ratios m3 / m2^(3/2) and m4 / m2^2.
struct SampleStats {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;      // (n - 1) denominator
    double sd_mle = 0.0;  // n denominator
    double median = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
};

inline SampleStats stats(const Sample& sample) {
    const auto& xs = sample.values();
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    if (m2 == 0.0)
        throw std::domain_error("stats: degenerate sample (all values equal)");
    const double var = m2 / n;
    SampleStats out;
    out.n = xs.size();
    out.mean = mean;
    out.sd = std::sqrt(m2 / (n - 1.0));
    out.sd_mle = std::sqrt(var);
    const std::size_t half = xs.size() / 2;
    out.median = (xs.size() % 2 == 1) ? xs[half] : 0.5 * (xs[half - 1] + xs[half]);
    out.skewness = (m3 / n) / std::pow(var, 1.5);
    out.kurtosis = (m4 / n) / (var * var);
    return out;
}

/// Frequency series: support points x (strictly increasing), positive weights
/// y, their total, and the measure cell_width each support point represents.
struct FreqSeries {
    std::vector<double> x;
    std::vector<double> y;
    double n_total = 0.0;
    double cell_width = 0.0;
};

enum class FreqMode { distinct, histogram };

inline void validate(const FreqSeries& series) {
    if (series.x.empty() || series.x.size() != series.y.size())
        throw std::invalid_argument("FreqSeries: x and y must be nonempty and equal length");
    for (std::size_t i = 0; i < series.x.size(); ++i) {
        if (!std::isfinite(series.x[i]) || !std::isfinite(series.y[i]))
            throw std::invalid_argument("FreqSeries: entries must be finite");
        if (i > 0 && !(series.x[i] > series.x[i - 1]))
            throw std::invalid_argument("FreqSeries: x must be strictly increasing");
        if (!(series.y[i] > 0.0))
            throw std::invalid_argument("FreqSeries: weights must be positive");
    }
    if (!(series.cell_width > 0.0))
        throw std::invalid_argument("FreqSeries: cell_width must be positive");
    double total = 0.0;
    for (double w : series.y) total += w;
    if (std::fabs(total - series.n_total) > 1e-9 * std::max(1.0, std::fabs(total)))
        throw std::invalid_argument("FreqSeries: n_total does not match sum of weights");
}

/// Default histogram bin count: Sturges' rule ceil(1 + log2 n).
inline int sturges_bins(std::size_t n) {
    return static_cast<int>(std::ceil(1.0 + std::log2(static_cast<double>(n))));
}

/// Builds the frequency series for a sample.
///
/// distinct mode: one support point per distinct value with its multiplicity;
/// cell_width = (max - min) / (n_distinct - 1), i.e. the mean spacing.
///
/// histogram mode: `bins` (>= 2, required) equal-width cells over [min, max],
/// last cell right-inclusive, centers as support points, empty cells omitted;
/// cell_width = (max - min) / bins.
inline FreqSeries build_freq(const Sample& sample, FreqMode mode,
                             std::optional<int> bins = std::nullopt) {
    const auto& xs = sample.values();
    if (!(sample.max() > sample.min()))
        throw std::domain_error("build_freq: degenerate sample (all values equal)");

    FreqSeries out;
    if (mode == FreqMode::distinct) {
        for (double v : xs) {
            if (!out.x.empty() && v == out.x.back()) out.y.back() += 1.0;
            else { out.x.push_back(v); out.y.push_back(1.0); }
        }
        out.cell_width = (sample.max() - sample.min()) /
                         static_cast<double>(out.x.size() - 1);
    } else {
        if (!bins.has_value())
            throw std::invalid_argument("build_freq: histogram mode requires a bin count");
        const int nb = *bins;
        if (nb < 2)
            throw std::invalid_argument("build_freq: need at least 2 bins, got " +
                                        std::to_string(nb));
        const double lo = sample.min();
        const double width = (sample.max() - lo) / nb;
        std::vector<double> counts(static_cast<std::size_t>(nb), 0.0);
        for (double v : xs) {
            int idx = static_cast<int>((v - lo) / width);
            idx = std::clamp(idx, 0, nb - 1);
            counts[static_cast<std::size_t>(idx)] += 1.0;
        }
        for (int i = 0; i < nb; ++i) {
            if (counts[static_cast<std::size_t>(i)] == 0.0) continue;
            out.x.push_back(lo + (i + 0.5) * width);
            out.y.push_back(counts[static_cast<std::size_t>(i)]);
        }
        out.cell_width = width;
    }
    out.n_total = static_cast<double>(xs.size());
    return out;
}

/// Expected frequencies under params: n_total * cell_width * pdf(x_i).
inline std::vector<double> model_freq(const FreqSeries& series, const GLParams& params) {
    validate(series);
    validate(params);
    const ShapeInfo info(params.p);
    std::vector<double> out;
    out.reserve(series.x.size());
    const double base = std::log(series.n_total * series.cell_width / params.sigma);
    for (double x : series.x)
        out.push_back(std::exp(base + info.ln_standard_pdf((x - params.mu) / params.sigma)));
    return out;
}

/// Weighted mean and standard deviation of a frequency series, treating each
/// weight as a multiplicity (the sd uses a (sum(y) - 1) denominator).
struct FreqStats {
    double mean = 0.0;
    double sd = 0.0;
};

inline FreqStats freq_stats(const FreqSeries& series) {
    validate(series);
    double wsum = 0.0, xsum = 0.0;
    for (std::size_t i = 0; i < series.x.size(); ++i) {
        wsum += series.y[i];
        xsum += series.y[i] * series.x[i];
    }
    const double mean = xsum / wsum;
    double ss = 0.0;
    for (std::size_t i = 0; i < series.x.size(); ++i) {
        const double d = series.x[i] - mean;
        ss += series.y[i] * d * d;
    }
    if (!(wsum > 1.0) || ss == 0.0)
        throw std::domain_error("freq_stats: degenerate series");
    return {mean, std::sqrt(ss / (wsum - 1.0))};
}

}  // namespace glfit
