#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace glfit {

/// Formats x with `digits` significant digits (printf %g semantics).
inline std::string format_sig(double x, int digits) {
    if (digits < 1 || digits > 17)
        throw std::invalid_argument("format_sig: digits must lie in [1, 17]");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    return buf;
}

/// Rounds x to `digits` significant digits: the double a reader of the
/// formatted text would parse back. Keeps every output format (tsv, csv,
/// json) numerically identical.
inline double round_sig(double x, int digits) {
    if (!std::isfinite(x)) return x;
    return std::strtod(format_sig(x, digits).c_str(), nullptr);
}

/// Shortest decimal string that parses back to exactly x.
inline std::string repr_exact(double x) {
    char buf[64];
    for (int digits = 1; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
        if (std::strtod(buf, nullptr) == x) return buf;
    }
    return buf;
}

/// A delimiter-separated report: one header row, data rows, and '#'-prefixed
/// footer lines for summary values.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> footer;
};

inline std::string render_delimited(const Table& table, char delim) {
    std::string out;
    auto emit_row = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out += delim;
            out += cells[i];
        }
        out += '\n';
    };
    emit_row(table.header);
    for (const auto& row : table.rows) emit_row(row);
    for (const auto& line : table.footer) {
        out += "# ";
        out += line;
        out += '\n';
    }
    return out;
}

/// Self-contained SVG polyline chart of y against x (no external assets).
inline std::string svg_line_chart(const std::vector<double>& xs,
                                  const std::vector<double>& ys,
                                  const std::string& title,
                                  const std::string& x_label,
                                  const std::string& y_label) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("svg_line_chart: need >= 2 matched points");
    constexpr double width = 640.0, height = 480.0;
    constexpr double ml = 70.0, mr = 20.0, mt = 40.0, mb = 50.0;
    double x_lo = xs[0], x_hi = xs[0], y_lo = ys[0], y_hi = ys[0];
    for (std::size_t i = 1; i < xs.size(); ++i) {
        x_lo = std::min(x_lo, xs[i]);
        x_hi = std::max(x_hi, xs[i]);
        y_lo = std::min(y_lo, ys[i]);
        y_hi = std::max(y_hi, ys[i]);
    }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (width - ml - mr); };
    auto py = [&](double y) {
        return height - mb - (y - y_lo) / (y_hi - y_lo) * (height - mt - mb);
    };

    char buf[256];
    std::string svg;
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
                  "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                  width, height, width, height);
    svg += buf;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.0f\" y=\"24\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\" font-size=\"16\">%s</text>\n",
                  width / 2.0, title.c_str());
    svg += buf;
    // Axes.
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"black\"/>\n",
                  ml, height - mb, width - mr, height - mb);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"black\"/>\n",
                  ml, mt, ml, height - mb);
    svg += buf;
    // Axis labels and extreme tick values.
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.0f\" y=\"%.0f\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\" font-size=\"13\">%s</text>\n",
                  (ml + width - mr) / 2.0, height - 12.0, x_label.c_str());
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"16\" y=\"%.0f\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\" font-size=\"13\" "
                  "transform=\"rotate(-90 16 %.0f)\">%s</text>\n",
                  (mt + height - mb) / 2.0, (mt + height - mb) / 2.0, y_label.c_str());
    svg += buf;
    const struct { double x, y, vx, vy; } ticks[2] = {
        {ml, height - mb + 18.0, x_lo, y_lo},
        {width - mr, height - mb + 18.0, x_hi, y_hi},
    };
    for (const auto& tk : ticks) {
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" "
                      "font-family=\"sans-serif\" font-size=\"11\">%g</text>\n",
                      tk.x, tk.y, tk.vx);
        svg += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" "
                  "font-family=\"sans-serif\" font-size=\"11\">%g</text>\n",
                  ml - 6.0, height - mb + 4.0, y_lo);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" "
                  "font-family=\"sans-serif\" font-size=\"11\">%g</text>\n",
                  ml - 6.0, mt + 4.0, y_hi);
    svg += buf;
    // Data polyline.
    svg += "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", i ? " " : "", px(xs[i]), py(ys[i]));
        svg += buf;
    }
    svg += "\"/>\n</svg>\n";
    return svg;
}

}  // namespace glfit
