#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include "glfit/report.hpp"

using namespace glfit;

namespace {

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

}  // namespace

TEST_CASE("format_sig uses significant-digit semantics") {
    CHECK(format_sig(3.14159265, 3) == "3.14");
    CHECK(format_sig(3.14159265, 6) == "3.14159");
    CHECK(format_sig(0.000123456, 3) == "0.000123");
    CHECK(format_sig(123456.0, 3) == "1.23e+05");
    CHECK(format_sig(-2.5, 2) == "-2.5");
    CHECK(format_sig(0.0, 4) == "0");
    CHECK(format_sig(1000.0, 2) == "1e+03");
    CHECK_THROWS_AS(format_sig(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(format_sig(1.0, 18), std::invalid_argument);
}

TEST_CASE("round_sig parses back exactly what format_sig prints") {
    const double xs[] = {3.14159265358979, -0.000271828, 123456.789, 6.4653366,
                         0.9999995, 1e-300, -7.0};
    for (double x : xs)
        for (int digits : {1, 3, 6, 9, 12, 15}) {
            CAPTURE(x, digits);
            const double r = round_sig(x, digits);
            CHECK(r == std::strtod(format_sig(x, digits).c_str(), nullptr));
            // Rounding is idempotent.
            CHECK(round_sig(r, digits) == r);
            // And within half an ulp at the digit budget.
            if (x != 0.0)
                CHECK(std::fabs(r - x) / std::fabs(x) < std::pow(10.0, -digits + 1));
        }
    CHECK(round_sig(0.9999995, 6) == 1.0);
    CHECK(round_sig(6.4653366, 3) == 6.47);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(round_sig(inf, 6) == inf);
    CHECK(std::isnan(round_sig(std::nan(""), 6)));
}

TEST_CASE("repr_exact round-trips doubles through text") {
    const double xs[] = {0.1,
                         1.0 / 3.0,
                         6.4653365904164689,
                         -9.603,
                         1e-17,
                         123456789.123456789,
                         5e-324,
                         std::numeric_limits<double>::max()};
    for (double x : xs) {
        CAPTURE(x);
        CHECK(std::strtod(repr_exact(x).c_str(), nullptr) == x);
    }
    // Short decimals stay short.
    CHECK(repr_exact(0.5) == "0.5");
    CHECK(repr_exact(2.0) == "2");
    CHECK(repr_exact(9.603) == "9.603");
}

TEST_CASE("render_delimited layout") {
    Table table;
    table.header = {"a", "b", "c"};
    table.rows = {{"1", "2", "3"}, {"x", "y", "z"}};
    table.footer = {"note one", "note two"};
    CHECK(render_delimited(table, '\t') ==
          "a\tb\tc\n1\t2\t3\nx\ty\tz\n# note one\n# note two\n");
    CHECK(render_delimited(table, ',') ==
          "a,b,c\n1,2,3\nx,y,z\n# note one\n# note two\n");
    Table bare;
    bare.header = {"only"};
    CHECK(render_delimited(bare, ',') == "only\n");
}

TEST_CASE("svg_line_chart emits a well-formed self-contained chart") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> ys{-371.6, -355.0, -354.2, -360.0};
    const std::string svg = svg_line_chart(xs, ys, "profile", "p", "MLE");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find(">profile<") != std::string::npos);
    CHECK(svg.find(">p<") != std::string::npos);
    CHECK(svg.find(">MLE<") != std::string::npos);
    CHECK(svg.find("http://") == svg.find("http://www.w3.org/2000/svg"));  // no other URLs

    // The polyline carries one "x,y" pair per input point.
    const std::size_t start = svg.find("points=\"");
    REQUIRE(start != std::string::npos);
    const std::size_t end = svg.find('"', start + 8);
    const std::string points = svg.substr(start + 8, end - start - 8);
    CHECK(count_occurrences(points, ",") == xs.size());

    CHECK_THROWS_AS(svg_line_chart({1.0}, {2.0}, "t", "x", "y"), std::invalid_argument);
    CHECK_THROWS_AS(svg_line_chart({1.0, 2.0}, {2.0}, "t", "x", "y"),
                    std::invalid_argument);
}

TEST_CASE("svg_line_chart tolerates degenerate ranges") {
    const std::string svg =
        svg_line_chart({1.0, 2.0, 3.0}, {5.0, 5.0, 5.0}, "flat", "x", "y");
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("nan") == std::string::npos);
    CHECK(svg.find("inf") == std::string::npos);
}
