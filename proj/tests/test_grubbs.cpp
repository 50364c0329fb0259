#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "glfit/grubbs.hpp"

using namespace glfit;

#ifndef GLFIT_DATA_DIR
#error "GLFIT_DATA_DIR must be defined by the build"
#endif

static const std::string kDataset = std::string(GLFIT_DATA_DIR) + "/pcb_logkow.txt";

// Fixture with one obvious contaminant; the remaining 7 values keep a positive
// spread so the follow-up round stays well defined.
static Sample contaminated() {
    return Sample({-0.11, -0.07, -0.02, 0.01, 0.04, 0.08, 0.12, 100.0});
}

TEST_CASE("critical values match an independent Student-t computation") {
    struct Row {
        std::size_t n;
        double alpha, crit;
    };
    // Frozen from a reference implementation of
    // ((n-1)/sqrt(n)) * sqrt(t^2 / (n-2+t^2)), t = Q_t(1 - alpha/(2n); n-2).
    const Row rows[] = {
        {7, 0.05, 2.019969},  {8, 0.05, 2.126645},   {10, 0.05, 2.289954},
        {20, 0.05, 2.708246}, {30, 0.05, 2.908473},  {206, 0.05, 3.614381},
        {206, 0.01, 3.986434},
    };
    for (const Row& row : rows) {
        CAPTURE(row.n, row.alpha);
        std::vector<double> xs(row.n);
        for (std::size_t i = 0; i < row.n; ++i) xs[i] = static_cast<double>(i);
        const GrubbsReport rep = grubbs_test(Sample(std::move(xs)), row.alpha);
        CHECK(rep.critical == Catch::Approx(row.crit).margin(1e-5));
        CHECK(rep.alpha == row.alpha);
    }
}

TEST_CASE("an obvious contaminant is detected and removed") {
    const GrubbsReport rep = grubbs_test(contaminated(), 0.05);
    CHECK(rep.g_statistic == Catch::Approx(2.474868).margin(1e-5));
    CHECK(rep.critical == Catch::Approx(2.126645).margin(1e-5));
    CHECK(rep.rejected);
    CHECK(rep.suspect_value == 100.0);
    CHECK(rep.suspect_index == 7);  // sorted position

    const auto [cleaned, reports] = grubbs_filter(contaminated(), 0.05, 10);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].rejected);
    CHECK(reports[0].suspect_value == 100.0);
    CHECK_FALSE(reports[1].rejected);
    CHECK(reports[1].g_statistic == Catch::Approx(1.442970).margin(1e-5));
    CHECK(cleaned.size() == 7);
    CHECK(cleaned.max() == 0.12);
}

TEST_CASE("G statistic is invariant under positive affine maps") {
    const Sample base({1.0, 2.0, 2.5, 3.0, 4.5, 5.0, 9.0});
    const GrubbsReport rep = grubbs_test(base, 0.05);
    std::vector<double> moved;
    for (double x : base.values()) moved.push_back(-7.0 + 3.5 * x);
    const GrubbsReport rep2 = grubbs_test(Sample(std::move(moved)), 0.05);
    CHECK(rep2.g_statistic == Catch::Approx(rep.g_statistic).epsilon(1e-12));
    CHECK(rep2.critical == Catch::Approx(rep.critical).epsilon(1e-12));
    CHECK(rep2.rejected == rep.rejected);
    CHECK(rep2.suspect_index == rep.suspect_index);
}

TEST_CASE("bundled dataset: exactly one value is screened out") {
    const Sample raw = load_sample_file(kDataset);
    const GrubbsReport first = grubbs_test(raw, 0.05);
    CHECK(first.g_statistic == Catch::Approx(3.758517).margin(1e-5));
    CHECK(first.critical == Catch::Approx(3.614381).margin(1e-5));
    CHECK(first.rejected);
    CHECK(first.suspect_value == 9.603);

    const auto [cleaned, reports] = grubbs_filter(raw, 0.05, 10);
    REQUIRE(cleaned.size() == 205);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].rejected);
    CHECK(reports[0].suspect_value == 9.603);
    CHECK_FALSE(reports[1].rejected);
    CHECK(reports[1].g_statistic == Catch::Approx(3.332730).margin(1e-5));
    CHECK(reports[1].critical == Catch::Approx(3.612926).margin(1e-5));
    CHECK(reports[1].suspect_value == 9.143);
    CHECK(cleaned.max() == 9.143);

    // Filtering the cleaned sample again removes nothing.
    const auto [again, reports2] = grubbs_filter(cleaned, 0.05, 10);
    CHECK(again.size() == 205);
    REQUIRE(reports2.size() == 1);
    CHECK_FALSE(reports2[0].rejected);
}

TEST_CASE("critical value is monotone in alpha and in n") {
    std::vector<double> xs(30);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
    const Sample s(std::move(xs));
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha : {0.001, 0.01, 0.05, 0.1, 0.5}) {
        CAPTURE(alpha);
        const double c = grubbs_test(s, alpha).critical;
        CHECK(c < prev);
        prev = c;
    }
    prev = 0.0;
    for (std::size_t n = 7; n <= 60; n += 4) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
        const double c = grubbs_test(Sample(std::move(v)), 0.05).critical;
        CAPTURE(n);
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("tiny alpha screens nothing") {
    const Sample raw = load_sample_file(kDataset);
    const auto [cleaned, reports] = grubbs_filter(raw, 1e-9, 10);
    CHECK(cleaned.size() == 206);
    REQUIRE(reports.size() == 1);
    CHECK_FALSE(reports[0].rejected);
}

TEST_CASE("removal budget truncates the loop") {
    // Two planted contaminants but a budget of one removal.
    const Sample s({0.0, 0.1, -0.1, 0.05, -0.05, 0.02, -0.02, 60.0, 100.0});
    const auto [cleaned, reports] = grubbs_filter(s, 0.05, 1);
    CHECK(cleaned.size() == 8);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].rejected);
    CHECK(reports[0].suspect_value == 100.0);
    CHECK(cleaned.max() == 60.0);
}

TEST_CASE("input validation") {
    const Sample ok({1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0});
    CHECK_THROWS_AS(grubbs_test(ok, 0.0), std::domain_error);
    CHECK_THROWS_AS(grubbs_test(ok, 1.0), std::domain_error);
    CHECK_THROWS_AS(grubbs_test(ok, -0.5), std::domain_error);
    CHECK_THROWS_AS(grubbs_test(Sample({1.0, 2.0, 3.0}), 0.05), std::length_error);
    CHECK_NOTHROW(grubbs_test(Sample({1.0, 2.0, 3.0}), 0.05, 3));
    CHECK_THROWS_AS(grubbs_filter(ok, 0.05, 0), std::length_error);
    CHECK_THROWS_AS(grubbs_test(Sample({5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0}), 0.05),
                    std::domain_error);
}

TEST_CASE("ties resolve to the first sorted position") {
    // Symmetric sample: the two extremes deviate equally; index 0 wins.
    const Sample s({-10.0, -1.0, -0.5, 0.0, 0.5, 1.0, 10.0});
    const GrubbsReport rep = grubbs_test(s, 0.05);
    CHECK(rep.suspect_index == 0);
    CHECK(rep.suspect_value == -10.0);
}
