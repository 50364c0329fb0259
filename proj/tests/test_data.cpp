#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "glfit/data.hpp"

using namespace glfit;

#ifndef GLFIT_DATA_DIR
#error "GLFIT_DATA_DIR must be defined by the build"
#endif

static const std::string kDataset = std::string(GLFIT_DATA_DIR) + "/pcb_logkow.txt";

TEST_CASE("load_sample parses plain and delimited text") {
    {
        std::istringstream in("3\n1\n2\n");
        const Sample s = load_sample(in);
        CHECK(s.values() == std::vector<double>{1.0, 2.0, 3.0});
    }
    {
        std::istringstream in("4.151; 4.401; 4.421");
        const Sample s = load_sample(in);
        CHECK(s.values() == std::vector<double>{4.151, 4.401, 4.421});
    }
    {
        std::istringstream in("1.5, 2.5,3.5\t4.5");
        CHECK(load_sample(in).size() == 4);
    }
    {
        std::istringstream in("# header comment\n1 2 # trailing\n3\n");
        const Sample s = load_sample(in);
        CHECK(s.values() == std::vector<double>{1.0, 2.0, 3.0});
    }
    {
        // Scientific notation and signs.
        std::istringstream in("-1e-2 +2.5E1 0.75");
        const Sample s = load_sample(in);
        CHECK(s.values() == std::vector<double>{-0.01, 0.75, 25.0});
    }
}

TEST_CASE("load_sample reports malformed input with position") {
    std::istringstream in("1.0 2.0\n3.0 4.x51\n");
    try {
        load_sample(in);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 5);
        CHECK(std::string(e.what()).find("4.x51") != std::string::npos);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::istringstream nan_in("1 2 nan 4");
    CHECK_THROWS_AS(load_sample(nan_in), parse_error);
    std::istringstream short_in("1 2");
    CHECK_THROWS_AS(load_sample(short_in), std::invalid_argument);
    std::istringstream empty_in("# nothing\n");
    CHECK_THROWS_AS(load_sample(empty_in), std::invalid_argument);
}

TEST_CASE("Sample validates and sorts") {
    const Sample s({3.0, 1.0, 2.0});
    CHECK(s.values() == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(s.min() == 1.0);
    CHECK(s.max() == 3.0);
    CHECK_THROWS_AS(Sample({1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(Sample({1.0, 2.0, std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(Sample({1.0, 2.0, std::numeric_limits<double>::infinity()}),
                    std::invalid_argument);
}

TEST_CASE("bundled dataset loads with the documented shape") {
    const Sample s = load_sample_file(kDataset);
    REQUIRE(s.size() == 206);
    CHECK(s.min() == 4.151);
    CHECK(s.max() == 9.603);
    int count_6137 = 0;
    for (double v : s.values())
        if (v == 6.137) ++count_6137;
    CHECK(count_6137 == 5);
    CHECK_THROWS_AS(load_sample_file(kDataset + ".does-not-exist"), std::runtime_error);
}

TEST_CASE("stats matches hand-computed and frozen values") {
    const SampleStats tiny = stats(Sample({1.0, 2.0, 3.0}));
    CHECK(tiny.n == 3);
    CHECK(tiny.mean == Catch::Approx(2.0).epsilon(1e-15));
    CHECK(tiny.sd == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(tiny.sd_mle == Catch::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
    CHECK(tiny.median == 2.0);
    CHECK(tiny.skewness == Catch::Approx(0.0).margin(1e-15));

    const SampleStats even = stats(Sample({1.0, 2.0, 3.0, 10.0}));
    CHECK(even.median == 2.5);

    const SampleStats full = stats(load_sample_file(kDataset));
    CHECK(full.mean == Catch::Approx(6.4805679611650557).epsilon(1e-12));
    CHECK(full.sd == Catch::Approx(0.83076163276881099).epsilon(1e-12));
    CHECK(full.sd_mle == Catch::Approx(0.82874276797952651).epsilon(1e-12));
    CHECK(full.median == Catch::Approx(6.514).epsilon(1e-12));
    CHECK(full.skewness == Catch::Approx(0.24841931326375494).epsilon(1e-10));
    CHECK(full.kurtosis == Catch::Approx(3.7974106555133802).epsilon(1e-10));

    CHECK_THROWS_AS(stats(Sample({5.0, 5.0, 5.0})), std::domain_error);
}

TEST_CASE("stats agrees with an independent accumulation") {
    const Sample s = load_sample_file(kDataset);
    // Independent oracle: long-double Kahan-style accumulation in one pass
    // over the raw definition.
    long double sum = 0.0L;
    for (double x : s.values()) sum += x;
    const long double mean = sum / s.size();
    long double m2 = 0.0L, m3 = 0.0L, m4 = 0.0L;
    for (double x : s.values()) {
        const long double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const long double var = m2 / s.size();
    const SampleStats st = stats(s);
    CHECK(st.mean == Catch::Approx(static_cast<double>(mean)).epsilon(1e-13));
    CHECK(st.sd == Catch::Approx(std::sqrt(static_cast<double>(m2 / (s.size() - 1)))).epsilon(1e-13));
    CHECK(st.skewness ==
          Catch::Approx(static_cast<double>((m3 / s.size()) / std::pow(var, 1.5L))).epsilon(1e-12));
    CHECK(st.kurtosis ==
          Catch::Approx(static_cast<double>((m4 / s.size()) / (var * var))).epsilon(1e-12));
}

TEST_CASE("build_freq distinct mode groups duplicates") {
    const FreqSeries fs = build_freq(Sample({1.0, 1.0, 2.0, 3.0, 3.0, 3.0}), FreqMode::distinct);
    CHECK(fs.x == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(fs.y == std::vector<double>{2.0, 1.0, 3.0});
    CHECK(fs.n_total == 6.0);
    CHECK(fs.cell_width == Catch::Approx(1.0));
    CHECK_NOTHROW(validate(fs));

    const FreqSeries full = build_freq(load_sample_file(kDataset), FreqMode::distinct);
    CHECK(full.x.size() == 148);
    CHECK(full.n_total == 206.0);
    CHECK(full.cell_width == Catch::Approx(0.037088435374149659).epsilon(1e-14));
    CHECK_NOTHROW(validate(full));
}

TEST_CASE("build_freq histogram mode") {
    const FreqSeries fs = build_freq(Sample({0.0, 1.0, 2.0, 3.0}), FreqMode::histogram, 2);
    CHECK(fs.x == std::vector<double>{0.75, 2.25});
    CHECK(fs.y == std::vector<double>{2.0, 2.0});
    CHECK(fs.cell_width == Catch::Approx(1.5));
    CHECK(fs.n_total == 4.0);

    // Empty interior cells are omitted but the weight total is preserved.
    const FreqSeries gap = build_freq(Sample({0.0, 0.1, 10.0}), FreqMode::histogram, 5);
    CHECK(gap.x.size() == 2);
    double total = 0.0;
    for (double w : gap.y) total += w;
    CHECK(total == 3.0);
    CHECK_NOTHROW(validate(gap));

    CHECK(sturges_bins(206) == 9);
    CHECK(sturges_bins(4) == 3);
    const FreqSeries full = build_freq(load_sample_file(kDataset), FreqMode::histogram, 9);
    CHECK(full.cell_width == Catch::Approx((9.603 - 4.151) / 9.0).epsilon(1e-14));
    total = 0.0;
    for (double w : full.y) total += w;
    CHECK(total == 206.0);
    CHECK_NOTHROW(validate(full));

    CHECK_THROWS_AS(build_freq(Sample({0.0, 1.0, 2.0}), FreqMode::histogram), std::invalid_argument);
    CHECK_THROWS_AS(build_freq(Sample({0.0, 1.0, 2.0}), FreqMode::histogram, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_freq(Sample({2.0, 2.0, 2.0}), FreqMode::distinct), std::domain_error);
}

TEST_CASE("validate rejects malformed series") {
    FreqSeries fs{{1.0, 2.0}, {1.0, 1.0}, 2.0, 0.5};
    CHECK_NOTHROW(validate(fs));
    FreqSeries bad = fs;
    bad.x = {2.0, 1.0};
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = fs;
    bad.y[1] = 0.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = fs;
    bad.n_total = 3.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = fs;
    bad.cell_width = 0.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = fs;
    bad.y.pop_back();
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("model_freq matches a from-scratch density evaluation") {
    const FreqSeries fs{{-1.0, 0.0, 0.5, 2.0}, {3.0, 5.0, 4.0, 1.0}, 13.0, 0.25};
    for (double p : {0.7, 1.0, 2.0, 3.5}) {
        CAPTURE(p);
        const GLParams params{0.3, 1.4, p};
        const auto f = model_freq(fs, params);
        REQUIRE(f.size() == fs.x.size());
        // Independent oracle built on std::tgamma rather than the library's
        // log-gamma machinery.
        const double a = std::sqrt(std::tgamma(1.0 / p) / std::tgamma(3.0 / p));
        const double norm = 0.5 * p * std::sqrt(std::tgamma(3.0 / p)) /
                            std::pow(std::tgamma(1.0 / p), 1.5);
        for (std::size_t i = 0; i < fs.x.size(); ++i) {
            const double z = (fs.x[i] - params.mu) / params.sigma;
            const double expected = fs.n_total * fs.cell_width / params.sigma * norm *
                                    std::exp(-std::pow(std::fabs(z) / a, p));
            CHECK(f[i] == Catch::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("model_freq is linear in n_total and cell_width") {
    FreqSeries fs{{-1.0, 0.0, 2.0}, {3.0, 5.0, 2.0}, 10.0, 0.25};
    const GLParams params{0.0, 1.0, 1.5};
    const auto base = model_freq(fs, params);
    FreqSeries doubled = fs;
    for (double& w : doubled.y) w *= 2.0;
    doubled.n_total = 20.0;
    const auto twice = model_freq(doubled, params);
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(twice[i] == Catch::Approx(2.0 * base[i]).epsilon(1e-14));
}

TEST_CASE("histogram model frequencies sum to about n_total") {
    // A fine histogram of a large synthetic normal sample should have model
    // frequencies that nearly integrate the density: sum f ~ n_total.
    const auto draws = sample({0.0, 1.0, 2.0}, 100000, 31415ULL);
    const FreqSeries fs = build_freq(Sample(draws), FreqMode::histogram, 256);
    const auto f = model_freq(fs, {0.0, 1.0, 2.0});
    double total = 0.0;
    for (double v : f) total += v;
    CHECK(total == Catch::Approx(fs.n_total).epsilon(1e-2));
}

TEST_CASE("freq_stats matches the plain sample statistics in distinct mode") {
    const Sample s({1.0, 1.0, 2.0, 3.0, 3.0, 3.0});
    const FreqSeries fs = build_freq(s, FreqMode::distinct);
    const FreqStats ws = freq_stats(fs);
    const SampleStats ss = stats(s);
    CHECK(ws.mean == Catch::Approx(ss.mean).epsilon(1e-14));
    CHECK(ws.sd == Catch::Approx(ss.sd).epsilon(1e-14));
    CHECK(ws.mean == Catch::Approx(13.0 / 6.0).epsilon(1e-14));

    const Sample full = load_sample_file(kDataset);
    const FreqStats wf = freq_stats(build_freq(full, FreqMode::distinct));
    const SampleStats sf = stats(full);
    CHECK(wf.mean == Catch::Approx(sf.mean).epsilon(1e-12));
    CHECK(wf.sd == Catch::Approx(sf.sd).epsilon(1e-12));

    FreqSeries degenerate{{5.0}, {4.0}, 4.0, 1.0};
    CHECK_THROWS_AS(freq_stats(degenerate), std::domain_error);
}
