// glfit: fit the Gauss-Laplace family to observed data.
//
// Subcommands: fit (one estimator run), profile (MLE vs shape with quartic
// summary), grubbs (outlier screening), table2 (full estimator sweep).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "glfit/glfit.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

struct IoOpts {
    std::string input;
    std::string format = "tsv";
    std::string out;
    int precision = 6;
};

void add_io_options(CLI::App* cmd, IoOpts* io) {
    cmd->add_option("--input", io->input, "input data file")->required();
    cmd->add_option("--format", io->format, "output format")
        ->check(CLI::IsMember({"tsv", "csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", io->out, "write output to this file instead of stdout");
    cmd->add_option("--precision", io->precision, "significant digits in output")
        ->check(CLI::Range(1, 17))
        ->capture_default_str();
}

void write_payload(const IoOpts& io, const std::string& payload) {
    if (io.out.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(io.out);
    if (!out) throw std::runtime_error("cannot open output file: " + io.out);
    out << payload;
}

// Numeric cell holding both the rounded value (for json) and its text form
// (for tsv/csv), so every format carries identical numbers.
std::string num_cell(double v, const IoOpts& io) { return glfit::format_sig(v, io.precision); }
double num_json(double v, const IoOpts& io) { return glfit::round_sig(v, io.precision); }

void emit(const IoOpts& io, const glfit::Table& table, const ordered_json& doc) {
    if (io.format == "json") {
        write_payload(io, doc.dump(2) + "\n");
    } else {
        write_payload(io, glfit::render_delimited(table, io.format == "csv" ? ',' : '\t'));
    }
}

struct ScreenResult {
    glfit::Sample sample;
    std::size_t removed = 0;
    std::size_t original_n = 0;
    double alpha = 0.0;
};

ScreenResult maybe_screen(glfit::Sample sample, bool enabled, double alpha) {
    ScreenResult out{sample, 0, sample.size(), alpha};
    if (!enabled) return out;
    auto [clean, reports] = glfit::grubbs_filter(sample, alpha, 100);
    out.sample = clean;
    out.removed = out.original_n - clean.size();
    return out;
}

glfit::QTag parse_qtag(const std::string& text) {
    if (text == "0") return glfit::QTag::zero;
    if (text == "1") return glfit::QTag::one;
    if (text == "p/2") return glfit::QTag::half_p;
    if (text == "p") return glfit::QTag::p;
    throw std::invalid_argument("unknown q tag '" + text + "' (expected 0, 1, p/2, or p)");
}

glfit::FreqSeries make_series(const glfit::Sample& sample, const std::string& mode,
                              std::optional<int> bins) {
    if (mode == "distinct") return glfit::build_freq(sample, glfit::FreqMode::distinct);
    const int nb = bins.value_or(glfit::sturges_bins(sample.size()));
    return glfit::build_freq(sample, glfit::FreqMode::histogram, nb);
}

// ---------------------------------------------------------------- fit ----

struct FitOpts {
    IoOpts io;
    std::string method = "mle";
    double p = 2.0;
    std::string q = "0";
    std::string freq_mode = "distinct";
    std::optional<int> bins;
    bool grubbs = false;
    double alpha = 0.05;
};

int run_fit(const FitOpts& opt) {
    using namespace glfit;
    const ScreenResult screened =
        maybe_screen(load_sample_file(opt.io.input), opt.grubbs, opt.alpha);
    const Sample& data = screened.sample;

    FitResult fit;
    std::string q_label = "-";
    if (opt.method == "mle") {
        fit = fit_mle(data, opt.p);
    } else if (opt.method == "population_stats") {
        fit = fit_population_stats(data);
    } else {
        const FreqSeries fs = make_series(data, opt.freq_mode, opt.bins);
        if (opt.method == "min_disagreement") {
            const QTag q = parse_qtag(opt.q);
            fit = fit_min_disagreement(fs, opt.p, q);
            q_label = qtag_name(q);
        } else {
            const FreqStats ws = freq_stats(fs);
            const GLParams start{ws.mean, ws.sd, opt.p};
            fit = (opt.method == "moments") ? fit_moments(fs, start)
                                            : fit_central_moments(fs, start);
        }
    }

    Table table;
    table.header = {"method", "p", "q", "mu", "sigma", "objective", "converged"};
    table.rows.push_back({method_name(fit.method), num_cell(fit.params.p, opt.io), q_label,
                          num_cell(fit.params.mu, opt.io), num_cell(fit.params.sigma, opt.io),
                          num_cell(fit.objective, opt.io), fit.converged ? "true" : "false"});
    if (opt.grubbs)
        table.footer.push_back("grubbs: removed " + std::to_string(screened.removed) +
                               " of " + std::to_string(screened.original_n) +
                               " values (alpha " + format_sig(opt.alpha, 6) + ")");
    if (!fit.note.empty()) table.footer.push_back(fit.note);

    ordered_json doc;
    doc["config"] = {{"command", "fit"},     {"input", opt.io.input},
                     {"method", opt.method}, {"p", opt.p},
                     {"q", q_label},         {"freq_mode", opt.freq_mode},
                     {"grubbs", opt.grubbs}, {"alpha", opt.alpha},
                     {"precision", opt.io.precision}};
    doc["rows"] = ordered_json::array();
    doc["rows"].push_back({{"method", method_name(fit.method)},
                           {"p", num_json(fit.params.p, opt.io)},
                           {"q", q_label},
                           {"mu", num_json(fit.params.mu, opt.io)},
                           {"sigma", num_json(fit.params.sigma, opt.io)},
                           {"objective", num_json(fit.objective, opt.io)},
                           {"converged", fit.converged}});
    doc["summary"] = {{"converged", fit.converged},
                      {"iterations", fit.iterations},
                      {"grubbs_removed", screened.removed}};
    if (!fit.note.empty()) doc["summary"]["note"] = fit.note;

    emit(opt.io, table, doc);
    return fit.converged ? 0 : 2;
}

// ------------------------------------------------------------ profile ----

struct ProfileOpts {
    IoOpts io;
    std::string p_grid = "1:4:0.25";
    bool grubbs = false;
    double alpha = 0.05;
    bool no_warm_start = false;
    std::string plot;
};

std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    char sep1 = 0, sep2 = 0;
    std::istringstream in(spec);
    if (!(in >> lo >> sep1 >> hi >> sep2 >> step) || sep1 != ':' || sep2 != ':' ||
        !(in >> std::ws).eof())
        throw std::invalid_argument("bad --p-grid spec '" + spec + "' (expected lo:hi:step)");
    return glfit::make_p_grid(lo, hi, step);
}

int run_profile(const ProfileOpts& opt) {
    using namespace glfit;
    const ScreenResult screened =
        maybe_screen(load_sample_file(opt.io.input), opt.grubbs, opt.alpha);
    const std::vector<double> grid = parse_grid(opt.p_grid);
    const ProfileCurve curve = mle_profile(screened.sample, grid, !opt.no_warm_start);

    if (opt.plot == "svg" || opt.plot == "csv") {
        std::vector<double> xs, ys;
        for (const auto& pt : curve.points) {
            xs.push_back(pt.p);
            ys.push_back(pt.mle);
        }
        if (opt.plot == "svg") {
            write_payload(opt.io, svg_line_chart(xs, ys, "MLE profile", "p", "MLE"));
        } else {
            std::string payload = "p,mle\n";
            for (std::size_t i = 0; i < xs.size(); ++i)
                payload += num_cell(xs[i], opt.io) + "," + num_cell(ys[i], opt.io) + "\n";
            write_payload(opt.io, payload);
        }
        return curve.failed_p.empty() ? 0 : 2;
    }

    Table table;
    table.header = {"p", "mu", "sigma", "mle"};
    for (const auto& pt : curve.points)
        table.rows.push_back({num_cell(pt.p, opt.io), num_cell(pt.mu, opt.io),
                              num_cell(pt.sigma, opt.io), num_cell(pt.mle, opt.io)});
    auto foot = [&](const std::string& key, double v) {
        table.footer.push_back(key + " " + num_cell(v, opt.io));
    };
    foot("c4", curve.quartic[0]);
    foot("c3", curve.quartic[1]);
    foot("c2", curve.quartic[2]);
    foot("c1", curve.quartic[3]);
    foot("c0", curve.quartic[4]);
    foot("r_squared", curve.r_squared);
    foot("p_max", curve.p_max);
    foot("mle_max", curve.mle_max);
    foot("poly_p_max", curve.poly_p_max);
    if (!curve.failed_p.empty()) {
        std::string line = "failed_p";
        for (double p : curve.failed_p) line += " " + num_cell(p, opt.io);
        table.footer.push_back(line);
    }
    if (opt.grubbs)
        table.footer.push_back("grubbs: removed " + std::to_string(screened.removed) +
                               " of " + std::to_string(screened.original_n) +
                               " values (alpha " + format_sig(opt.alpha, 6) + ")");

    ordered_json doc;
    doc["config"] = {{"command", "profile"},   {"input", opt.io.input},
                     {"p_grid", opt.p_grid},   {"grubbs", opt.grubbs},
                     {"alpha", opt.alpha},     {"warm_start", !opt.no_warm_start},
                     {"precision", opt.io.precision}};
    doc["rows"] = ordered_json::array();
    for (const auto& pt : curve.points)
        doc["rows"].push_back({{"p", num_json(pt.p, opt.io)},
                               {"mu", num_json(pt.mu, opt.io)},
                               {"sigma", num_json(pt.sigma, opt.io)},
                               {"mle", num_json(pt.mle, opt.io)}});
    doc["summary"] = {{"quartic",
                       {num_json(curve.quartic[0], opt.io), num_json(curve.quartic[1], opt.io),
                        num_json(curve.quartic[2], opt.io), num_json(curve.quartic[3], opt.io),
                        num_json(curve.quartic[4], opt.io)}},
                      {"r_squared", num_json(curve.r_squared, opt.io)},
                      {"p_max", num_json(curve.p_max, opt.io)},
                      {"mle_max", num_json(curve.mle_max, opt.io)},
                      {"poly_p_max", num_json(curve.poly_p_max, opt.io)},
                      {"failed_p", curve.failed_p},
                      {"grubbs_removed", screened.removed}};

    emit(opt.io, table, doc);
    return curve.failed_p.empty() ? 0 : 2;
}

// ------------------------------------------------------------- grubbs ----

struct GrubbsOpts {
    IoOpts io;
    double alpha = 0.05;
    int max_removals = 10;
    std::string emit_clean;
};

int run_grubbs(const GrubbsOpts& opt) {
    using namespace glfit;
    const Sample sample = load_sample_file(opt.io.input);
    const auto [clean, reports] = grubbs_filter(sample, opt.alpha, opt.max_removals);

    Table table;
    table.header = {"round", "n", "suspect", "g_statistic", "critical", "rejected"};
    ordered_json rows = ordered_json::array();
    std::size_t n = sample.size();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const GrubbsReport& r = reports[i];
        table.rows.push_back({std::to_string(i + 1), std::to_string(n),
                              num_cell(r.suspect_value, opt.io),
                              num_cell(r.g_statistic, opt.io), num_cell(r.critical, opt.io),
                              r.rejected ? "true" : "false"});
        rows.push_back({{"round", i + 1},
                        {"n", n},
                        {"suspect", num_json(r.suspect_value, opt.io)},
                        {"g_statistic", num_json(r.g_statistic, opt.io)},
                        {"critical", num_json(r.critical, opt.io)},
                        {"rejected", r.rejected}});
        if (r.rejected) --n;
    }
    table.footer.push_back("removed " + std::to_string(sample.size() - clean.size()) +
                           ", final count " + std::to_string(clean.size()));

    ordered_json doc;
    doc["config"] = {{"command", "grubbs"},
                     {"input", opt.io.input},
                     {"alpha", opt.alpha},
                     {"max_removals", opt.max_removals},
                     {"precision", opt.io.precision}};
    doc["rows"] = rows;
    doc["summary"] = {{"removed", sample.size() - clean.size()},
                      {"final_count", clean.size()}};

    if (!opt.emit_clean.empty()) {
        std::ofstream out(opt.emit_clean);
        if (!out) throw std::runtime_error("cannot open output file: " + opt.emit_clean);
        out << "# cleaned sample: " << clean.size() << " values (grubbs alpha "
            << format_sig(opt.alpha, 6) << ")\n";
        for (double v : clean.values()) out << repr_exact(v) << "\n";
    }

    emit(opt.io, table, doc);
    return 0;
}

// ------------------------------------------------------------- table2 ----

struct Table2Opts {
    IoOpts io;
    bool no_grubbs = false;
    double alpha = 0.05;
    std::string freq_mode = "distinct";
    std::optional<int> bins;
};

int run_table2(const Table2Opts& opt) {
    using namespace glfit;
    const ScreenResult screened =
        maybe_screen(load_sample_file(opt.io.input), !opt.no_grubbs, opt.alpha);
    const Sample& data = screened.sample;
    const FreqSeries fs = make_series(data, opt.freq_mode, opt.bins);

    const std::vector<double> asc = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 6.0};
    std::vector<double> desc(asc.rbegin(), asc.rend());
    const struct {
        QTag q;
        const std::vector<double>* ps;
    } blocks[4] = {{QTag::zero, &asc}, {QTag::one, &desc}, {QTag::half_p, &asc},
                   {QTag::p, &desc}};

    Table table;
    table.header = {"eq", "q", "p", "mu", "sigma", "residues"};
    ordered_json rows = ordered_json::array();
    bool all_converged = true;

    auto push_row = [&](const std::string& eq, const std::string& q, double p, double mu,
                        double sigma, double residues, bool converged) {
        table.rows.push_back({eq, q, num_cell(p, opt.io), num_cell(mu, opt.io),
                              num_cell(sigma, opt.io), num_cell(residues, opt.io)});
        rows.push_back({{"eq", eq},
                        {"q", q},
                        {"p", num_json(p, opt.io)},
                        {"mu", num_json(mu, opt.io)},
                        {"sigma", num_json(sigma, opt.io)},
                        {"residues", num_json(residues, opt.io)}});
        all_converged = all_converged && converged;
    };

    for (const auto& block : blocks)
        for (double p : *block.ps) {
            const FitResult fit = fit_min_disagreement(fs, p, block.q);
            push_row("Eq(1)", qtag_name(block.q), p, fit.params.mu, fit.params.sigma,
                     fit.objective, fit.converged);
        }
    for (double p : {4.0, 3.0, 2.0, 1.0}) {
        const FitResult fit = fit_mle(data, p);
        push_row("Eq(5)", "-", p, fit.params.mu, fit.params.sigma, fit.objective,
                 fit.converged);
    }

    table.footer.push_back(
        "note: Eq(1) residues depend on the frequency-series construction (mode " +
        opt.freq_mode + "); they are not comparable across constructions");
    table.footer.push_back("grubbs screening " +
                           std::string(opt.no_grubbs ? "off" : "on") + "; removed " +
                           std::to_string(screened.removed) + " of " +
                           std::to_string(screened.original_n) + " values");

    ordered_json doc;
    doc["config"] = {{"command", "table2"},       {"input", opt.io.input},
                     {"grubbs", !opt.no_grubbs},  {"alpha", opt.alpha},
                     {"freq_mode", opt.freq_mode}, {"precision", opt.io.precision}};
    doc["rows"] = rows;
    doc["summary"] = {{"grubbs_removed", screened.removed},
                      {"note", "Eq(1) residues depend on the frequency-series construction"}};

    emit(opt.io, table, doc);
    return all_converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"glfit: Gauss-Laplace distribution fitting"};
    app.require_subcommand(1);

    FitOpts fit_opts;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit one estimator to a dataset");
    add_io_options(fit_cmd, &fit_opts.io);
    fit_cmd->add_option("--method", fit_opts.method, "estimation method")
        ->check(CLI::IsMember({"mle", "min_disagreement", "moments", "central_moments",
                               "population_stats"}))
        ->capture_default_str();
    fit_cmd->add_option("--p", fit_opts.p, "GL shape exponent")->capture_default_str();
    fit_cmd->add_option("--q", fit_opts.q, "disagreement denominator exponent tag")
        ->check(CLI::IsMember({"0", "1", "p/2", "p"}))
        ->capture_default_str();
    fit_cmd->add_option("--freq-mode", fit_opts.freq_mode, "frequency-series construction")
        ->check(CLI::IsMember({"distinct", "histogram"}))
        ->capture_default_str();
    fit_cmd->add_option("--bins", fit_opts.bins, "histogram bin count (default Sturges)");
    fit_cmd->add_flag("--grubbs", fit_opts.grubbs, "screen outliers before fitting");
    fit_cmd->add_option("--alpha", fit_opts.alpha, "Grubbs significance level")
        ->capture_default_str();

    ProfileOpts profile_opts;
    CLI::App* profile_cmd =
        app.add_subcommand("profile", "MLE profile over a grid of shape values");
    add_io_options(profile_cmd, &profile_opts.io);
    profile_cmd->add_option("--p-grid", profile_opts.p_grid, "shape grid as lo:hi:step")
        ->capture_default_str();
    profile_cmd->add_flag("--grubbs", profile_opts.grubbs, "screen outliers before fitting");
    profile_cmd->add_option("--alpha", profile_opts.alpha, "Grubbs significance level")
        ->capture_default_str();
    profile_cmd->add_flag("--no-warm-start", profile_opts.no_warm_start,
                          "fit each grid point from the default start");
    profile_cmd->add_option("--plot", profile_opts.plot,
                            "emit plot payload instead of the table")
        ->check(CLI::IsMember({"csv", "svg"}));

    GrubbsOpts grubbs_opts;
    CLI::App* grubbs_cmd = app.add_subcommand("grubbs", "iterative Grubbs outlier screening");
    add_io_options(grubbs_cmd, &grubbs_opts.io);
    grubbs_cmd->add_option("--alpha", grubbs_opts.alpha, "significance level")
        ->capture_default_str();
    grubbs_cmd->add_option("--max-removals", grubbs_opts.max_removals,
                           "removal budget")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    grubbs_cmd->add_option("--emit-clean", grubbs_opts.emit_clean,
                           "write the cleaned sample to this path");

    Table2Opts table2_opts;
    CLI::App* table2_cmd =
        app.add_subcommand("table2", "full estimator sweep (all q blocks plus MLE rows)");
    add_io_options(table2_cmd, &table2_opts.io);
    table2_cmd->add_flag("--no-grubbs", table2_opts.no_grubbs,
                         "skip the default outlier screening");
    table2_cmd->add_option("--alpha", table2_opts.alpha, "Grubbs significance level")
        ->capture_default_str();
    table2_cmd->add_option("--freq-mode", table2_opts.freq_mode,
                           "frequency-series construction")
        ->check(CLI::IsMember({"distinct", "histogram"}))
        ->capture_default_str();
    table2_cmd->add_option("--bins", table2_opts.bins,
                           "histogram bin count (default Sturges)");

    try {
        app.parse(argc, argv);
        if (fit_cmd->parsed()) return run_fit(fit_opts);
        if (profile_cmd->parsed()) return run_profile(profile_opts);
        if (grubbs_cmd->parsed()) return run_grubbs(grubbs_opts);
        if (table2_cmd->parsed()) return run_table2(table2_opts);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
