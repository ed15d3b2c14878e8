#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "lorenzband/band.hpp"
#include "lorenzband/design.hpp"
#include "lorenzband/errors.hpp"
#include "lorenzband/experiment.hpp"
#include "lorenzband/lorenz.hpp"
#include "lorenzband/population.hpp"
#include "lorenzband/rng.hpp"
#include "lorenzband/svg.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int exit_code_for(lorenzband::ErrorCode code) {
    using lorenzband::ErrorCode;
    switch (code) {
        case ErrorCode::missing_file:
        case ErrorCode::missing_column:
        case ErrorCode::non_numeric:
        case ErrorCode::negative_income:
        case ErrorCode::zero_total:
        case ErrorCode::too_few_rows:
            return kExitData;
        case ErrorCode::numerical:
            return kExitNumerical;
        case ErrorCode::bad_argument:
        case ErrorCode::enumeration_cap:
            return kExitUsage;
    }
    return kExitUsage;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw lorenzband::Error(lorenzband::ErrorCode::missing_file, "cannot write " + path);
    out << content;
}

ordered_json points_json(const std::vector<lorenzband::CurvePoint>& points) {
    ordered_json arr = ordered_json::array();
    for (const auto& pt : points) arr.push_back(ordered_json::array({pt.p, pt.q}));
    return arr;
}

std::string kind_name(lorenzband::BandKind kind) {
    return kind == lorenzband::BandKind::pcb ? "pcb" : "scb";
}

int cmd_lorenz(const std::string& input, const std::string& column, const std::string& output,
               const std::string& format) {
    const auto pop = lorenzband::load_population(input, column);
    const auto curve = lorenzband::population_lorenz(pop);
    const double g = lorenzband::gini(curve);

    std::string content;
    if (format == "json") {
        ordered_json doc;
        doc["N"] = pop.size();
        doc["gini"] = g;
        doc["points"] = points_json(curve.points);
        content = doc.dump(2) + "\n";
    } else if (format == "csv") {
        std::string rows = "p,q\n";
        char buf[64];
        for (const auto& pt : curve.points) {
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", pt.p, pt.q);
            rows += buf;
        }
        content = rows;
    } else {
        lorenzband::SvgFigure fig;
        fig.add_frame();
        fig.add_curve(curve.points, "population", "#1f4e8c", 1.5);
        content = fig.str();
    }
    if (output.empty()) {
        std::cout << content;
    } else {
        write_file(output, content);
        std::printf("wrote %s (N=%d, gini=%.6f)\n", output.c_str(), pop.size(), g);
    }
    return 0;
}

int cmd_band(const std::string& input, const std::string& column, const std::string& output,
             const std::string& format, int n, double alpha, const std::string& kind_str,
             std::uint64_t seed, int grid_per_segment, int mc_draws, bool overlay_population) {
    const auto stage = [](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const lorenzband::Error& e) {
            throw lorenzband::Error(e.code(), std::string(name) + ": " + e.what());
        }
    };

    const auto pop = stage("load", [&] { return lorenzband::load_population(input, column); });
    if (n < 3 || n > pop.size())
        throw lorenzband::Error(lorenzband::ErrorCode::bad_argument,
                                "need 3 <= n <= N=" + std::to_string(pop.size()));
    const auto draw = stage("draw", [&] { return lorenzband::draw_srswor(pop, n, seed); });
    const auto est = stage("estimate", [&] { return lorenzband::estimate_points(draw); });
    const auto path = stage("covariance", [&] { return lorenzband::make_sigma_path(draw, est); });

    const lorenzband::BandKind kind =
        kind_str == "pcb" ? lorenzband::BandKind::pcb : lorenzband::BandKind::scb;
    double c_value = 0.0;
    double critical = 0.0;
    if (kind == lorenzband::BandKind::pcb) {
        critical = lorenzband::pcb_critical(alpha);
    } else {
        c_value = stage("adjust", [&] {
            return lorenzband::estimate_C(path, est, mc_draws, 8, lorenzband::mix_seed(seed, 0x5cb, 0));
        });
        critical = lorenzband::scb_critical(c_value, alpha);
    }
    const auto band = stage("band", [&] {
        return lorenzband::make_band(est, path, kind, alpha, critical, grid_per_segment);
    });
    const auto geo = stage("geometry", [&] { return lorenzband::band_geometry(band, 64); });

    std::string content;
    if (format == "json") {
        ordered_json doc;
        doc["kind"] = kind_name(kind);
        doc["alpha"] = alpha;
        doc["n"] = n;
        doc["N"] = pop.size();
        doc["seed"] = seed;
        doc["C"] = c_value;
        doc["critical"] = critical;
        doc["estimate"] = points_json(est.points);
        doc["upper"] = points_json(geo.upper);
        doc["lower"] = points_json(geo.lower);
        ordered_json rings = ordered_json::array();
        for (const auto& ring : geo.ellipses) rings.push_back(points_json(ring));
        doc["ellipses"] = std::move(rings);
        content = doc.dump(2) + "\n";
    } else if (format == "svg") {
        lorenzband::SvgFigure fig;
        fig.add_frame();
        fig.add_rings(geo.ellipses, "band", kind == lorenzband::BandKind::pcb ? "#e8b84b" : "#7db47c",
                      0.35);
        if (overlay_population) {
            const auto pop_curve = lorenzband::population_lorenz(pop);
            fig.add_curve(pop_curve.points, "population", "#1f4e8c", 1.5);
        }
        fig.add_curve(est.points, "estimate", "#b03030", 1.5);
        content = fig.str();
    } else {
        throw lorenzband::Error(lorenzband::ErrorCode::bad_argument,
                                "band output must be json or svg");
    }
    if (output.empty()) {
        std::cout << content;
    } else {
        write_file(output, content);
        std::printf("wrote %s (%s, critical=%.6f, C=%.6f)\n", output.c_str(),
                    kind_name(kind).c_str(), critical, c_value);
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& output, double alpha,
                 bool alpha_set, double trim, bool trim_set, std::uint64_t seed, bool seed_set) {
    auto spec = lorenzband::load_experiment_spec(config_path);
    if (alpha_set) spec.alpha = alpha;
    if (trim_set) spec.trim = trim;
    if (seed_set) spec.seed = seed;

    const auto report = lorenzband::run_experiment(spec);
    std::cout << lorenzband::report_to_text(report);
    if (!output.empty()) {
        std::string base = output;
        for (const char* ext : {".json", ".csv"}) {
            const std::string suffix(ext);
            if (base.size() > suffix.size() &&
                base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0) {
                base.resize(base.size() - suffix.size());
                break;
            }
        }
        write_file(base + ".json", lorenzband::report_to_json(report));
        write_file(base + ".csv", lorenzband::report_to_csv(report));
        std::printf("wrote %s.json and %s.csv\n", base.c_str(), base.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lorenz curve estimation with pointwise and simultaneous confidence bands"};
    app.require_subcommand(1);

    std::string input, output, column = "income";
    std::string format = "json";
    std::string kind = "scb";
    int n = 10;
    double alpha = 0.05;
    double trim = 0.025;
    std::uint64_t seed = 1;
    int grid_per_segment = 16;
    int mc_draws = 200;
    bool overlay_population = false;

    auto* lorenz = app.add_subcommand("lorenz", "Population Lorenz curve and Gini index from a CSV");
    lorenz->add_option("--input", input, "income CSV (header row required)")->required();
    lorenz->add_option("--column", column, "income column name");
    lorenz->add_option("--output", output, "output path (stdout if omitted)");
    lorenz->add_option("--format", format, "json, csv or svg")
        ->check(CLI::IsMember({"json", "csv", "svg"}));

    auto* band = app.add_subcommand("band", "Draw one sample and build a confidence band");
    band->add_option("--input", input, "income CSV (header row required)")->required();
    band->add_option("--column", column, "income column name");
    band->add_option("--output", output, "output path (stdout if omitted)");
    band->add_option("--format", format, "json or svg")->check(CLI::IsMember({"json", "svg"}));
    band->add_option("--n", n, "sample size")->required();
    band->add_option("--alpha", alpha, "confidence level complement")->check(CLI::Range(1e-9, 0.999999));
    band->add_option("--kind", kind, "pcb or scb")->check(CLI::IsMember({"pcb", "scb"}));
    band->add_option("--seed", seed, "sampling seed");
    band->add_option("--grid-per-segment", grid_per_segment, "containment scan density")
        ->check(CLI::PositiveNumber);
    band->add_option("--mc-draws", mc_draws, "Monte Carlo draws per segment for the adjustment");
    band->add_flag("--overlay-population", overlay_population, "overlay the population curve (svg)");

    auto* simulate = app.add_subcommand("simulate", "Run a coverage experiment from a JSON config");
    simulate->add_option("--input", input, "experiment config (JSON)")->required();
    simulate->add_option("--output", output, "report base path (writes .json and .csv)");
    auto* sim_alpha = simulate->add_option("--alpha", alpha, "override config alpha");
    auto* sim_trim = simulate->add_option("--trim", trim, "override config trim");
    auto* sim_seed = simulate->add_option("--seed", seed, "override config seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (lorenz->parsed()) return cmd_lorenz(input, column, output, format);
        if (band->parsed())
            return cmd_band(input, column, output, format, n, alpha, kind, seed, grid_per_segment,
                            mc_draws, overlay_population);
        return cmd_simulate(input, output, alpha, sim_alpha->count() > 0, trim,
                            sim_trim->count() > 0, seed, sim_seed->count() > 0);
    } catch (const lorenzband::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
