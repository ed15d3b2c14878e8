#include "lorenzband/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "lorenzband/errors.hpp"
#include "lorenzband/rng.hpp"

namespace lorenzband {

namespace {

int worker_count(int requested) {
    int count = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (count < 1) count = 1;
    if (const char* cap = std::getenv("LORENZ_SCB_THREADS")) {
        const int limit = std::atoi(cap);
        if (limit >= 1) count = std::min(count, limit);
    }
    return count;
}

std::vector<CurvePoint> discretize(const PiecewiseCurve& target, int per_segment, int cap) {
    std::vector<CurvePoint> pts;
    const auto& v = target.points;
    pts.reserve(v.size() * static_cast<std::size_t>(per_segment + 1));
    for (std::size_t i = 0; i < v.size(); ++i) {
        pts.push_back(v[i]);
        if (i + 1 >= v.size()) break;
        for (int j = 1; j <= per_segment; ++j) {
            const double t = static_cast<double>(j) / (per_segment + 1);
            pts.push_back({v[i].p + t * (v[i + 1].p - v[i].p), v[i].q + t * (v[i + 1].q - v[i].q)});
        }
    }
    if (cap > 1 && static_cast<int>(pts.size()) > cap) {
        std::vector<CurvePoint> thin;
        thin.reserve(static_cast<std::size_t>(cap));
        const std::size_t last = pts.size() - 1;
        for (int j = 0; j < cap; ++j) {
            const std::size_t idx = static_cast<std::size_t>(
                std::llround(static_cast<double>(j) * last / (cap - 1)));
            thin.push_back(pts[idx]);
        }
        pts = std::move(thin);
    }
    return pts;
}

// one pass deciding both bands; they share geometry and differ only in the
// critical value (d < u, so PCB inside implies SCB inside)
std::pair<bool, bool> covered_pair(const Band& band, double d_crit, double u_crit,
                                   const std::vector<CurvePoint>& pts) {
    bool pcb = true;
    for (const CurvePoint& x : pts) {
        const double g = band_min_g(band, x, pcb ? d_crit : u_crit);
        if (g >= u_crit) return {false, false};
        if (g >= d_crit) pcb = false;
    }
    return {pcb, true};
}

struct ReplicationResult {
    bool pcb = false;
    bool scb = false;
    double u = 0.0;
    double c = 0.0;
};

std::string format_rate(double rate) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3) << rate;
    return out.str();
}

}  // namespace

PiecewiseCurve trim_curve(const PiecewiseCurve& curve, double trim) {
    if (!(trim >= 0.0 && trim < 0.5)) throw Error(ErrorCode::bad_argument, "trim must lie in [0, 0.5)");
    if (trim == 0.0) return curve;
    const double lo = trim;
    const double hi = 1.0 - trim;
    PiecewiseCurve out;
    out.points.push_back(curve.at_abscissa(lo));
    for (const CurvePoint& v : curve.points) {
        if (v.p > lo && v.p < hi) out.points.push_back(v);
    }
    out.points.push_back(curve.at_abscissa(hi));
    return out;
}

bool curve_covered(const Band& band, const PiecewiseCurve& target, int check_grid) {
    if (target.points.empty()) throw Error(ErrorCode::bad_argument, "empty coverage target");
    const auto pts = discretize(target, 4, check_grid);
    for (const CurvePoint& x : pts) {
        if (!band_contains(band, x)) return false;
    }
    return true;
}

CoverageReport run_experiment(const ExperimentSpec& spec) {
    if (spec.replications < 1) throw Error(ErrorCode::bad_argument, "need at least 1 replication");
    if (spec.sample_sizes.empty()) throw Error(ErrorCode::bad_argument, "no sample sizes given");
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
        throw Error(ErrorCode::bad_argument, "alpha must lie in (0,1)");

    Population pop = spec.population.synthetic
                         ? synthetic_population(*spec.population.synthetic, spec.population.synthetic_seed)
                         : load_population(spec.population.csv_path, spec.population.csv_column);
    for (int n : spec.sample_sizes) {
        if (n < 3) throw Error(ErrorCode::bad_argument, "sample sizes must be at least 3");
        if (n > pop.size()) throw Error(ErrorCode::bad_argument, "sample size exceeds population");
    }

    const PiecewiseCurve target = trim_curve(population_lorenz(pop), spec.trim);
    const std::vector<CurvePoint> check_points =
        discretize(target, spec.check_points_per_segment, spec.check_cap);
    const double d_crit = pcb_critical(spec.alpha);

    CoverageReport report;
    report.alpha = spec.alpha;
    report.trim = spec.trim;
    report.replications = spec.replications;
    report.seed = spec.seed;

    const int threads = worker_count(spec.threads);
    for (std::size_t ni = 0; ni < spec.sample_sizes.size(); ++ni) {
        const int n = spec.sample_sizes[ni];
        std::vector<ReplicationResult> results(static_cast<std::size_t>(spec.replications));
        std::atomic<int> cursor{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;

        const auto run_one = [&](int r) {
            const std::uint64_t rep_seed =
                mix_seed(spec.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
            const SampleDraw draw = draw_srswor(pop, n, rep_seed);
            const CurveEstimate est = estimate_points(draw);
            const SigmaPath path = make_sigma_path(draw, est);
            const double c = estimate_C(path, est, spec.c_draws, spec.c_grid,
                                        mix_seed(rep_seed, 0x5cb, 0));
            const double u = scb_critical(c, spec.alpha);
            const Band band = make_band(est, path, BandKind::scb, spec.alpha, u, spec.t_grid);
            const auto [pcb_hit, scb_hit] = covered_pair(band, d_crit, u, check_points);
            results[static_cast<std::size_t>(r)] = {pcb_hit, scb_hit, u, c};
        };

        const auto worker = [&]() {
            while (true) {
                const int r = cursor.fetch_add(1);
                if (r >= spec.replications) return;
                try {
                    run_one(r);
                } catch (const Error& e) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) {
                        failure = std::make_exception_ptr(Error(
                            e.code(), "replication " + std::to_string(r) + " (n=" +
                                          std::to_string(n) + "): " + e.what()));
                    }
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        };

        if (threads == 1 || spec.replications == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(threads));
            for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        if (failure) std::rethrow_exception(failure);

        CoverageCell cell;
        cell.n = n;
        cell.pcb_hits.reserve(results.size());
        cell.scb_hits.reserve(results.size());
        cell.u_values.reserve(results.size());
        double u_sum = 0.0, c_sum = 0.0;
        int pcb_count = 0, scb_count = 0;
        for (const ReplicationResult& res : results) {
            cell.pcb_hits.push_back(res.pcb);
            cell.scb_hits.push_back(res.scb);
            cell.u_values.push_back(res.u);
            u_sum += res.u;
            c_sum += res.c;
            pcb_count += res.pcb ? 1 : 0;
            scb_count += res.scb ? 1 : 0;
        }
        const double R = static_cast<double>(spec.replications);
        cell.pcb_rate = pcb_count / R;
        cell.scb_rate = scb_count / R;
        cell.pcb_se = std::sqrt(cell.pcb_rate * (1.0 - cell.pcb_rate) / R);
        cell.scb_se = std::sqrt(cell.scb_rate * (1.0 - cell.scb_rate) / R);
        cell.mean_u = u_sum / R;
        cell.mean_c = c_sum / R;
        report.cells.push_back(std::move(cell));
    }
    return report;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw Error(ErrorCode::missing_file, path);
    nlohmann::json doc;
    try {
        file >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::bad_argument, std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentSpec spec;
    std::vector<std::string> problems;
    const auto complain = [&](const std::string& msg) { problems.push_back(msg); };

    if (!doc.is_object()) {
        throw Error(ErrorCode::bad_argument, "config root must be a JSON object");
    }

    if (doc.contains("population")) {
        const auto& p = doc["population"];
        if (!p.is_object()) {
            complain("population: must be an object");
        } else if (p.contains("csv")) {
            if (!p["csv"].is_string()) complain("population.csv: must be a string path");
            else spec.population.csv_path = p["csv"].get<std::string>();
            if (p.contains("column")) {
                if (!p["column"].is_string()) complain("population.column: must be a string");
                else spec.population.csv_column = p["column"].get<std::string>();
            }
        } else if (p.contains("generator")) {
            const auto& g = p["generator"];
            if (!g.is_object() || !g.contains("kind") || !g["kind"].is_string()) {
                complain("population.generator: needs a string 'kind'");
            } else {
                const std::string kind = g["kind"].get<std::string>();
                const auto want_number = [&](const char* key, double fallback) {
                    if (!g.contains(key)) return fallback;
                    if (!g[key].is_number()) {
                        complain(std::string("population.generator.") + key + ": must be a number");
                        return fallback;
                    }
                    return g[key].get<double>();
                };
                const int N = g.contains("N") && g["N"].is_number_integer() ? g["N"].get<int>() : 0;
                if (N < 2) complain("population.generator.N: must be an integer >= 2");
                if (kind == "two_class") {
                    spec.population.synthetic = GeneratorSpec::two_class(
                        want_number("fraction", 0.5), want_number("share", 0.25), N);
                } else if (kind == "lognormal") {
                    spec.population.synthetic = GeneratorSpec::lognormal(
                        want_number("mu", 0.0), want_number("sigma", 1.0), N);
                } else {
                    complain("population.generator.kind: must be 'two_class' or 'lognormal'");
                }
            }
            if (p.contains("seed")) {
                if (!p["seed"].is_number_integer()) complain("population.seed: must be an integer");
                else spec.population.synthetic_seed = p["seed"].get<std::uint64_t>();
            }
        } else {
            complain("population: needs either 'csv' or 'generator'");
        }
    } else {
        complain("population: required");
    }

    if (doc.contains("sample_sizes")) {
        if (!doc["sample_sizes"].is_array() || doc["sample_sizes"].empty()) {
            complain("sample_sizes: must be a non-empty array of integers");
        } else {
            for (const auto& v : doc["sample_sizes"]) {
                if (!v.is_number_integer() || v.get<int>() < 3) {
                    complain("sample_sizes: every entry must be an integer >= 3");
                    break;
                }
                spec.sample_sizes.push_back(v.get<int>());
            }
        }
    } else {
        complain("sample_sizes: required");
    }

    const auto read_int = [&](const char* key, int& slot, int lo) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_number_integer() || doc[key].get<int>() < lo) {
            complain(std::string(key) + ": must be an integer >= " + std::to_string(lo));
        } else {
            slot = doc[key].get<int>();
        }
    };
    read_int("replications", spec.replications, 1);
    read_int("t_grid", spec.t_grid, 1);
    read_int("c_grid", spec.c_grid, 4);
    read_int("c_draws", spec.c_draws, 100);
    read_int("check_points_per_segment", spec.check_points_per_segment, 1);
    read_int("check_cap", spec.check_cap, 2);
    read_int("threads", spec.threads, 1);

    if (doc.contains("alpha")) {
        if (!doc["alpha"].is_number() || !(doc["alpha"].get<double>() > 0.0) ||
            !(doc["alpha"].get<double>() < 1.0)) {
            complain("alpha: must be a number in (0,1)");
        } else {
            spec.alpha = doc["alpha"].get<double>();
        }
    }
    if (doc.contains("trim")) {
        if (!doc["trim"].is_number() || doc["trim"].get<double>() < 0.0 ||
            doc["trim"].get<double>() >= 0.5) {
            complain("trim: must be a number in [0, 0.5)");
        } else {
            spec.trim = doc["trim"].get<double>();
        }
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer()) complain("seed: must be an integer");
        else spec.seed = doc["seed"].get<std::uint64_t>();
    }

    static const char* known[] = {"population", "sample_sizes", "replications", "alpha",
                                  "trim",       "seed",         "t_grid",       "c_grid",
                                  "c_draws",    "check_points_per_segment",     "check_cap",
                                  "threads"};
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return key == k; }) == std::end(known)) {
            complain(key + ": unknown key");
        }
    }

    if (!problems.empty()) {
        std::string msg = "config schema violations:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw Error(ErrorCode::bad_argument, msg);
    }
    return spec;
}

std::string report_to_csv(const CoverageReport& report) {
    std::ostringstream out;
    out << "band";
    for (const CoverageCell& cell : report.cells) out << ",n=" << cell.n;
    out << "\npcb";
    for (const CoverageCell& cell : report.cells) out << "," << format_rate(cell.pcb_rate);
    out << "\nscb";
    for (const CoverageCell& cell : report.cells) out << "," << format_rate(cell.scb_rate);
    out << "\n";
    return out.str();
}

std::string report_to_text(const CoverageReport& report) {
    std::ostringstream out;
    out << "coverage rates (alpha=" << report.alpha << ", R=" << report.replications
        << ", trim=" << report.trim << ")\n";
    out << std::left << std::setw(8) << "band";
    for (const CoverageCell& cell : report.cells)
        out << std::right << std::setw(10) << ("n=" + std::to_string(cell.n));
    out << "\n" << std::left << std::setw(8) << "pcb";
    for (const CoverageCell& cell : report.cells)
        out << std::right << std::setw(10) << format_rate(cell.pcb_rate);
    out << "\n" << std::left << std::setw(8) << "scb";
    for (const CoverageCell& cell : report.cells)
        out << std::right << std::setw(10) << format_rate(cell.scb_rate);
    out << "\n" << std::left << std::setw(8) << "mean u";
    for (const CoverageCell& cell : report.cells) {
        std::ostringstream u;
        u << std::fixed << std::setprecision(3) << cell.mean_u;
        out << std::right << std::setw(10) << u.str();
    }
    out << "\n";
    return out.str();
}

std::string report_to_json(const CoverageReport& report) {
    nlohmann::ordered_json doc;
    doc["alpha"] = report.alpha;
    doc["trim"] = report.trim;
    doc["replications"] = report.replications;
    doc["seed"] = report.seed;
    doc["cells"] = nlohmann::ordered_json::array();
    for (const CoverageCell& cell : report.cells) {
        nlohmann::ordered_json c;
        c["n"] = cell.n;
        c["pcb_rate"] = cell.pcb_rate;
        c["scb_rate"] = cell.scb_rate;
        c["pcb_se"] = cell.pcb_se;
        c["scb_se"] = cell.scb_se;
        c["mean_u"] = cell.mean_u;
        c["mean_C"] = cell.mean_c;
        doc["cells"].push_back(std::move(c));
    }
    return doc.dump(2) + "\n";
}

}  // namespace lorenzband
