// Acceptance gate: one self-contained check per shipped guarantee. Each
// prints a single [PASS]/[FAIL] line; the binary exits nonzero if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lorenzband/band.hpp"
#include "lorenzband/design.hpp"
#include "lorenzband/experiment.hpp"
#include "lorenzband/linearize.hpp"
#include "lorenzband/lorenz.hpp"
#include "lorenzband/population.hpp"
#include "lorenzband/rng.hpp"

using namespace lorenzband;

namespace {

double rel_diff(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-30});
    return std::abs(a - b) / scale;
}

SampleDraw lognormal_sample(int N, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> y(static_cast<std::size_t>(N));
    for (double& v : y) v = std::exp(rng.normal());
    const auto pop = Population::from_incomes(std::move(y));
    return draw_srswor(pop, n, seed ^ 0x9e37ULL);
}

bool run_shell(const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool gini_fixtures(std::string& detail) {
    const auto red = synthetic_population(GeneratorSpec::two_class(0.75, 0.25, 1000), 0);
    const auto blue = synthetic_population(GeneratorSpec::two_class(0.5, 0.0, 1000), 0);
    const double g_red = gini(population_lorenz(red));
    const double g_blue = gini(population_lorenz(blue));
    std::ostringstream out;
    out << "gini(0.75,0.25)=" << g_red << " gini(0.5,0.0)=" << g_blue;
    detail = out.str();
    return std::abs(g_red - 0.5) <= 1e-12 && std::abs(g_blue - 0.5) <= 1e-12;
}

bool critical_values(std::string& detail) {
    const double d = pcb_critical(0.05);
    const double u0 = scb_critical(0.0, 0.05);
    std::ostringstream out;
    out << "pcb=" << d << " scb(C=0)=" << u0;
    detail = out.str();
    return std::abs(d - 5.991) <= 0.001 && std::abs(u0 - d) <= 1e-9;
}

bool variance_equivalence(std::string& detail) {
    Rng rng(404);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const int N = 4 + static_cast<int>(rng.uniform_below(197));
        const int n = 2 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(N - 1)));
        const auto s = lognormal_sample(N, n, rng.next_u64());
        std::vector<double> z(static_cast<std::size_t>(n));
        for (double& v : z) v = rng.normal();
        const auto [pi1, pi2] = inclusion_probs(N, n);
        const double a = variance_srswor(s, z);
        const double b = variance_general(s, z, pi1, pi2);
        worst = std::max(worst, rel_diff(a, b));
    }
    std::ostringstream out;
    out << "worst relative gap " << worst;
    detail = out.str();
    return worst <= 1e-10;
}

bool diagonal_consistency(std::string& detail) {
    Rng rng(505);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int N = 10 + static_cast<int>(rng.uniform_below(111));
        const int hi = std::min(30, N);
        const int n = 4 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(hi - 3)));
        const auto s = lognormal_sample(N, n, rng.next_u64());
        const auto est = estimate_points(s);
        for (int k = 1; k <= s.n - 1; ++k) {
            const auto z = linearized_vars(s, est, k);
            const auto block = covariance_block(s, est, k);
            worst = std::max(worst, rel_diff(block.m00, variance_srswor(s, z.z1)));
            worst = std::max(worst, rel_diff(block.m11, variance_srswor(s, z.z2)));
        }
    }
    std::ostringstream out;
    out << "worst relative gap " << worst;
    detail = out.str();
    return worst <= 1e-10;
}

bool ht_unbiasedness(std::string& detail) {
    const auto pop = Population::from_incomes({2, 3, 5, 7, 11, 13});
    const auto curve = population_lorenz(pop);
    const int N = pop.size();
    const int n = 3;
    double worst = 0.0;
    for (int k = 1; k <= 5; ++k) {
        for (int h = 1; h <= 2; ++h) {
            std::vector<double> z(static_cast<std::size_t>(N));
            const double lk = h == 1 ? curve.points[static_cast<std::size_t>(k)].p
                                     : curve.points[static_cast<std::size_t>(k)].q;
            const double yk = pop.y[static_cast<std::size_t>(k) - 1];
            for (int i = 0; i < N; ++i) {
                const double ind = pop.y[static_cast<std::size_t>(i)] <= yk ? 1.0 : 0.0;
                z[static_cast<std::size_t>(i)] =
                    h == 1 ? (ind - lk) / N
                           : pop.y[static_cast<std::size_t>(i)] * (ind - lk) / pop.total;
            }
            double mean_total = 0.0, mean_sq = 0.0, mean_est = 0.0;
            int count = 0;
            enumerate_samples(N, n, [&](const std::vector<int>& units) {
                const auto s = sample_from_units(pop, units);
                std::vector<double> zs;
                zs.reserve(units.size());
                double total = 0.0;
                for (int id : s.unit_ids) {
                    zs.push_back(z[static_cast<std::size_t>(id)]);
                    total += (static_cast<double>(N) / n) * z[static_cast<std::size_t>(id)];
                }
                mean_total += total;
                mean_sq += total * total;
                mean_est += variance_srswor(s, zs);
                ++count;
            });
            if (count != 20) return false;
            mean_total /= count;
            mean_sq /= count;
            mean_est /= count;
            const double exact = mean_sq - mean_total * mean_total;
            worst = std::max(worst, rel_diff(mean_est, exact));
        }
    }
    std::ostringstream out;
    out << "20 samples, worst relative gap " << worst;
    detail = out.str();
    return worst <= 1e-9;
}

bool linearization_matches_fd(std::string& detail) {
    Rng rng(606);
    double worst = 0.0;
    for (int checked = 0; checked < 500; ++checked) {
        const int n = 4 + static_cast<int>(rng.uniform_below(16));
        const auto s = lognormal_sample(60, n, rng.next_u64());
        const auto est = estimate_points(s);
        const int k = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(s.n)));
        const int i = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(s.n)));
        const auto z = linearized_vars(s, est, k);
        worst = std::max(worst, std::abs(finite_diff_oracle(s, k, 1, i, 1e-4) -
                                         z.z1[static_cast<std::size_t>(i)]));
        worst = std::max(worst, std::abs(finite_diff_oracle(s, k, 2, i, 1e-4) -
                                         z.z2[static_cast<std::size_t>(i)]));
    }
    std::ostringstream out;
    out << "500 triples, worst absolute gap " << worst;
    detail = out.str();
    return worst <= 1e-6;
}

bool pointwise_chi_square(std::string& detail) {
    const auto s = lognormal_sample(150, 20, 53);
    const auto est = estimate_points(s);
    const auto path = make_sigma_path(s, est);
    const double t = 7.3;
    const Mat2 sigma = regularize(path.sigma_at(t), path.ridge, path.floor);
    const Mat2 inv = path.sigma_inv_at(t);
    const double l00 = std::sqrt(sigma.m00);
    const double l10 = sigma.m10 / l00;
    const double l11 = std::sqrt(sigma.m11 - l10 * l10);

    const int draws = 100000;
    std::vector<double> g(static_cast<std::size_t>(draws));
    Rng rng(617);
    for (double& v : g) {
        const double z0 = rng.normal();
        const double z1 = rng.normal();
        const Vec2 d{l00 * z0, l10 * z0 + l11 * z1};
        v = quad_form(inv, d);
    }
    std::sort(g.begin(), g.end());
    double ks = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double f = 1.0 - std::exp(-0.5 * g[static_cast<std::size_t>(i)]);
        ks = std::max({ks, std::abs(f - static_cast<double>(i) / draws),
                       std::abs(f - static_cast<double>(i + 1) / draws)});
    }
    std::ostringstream out;
    out << "KS distance " << ks << " at " << draws << " draws";
    detail = out.str();
    return ks < 0.02;
}

bool nesting(std::string& detail) {
    Rng rng(707);
    long inside_total = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const int N = 50 + static_cast<int>(rng.uniform_below(251));
        const int n = 4 + static_cast<int>(rng.uniform_below(27));
        const auto s = lognormal_sample(N, n, rng.next_u64());
        const auto est = estimate_points(s);
        const auto path = make_sigma_path(s, est);
        const double d = pcb_critical(0.05);
        const double C = estimate_C(path, est, 200, 8, rng.next_u64());
        const double u = scb_critical(C, 0.05);
        if (!(u >= d)) {
            detail = "critical ordering violated";
            return false;
        }
        const auto pcb = make_band(est, path, BandKind::pcb, 0.05, d);
        const auto scb = make_band(est, path, BandKind::scb, 0.05, u);
        for (int i = 0; i < 200; ++i) {
            for (int j = 0; j < 200; ++j) {
                const CurvePoint x{i / 199.0, j / 199.0};
                if (band_contains(pcb, x)) {
                    ++inside_total;
                    if (!band_contains(scb, x)) {
                        std::ostringstream out;
                        out << "point (" << x.p << ", " << x.q << ") escapes the wider band";
                        detail = out.str();
                        return false;
                    }
                }
            }
        }
    }
    std::ostringstream out;
    out << "50 samples, 200x200 lattice, " << inside_total << " nested points";
    detail = out.str();
    return inside_total > 0;
}

bool coverage_desk_scale(std::string& detail) {
    ExperimentSpec spec;
    spec.population.synthetic = GeneratorSpec::lognormal(0.0, 1.0, 2000);
    spec.population.synthetic_seed = 20;
    spec.sample_sizes = {10, 100};
    spec.replications = 200;
    spec.alpha = 0.05;
    spec.trim = 0.025;
    spec.seed = 1;
    const auto report = run_experiment(spec);
    std::ostringstream out;
    bool ok = report.cells.size() == 2;
    for (const CoverageCell& cell : report.cells) {
        out << "n=" << cell.n << ": pcb=" << cell.pcb_rate << " scb=" << cell.scb_rate << "  ";
        ok = ok && cell.scb_rate >= 0.91 && cell.scb_rate <= 0.99 && cell.pcb_rate < cell.scb_rate;
    }
    detail = out.str();
    return ok;
}

bool u_trend(std::string& detail) {
    const auto pop = synthetic_population(GeneratorSpec::lognormal(0.0, 1.0, 2000), 20);
    std::vector<double> means;
    std::ostringstream out;
    for (int n : {10, 100, 500}) {
        double sum = 0.0;
        for (int r = 0; r < 50; ++r) {
            const std::uint64_t rep_seed =
                mix_seed(7, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
            const auto draw = draw_srswor(pop, n, rep_seed);
            const auto est = estimate_points(draw);
            const auto path = make_sigma_path(draw, est);
            const double C = estimate_C(path, est, 200, 8, mix_seed(rep_seed, 0x5cb, 0));
            sum += scb_critical(C, 0.05);
        }
        means.push_back(sum / 50.0);
        out << "n=" << n << ": mean u=" << means.back() << "  ";
    }
    detail = out.str();
    bool ok = means[0] < means[1] && means[1] < means[2];
    for (double m : means) ok = ok && m > 5.991 && m < 30.0;
    return ok;
}

bool determinism(std::string& detail) {
    const std::string data = std::string(TEST_DATA_DIR) + "/incomes_small.csv";
    const std::string bin = CLI_BIN;
    bool ok = true;

    ok = ok && run_shell(bin + " band --input " + data +
                         " --n 6 --seed 7 --kind scb --output /tmp/lb_acc_b1.json");
    ok = ok && run_shell(bin + " band --input " + data +
                         " --n 6 --seed 7 --kind scb --output /tmp/lb_acc_b2.json");
    ok = ok && slurp("/tmp/lb_acc_b1.json") == slurp("/tmp/lb_acc_b2.json") &&
         !slurp("/tmp/lb_acc_b1.json").empty();

    std::ofstream cfg("/tmp/lb_acc_cfg.json");
    cfg << R"({"population": {"generator": {"kind": "lognormal", "mu": 0.0, "sigma": 1.0, "N": 60}, "seed": 4},
               "sample_sizes": [6], "replications": 3, "c_draws": 100, "c_grid": 4, "seed": 12})";
    cfg.close();
    ok = ok && run_shell(bin + " simulate --input /tmp/lb_acc_cfg.json --output /tmp/lb_acc_r1");
    ok = ok && run_shell(bin + " simulate --input /tmp/lb_acc_cfg.json --output /tmp/lb_acc_r2");
    ok = ok && slurp("/tmp/lb_acc_r1.json") == slurp("/tmp/lb_acc_r2.json") &&
         !slurp("/tmp/lb_acc_r1.json").empty();
    ok = ok && slurp("/tmp/lb_acc_r1.csv") == slurp("/tmp/lb_acc_r2.csv");

    for (const char* f : {"/tmp/lb_acc_b1.json", "/tmp/lb_acc_b2.json", "/tmp/lb_acc_cfg.json",
                          "/tmp/lb_acc_r1.json", "/tmp/lb_acc_r2.json", "/tmp/lb_acc_r1.csv",
                          "/tmp/lb_acc_r2.csv"})
        std::remove(f);
    detail = "band and simulate outputs byte-identical across repeat runs";
    return ok;
}

struct Criterion {
    const char* name;
    std::function<bool(std::string&)> run;
    double budget_seconds;  // 0 = unconstrained
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"gini fixtures at one half", gini_fixtures, 1.0},
        {"pointwise and degenerate supremum critical values", critical_values, 0.0},
        {"general variance matches the simplified form", variance_equivalence, 0.0},
        {"covariance diagonal matches the variance estimator", diagonal_consistency, 0.0},
        {"variance estimator unbiased under exhaustive enumeration", ht_unbiasedness, 1.0},
        {"linearized variables match finite differences", linearization_matches_fd, 0.0},
        {"pointwise process follows the two-df chi-square law", pointwise_chi_square, 0.0},
        {"pointwise band nests inside the simultaneous band", nesting, 0.0},
        {"simultaneous coverage near nominal at desk scale", coverage_desk_scale, 600.0},
        {"supremum critical value grows with the sample size", u_trend, 0.0},
        {"band and simulate commands are bit-reproducible", determinism, 0.0},
    };

    int failures = 0;
    double total = 0.0;
    for (const Criterion& c : criteria) {
        std::string detail;
        const auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        total += seconds;
        if (c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
            ok = false;
            detail += " [over budget of " + std::to_string(c.budget_seconds) + "s]";
        }
        std::printf("[%s] %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", c.name, seconds,
                    detail.empty() ? "" : " - ", detail.c_str());
        if (!ok) ++failures;
    }
    std::printf("%d/%zu criteria passed in %.1fs\n",
                static_cast<int>(criteria.size()) - failures, criteria.size(), total);
    return failures == 0 ? 0 : 1;
}
