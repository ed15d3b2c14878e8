#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lorenzband/band.hpp"
#include "lorenzband/population.hpp"

namespace lorenzband {

/// Where the experiment population comes from: a CSV file or a generator.
struct PopulationSource {
    std::string csv_path;
    std::string csv_column = "income";
    std::optional<GeneratorSpec> synthetic;
    std::uint64_t synthetic_seed = 0;
};

/// Monte Carlo coverage experiment: repeated SRSWOR draws, band construction
/// and trimmed coverage checks against the population curve.
struct ExperimentSpec {
    PopulationSource population;
    std::vector<int> sample_sizes;
    int replications = 1;
    double alpha = 0.05;
    double trim = 0.025;
    std::uint64_t seed = 1;
    int t_grid = 16;                  // containment scan points per segment
    int c_grid = 8;                   // trapezoid intervals per segment for C
    int c_draws = 200;                // Monte Carlo draws per segment for C
    int check_points_per_segment = 4; // target discretization density
    int check_cap = 5000;             // max target points per coverage check
    int threads = 0;                  // 0 = hardware; LORENZ_SCB_THREADS caps
};

struct CoverageCell {
    int n = 0;
    double pcb_rate = 0.0;
    double scb_rate = 0.0;
    double pcb_se = 0.0;
    double scb_se = 0.0;
    double mean_u = 0.0;
    double mean_c = 0.0;
    std::vector<bool> pcb_hits;  // per replication
    std::vector<bool> scb_hits;
    std::vector<double> u_values;
};

struct CoverageReport {
    std::vector<CoverageCell> cells;
    double alpha = 0.05;
    double trim = 0.025;
    int replications = 0;
    std::uint64_t seed = 0;
};

/// Keeps the part of the curve with abscissa in [trim, 1-trim], inserting
/// interpolated boundary points. trim = 0 returns the input unchanged.
PiecewiseCurve trim_curve(const PiecewiseCurve& curve, double trim);

/// True iff every point of a discretization of `target` (all vertices plus
/// equally spaced points per segment, thinned to at most `check_grid`
/// points) lies inside the band.
bool curve_covered(const Band& band, const PiecewiseCurve& target, int check_grid);

CoverageReport run_experiment(const ExperimentSpec& spec);

/// Reads an ExperimentSpec from a JSON config file. Collects every schema
/// violation before failing, so the error message lists all of them.
ExperimentSpec load_experiment_spec(const std::string& path);

std::string report_to_csv(const CoverageReport& report);
std::string report_to_text(const CoverageReport& report);
std::string report_to_json(const CoverageReport& report);

}  // namespace lorenzband
