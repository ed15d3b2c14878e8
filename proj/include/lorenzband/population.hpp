#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lorenzband {

/// Point on a concentration curve: population share p, income share q.
struct CurvePoint {
    double p = 0.0;
    double q = 0.0;
};

/// Finite population of non-negative incomes, stored sorted ascending.
struct Population {
    std::vector<double> y;
    double total = 0.0;

    int size() const { return static_cast<int>(y.size()); }

    /// Sorts, validates (N >= 2, y >= 0, total > 0) and builds the population.
    static Population from_incomes(std::vector<double> incomes);
};

/// Piecewise linear curve through ordered points, starting at (0,0).
struct PiecewiseCurve {
    std::vector<CurvePoint> points;

    /// Linear interpolation at abscissa p (p within the curve's range).
    CurvePoint at_abscissa(double p) const;
};

struct GeneratorSpec {
    enum class Kind { two_class, lognormal };
    Kind kind = Kind::lognormal;
    // two_class: `fraction` of the population equally shares `share` of the
    // total income, the rest equally shares the remainder.
    double fraction = 0.5;
    double share = 0.5;
    // lognormal parameters.
    double mu = 0.0;
    double sigma = 1.0;
    int n = 2;

    static GeneratorSpec two_class(double fraction, double share, int n);
    static GeneratorSpec lognormal(double mu, double sigma, int n);
};

/// Reads a CSV file (header row required) and builds a Population from the
/// named numeric column. Extra columns are ignored.
Population load_population(const std::string& path, const std::string& column);

/// Deterministic synthetic populations; two_class ignores the seed.
Population synthetic_population(const GeneratorSpec& spec, std::uint64_t seed);

/// The population concentration curve: N+1 points (k/N, prefix_k / total).
PiecewiseCurve population_lorenz(const Population& pop);

/// 1 - 2 * (trapezoid area under the curve), clamped to [0, 1].
double gini(const PiecewiseCurve& curve);

}  // namespace lorenzband
