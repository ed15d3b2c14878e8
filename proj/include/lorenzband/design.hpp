#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "lorenzband/population.hpp"

namespace lorenzband {

/// A without-replacement sample with its design weights. Under SRSWOR every
/// weight is N/n. Units are kept sorted by income (ascending), matching the
/// order of the population vector.
struct SampleDraw {
    std::vector<int> unit_ids;   // population indices, ascending
    std::vector<double> y_s;     // incomes of the selected units, ascending
    std::vector<double> w;       // design weights, w[i] = N/n
    int n = 0;
    int N = 0;
};

/// Draws a fixed-size SRSWOR sample by partial Fisher-Yates shuffle.
/// Deterministic per seed.
SampleDraw draw_srswor(const Population& pop, int n, std::uint64_t seed);

/// First- and second-order inclusion probabilities under SRSWOR:
/// (n/N, n(n-1)/(N(N-1))). Requires n >= 2.
std::pair<double, double> inclusion_probs(int N, int n);

/// Number of size-n subsets, or cap+1 if C(N,n) exceeds `cap`.
std::uint64_t count_subsets(int N, int n, std::uint64_t cap);

/// Visits every size-n subset of {0,...,N-1} exactly once, in lexicographic
/// order. Guard: errors out if C(N,n) > 10^6.
void enumerate_samples(int N, int n, const std::function<void(const std::vector<int>&)>& visit);

/// Builds the SampleDraw for an explicit set of unit indices (ascending),
/// with SRSWOR weights N/n. Used by enumeration-based oracles.
SampleDraw sample_from_units(const Population& pop, const std::vector<int>& units);

}  // namespace lorenzband
