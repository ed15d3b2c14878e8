#include "lorenzband/design.hpp"

#include <algorithm>
#include <numeric>

#include "lorenzband/errors.hpp"
#include "lorenzband/rng.hpp"

namespace lorenzband {

namespace {

constexpr std::uint64_t kEnumerationCap = 1000000;

}  // namespace

SampleDraw draw_srswor(const Population& pop, int n, std::uint64_t seed) {
    const int N = pop.size();
    if (n < 2 || n > N) throw Error(ErrorCode::bad_argument, "sample size must satisfy 2 <= n <= N");
    std::vector<int> ids(static_cast<std::size_t>(N));
    std::iota(ids.begin(), ids.end(), 0);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        const auto j = i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(N - i)));
        std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
    }
    ids.resize(static_cast<std::size_t>(n));
    std::sort(ids.begin(), ids.end());
    return sample_from_units(pop, ids);
}

std::pair<double, double> inclusion_probs(int N, int n) {
    if (n < 2 || n > N) throw Error(ErrorCode::bad_argument, "need 2 <= n <= N");
    const double pi1 = static_cast<double>(n) / N;
    const double pi2 = static_cast<double>(n) * (n - 1) / (static_cast<double>(N) * (N - 1));
    return {pi1, pi2};
}

std::uint64_t count_subsets(int N, int n, std::uint64_t cap) {
    if (n < 0 || n > N) return 0;
    n = std::min(n, N - n);
    // C(N,k) built up one factor at a time; bail out once past the cap
    std::uint64_t c = 1;
    for (int k = 1; k <= n; ++k) {
        if (c > cap) return cap + 1;
        // c * (N - n + k) cannot overflow while c <= cap <= 2^63 / N
        c = c * static_cast<std::uint64_t>(N - n + k) / static_cast<std::uint64_t>(k);
    }
    return c > cap ? cap + 1 : c;
}

void enumerate_samples(int N, int n, const std::function<void(const std::vector<int>&)>& visit) {
    if (n < 1 || n > N) throw Error(ErrorCode::bad_argument, "need 1 <= n <= N");
    if (count_subsets(N, n, kEnumerationCap) > kEnumerationCap)
        throw Error(ErrorCode::enumeration_cap, "more than 10^6 subsets");
    std::vector<int> units(static_cast<std::size_t>(n));
    std::iota(units.begin(), units.end(), 0);
    while (true) {
        visit(units);
        // advance to the next combination in lexicographic order
        int i = n - 1;
        while (i >= 0 && units[static_cast<std::size_t>(i)] == N - n + i) --i;
        if (i < 0) break;
        ++units[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j)
            units[static_cast<std::size_t>(j)] = units[static_cast<std::size_t>(j - 1)] + 1;
    }
}

SampleDraw sample_from_units(const Population& pop, const std::vector<int>& units) {
    SampleDraw s;
    s.N = pop.size();
    s.n = static_cast<int>(units.size());
    s.unit_ids = units;
    std::sort(s.unit_ids.begin(), s.unit_ids.end());
    s.y_s.reserve(units.size());
    // pop.y is ascending, so ascending ids give ascending incomes
    for (int id : s.unit_ids) s.y_s.push_back(pop.y[static_cast<std::size_t>(id)]);
    const double weight = static_cast<double>(s.N) / s.n;
    s.w.assign(units.size(), weight);
    return s;
}

}  // namespace lorenzband
