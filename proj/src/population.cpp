#include "lorenzband/population.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lorenzband/errors.hpp"
#include "lorenzband/rng.hpp"

namespace lorenzband {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool in_quotes = false;
    for (char c : line) {
        if (c == '"') {
            in_quotes = !in_quotes;
            cell.push_back(c);
        } else if (c == ',' && !in_quotes) {
            cells.push_back(unquote(trim(cell)));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.push_back(unquote(trim(cell)));
    return cells;
}

double parse_double(const std::string& cell, int row) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "row " << row << ": cannot parse '" << cell << "' as a number";
        throw Error(ErrorCode::non_numeric, msg.str());
    }
    return value;
}

}  // namespace

Population Population::from_incomes(std::vector<double> incomes) {
    if (incomes.size() < 2) throw Error(ErrorCode::too_few_rows, "need at least 2 incomes");
    double total = 0.0;
    for (double v : incomes) {
        if (!std::isfinite(v)) throw Error(ErrorCode::non_numeric, "non-finite income");
        if (v < 0.0) throw Error(ErrorCode::negative_income, "incomes must be non-negative");
        total += v;
    }
    if (total <= 0.0) throw Error(ErrorCode::zero_total, "total income must be positive");
    std::sort(incomes.begin(), incomes.end());
    Population pop;
    pop.y = std::move(incomes);
    pop.total = total;
    return pop;
}

CurvePoint PiecewiseCurve::at_abscissa(double p) const {
    const auto& pts = points;
    if (p <= pts.front().p) return {p, pts.front().q};
    if (p >= pts.back().p) return {p, pts.back().q};
    auto it = std::lower_bound(pts.begin(), pts.end(), p,
                               [](const CurvePoint& a, double v) { return a.p < v; });
    const CurvePoint& hi = *it;
    const CurvePoint& lo = *(it - 1);
    if (hi.p == lo.p) return {p, hi.q};
    const double t = (p - lo.p) / (hi.p - lo.p);
    return {p, lo.q + t * (hi.q - lo.q)};
}

GeneratorSpec GeneratorSpec::two_class(double fraction, double share, int n) {
    GeneratorSpec spec;
    spec.kind = Kind::two_class;
    spec.fraction = fraction;
    spec.share = share;
    spec.n = n;
    return spec;
}

GeneratorSpec GeneratorSpec::lognormal(double mu, double sigma, int n) {
    GeneratorSpec spec;
    spec.kind = Kind::lognormal;
    spec.mu = mu;
    spec.sigma = sigma;
    spec.n = n;
    return spec;
}

Population load_population(const std::string& path, const std::string& column) {
    std::ifstream file(path);
    if (!file) throw Error(ErrorCode::missing_file, path);
    std::string line;
    if (!std::getline(file, line)) throw Error(ErrorCode::too_few_rows, path + " is empty");
    const auto header = split_csv_line(line);
    int col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == column) {
            col = static_cast<int>(i);
            break;
        }
    }
    if (col < 0) throw Error(ErrorCode::missing_column, "no column named '" + column + "'");

    std::vector<double> incomes;
    int row = 1;
    while (std::getline(file, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) <= col) {
            std::ostringstream msg;
            msg << "row " << row << ": missing cell for column '" << column << "'";
            throw Error(ErrorCode::non_numeric, msg.str());
        }
        incomes.push_back(parse_double(cells[col], row));
    }
    if (incomes.size() < 2) throw Error(ErrorCode::too_few_rows, path + ": need at least 2 data rows");
    return Population::from_incomes(std::move(incomes));
}

Population synthetic_population(const GeneratorSpec& spec, std::uint64_t seed) {
    if (spec.n < 2) throw Error(ErrorCode::bad_argument, "population size must be at least 2");
    std::vector<double> incomes;
    incomes.reserve(static_cast<std::size_t>(spec.n));
    switch (spec.kind) {
        case GeneratorSpec::Kind::two_class: {
            if (!(spec.fraction > 0.0 && spec.fraction < 1.0))
                throw Error(ErrorCode::bad_argument, "two_class fraction must lie in (0,1)");
            if (!(spec.share >= 0.0 && spec.share < 1.0))
                throw Error(ErrorCode::bad_argument, "two_class share must lie in [0,1)");
            const int low = static_cast<int>(std::llround(spec.fraction * spec.n));
            const int high = spec.n - low;
            if (low < 1 || high < 1)
                throw Error(ErrorCode::bad_argument, "two_class split leaves an empty class");
            const double total = static_cast<double>(spec.n);
            const double y_low = spec.share * total / low;
            const double y_high = (1.0 - spec.share) * total / high;
            incomes.assign(static_cast<std::size_t>(low), y_low);
            incomes.insert(incomes.end(), static_cast<std::size_t>(high), y_high);
            break;
        }
        case GeneratorSpec::Kind::lognormal: {
            if (!(spec.sigma > 0.0))
                throw Error(ErrorCode::bad_argument, "lognormal sigma must be positive");
            Rng rng(seed);
            for (int i = 0; i < spec.n; ++i) incomes.push_back(std::exp(spec.mu + spec.sigma * rng.normal()));
            break;
        }
    }
    return Population::from_incomes(std::move(incomes));
}

PiecewiseCurve population_lorenz(const Population& pop) {
    PiecewiseCurve curve;
    curve.points.reserve(pop.y.size() + 1);
    curve.points.push_back({0.0, 0.0});
    const double n = static_cast<double>(pop.size());
    double prefix = 0.0;
    for (int k = 0; k < pop.size(); ++k) {
        prefix += pop.y[static_cast<std::size_t>(k)];
        curve.points.push_back({(k + 1) / n, prefix / pop.total});
    }
    curve.points.back() = {1.0, 1.0};
    return curve;
}

double gini(const PiecewiseCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += 0.5 * (b.p - a.p) * (a.q + b.q);
    }
    return std::clamp(1.0 - 2.0 * area, 0.0, 1.0);
}

}  // namespace lorenzband
