#include "lorenzband/lorenz.hpp"

#include <algorithm>
#include <cmath>

#include "lorenzband/errors.hpp"

namespace lorenzband {

CurveEstimate estimate_points(const SampleDraw& s) {
    const int n = s.n;
    double nhat = 0.0;
    double yhat = 0.0;
    std::vector<double> prefix_w(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> prefix_wy(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        const double w = s.w[static_cast<std::size_t>(i)];
        const double y = s.y_s[static_cast<std::size_t>(i)];
        nhat += w;
        yhat += w * y;
        prefix_w[static_cast<std::size_t>(i) + 1] = nhat;
        prefix_wy[static_cast<std::size_t>(i) + 1] = yhat;
    }
    if (!(yhat > 0.0)) throw Error(ErrorCode::zero_total, "sample income total must be positive");

    CurveEstimate est;
    est.n = n;
    est.points.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        // indicator uses values, so a tie run collapses onto its last member
        const auto last = std::upper_bound(s.y_s.begin(), s.y_s.end(), s.y_s[static_cast<std::size_t>(k) - 1]);
        const auto j = static_cast<std::size_t>(last - s.y_s.begin());
        est.points.push_back({prefix_w[j] / nhat, prefix_wy[j] / yhat});
    }
    est.points.back() = {1.0, 1.0};
    return est;
}

CurvePoint interpolate(const CurveEstimate& est, double t) {
    if (!(t >= 1.0 && t <= est.n - 1.0))
        throw Error(ErrorCode::bad_argument, "interpolation index out of [1, n-1]");
    int k = static_cast<int>(std::floor(t));
    if (k > est.n - 1) k = est.n - 1;
    const double delta = t - k;
    const CurvePoint& a = est.points[static_cast<std::size_t>(k) - 1];
    if (delta == 0.0) return a;
    const CurvePoint& b = est.points[static_cast<std::size_t>(k)];
    return {(1.0 - delta) * a.p + delta * b.p, (1.0 - delta) * a.q + delta * b.q};
}

}  // namespace lorenzband
