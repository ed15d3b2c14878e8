#pragma once

#include "lorenzband/design.hpp"
#include "lorenzband/population.hpp"

namespace lorenzband {

/// Plug-in point estimators of the concentration curve, one per sample unit
/// in income order. points[k-1] = (Nhat_k / Nhat, Yhat_k / Yhat), where the
/// partial totals run over sampled units with income <= the k-th income
/// (ties included, matching the estimator's indicator definition). The last
/// point is exactly (1,1).
struct CurveEstimate {
    std::vector<CurvePoint> points;
    int n = 0;
};

CurveEstimate estimate_points(const SampleDraw& s);

/// Linear interpolation between consecutive point estimators:
/// (1-delta) L_k + delta L_{k+1} with k = floor(t), delta = t - k.
/// Domain t in [1, n-1].
CurvePoint interpolate(const CurveEstimate& est, double t);

}  // namespace lorenzband
