#pragma once

#include <cstdint>
#include <vector>

#include "lorenzband/linearize.hpp"

namespace lorenzband {

/// Covariance of the interpolated curve along t in [1, n-1]:
/// Sigma(t) = (1-d)^2 S_kk + d(1-d)(S_k,k+1 + S_k+1,k) + d^2 S_k+1,k+1.
struct SigmaPath {
    CovBlocks blocks;
    int n = 0;              // sample size; t ranges over [1, n-1]
    double ridge = 1e-10;
    double floor = 1e-12;

    /// Exact block quadratic form (no regularization).
    Mat2 sigma_at(double t) const;

    /// Inverse of the regularized Sigma(t).
    Mat2 sigma_inv_at(double t) const;

    /// Stacked 4x4 covariance of (L_k, L_{k+1}), k in [1, n-2].
    Mat4 stacked(int k) const;
};

SigmaPath make_sigma_path(const SampleDraw& s, const CurveEstimate& est);

/// Chi-square process value g(t) = (Lhat(t) - x)' Sigma^-1(t) (Lhat(t) - x).
double g_value(const CurveEstimate& est, const SigmaPath& path, double t, CurvePoint x);

/// d sqrt(g) / dt at interior points; 0 by convention where g = 0.
double dg_sqrt_dt(const CurveEstimate& est, const SigmaPath& path, double t, CurvePoint x);

/// Monte Carlo estimate of C = integral over [1, n-1] of E||eta(t)||, with
/// E||eta(t)|| = (pi/2) E|d sqrt(g)/dt| under Gaussian deviations drawn per
/// segment from the stacked neighbor covariance. `grid` is the number of
/// trapezoid intervals per segment. Deterministic per seed.
double estimate_C(const SigmaPath& path, const CurveEstimate& est, int draws, int grid,
                  std::uint64_t seed);

/// (1-alpha) quantile of chi-square with 2 df: -2 ln(alpha).
double pcb_critical(double alpha);

/// Root u of the supremum tail approximation exp(-u/2)(1 + C sqrt(u)/pi) =
/// alpha, found by bisection; u >= pcb_critical(alpha).
double scb_critical(double C, double alpha);

enum class BandKind { pcb, scb };

/// A confidence band: the union over t of the ellipses
/// { x : g(t, x) < critical }. Carries a precomputed scan grid so that
/// containment queries are cheap and read-only.
struct Band {
    CurveEstimate est;
    SigmaPath sigma;
    double critical = 0.0;
    BandKind kind = BandKind::pcb;
    double alpha = 0.05;
    int t_grid = 16;  // scan points per segment

    // Scan grid (ascending t): centers and regularized inverses.
    std::vector<double> grid_t;
    std::vector<CurvePoint> grid_center;
    std::vector<Mat2> grid_inv;
};

Band make_band(const CurveEstimate& est, const SigmaPath& path, BandKind kind, double alpha,
               double critical, int t_grid = 16);

/// min over t (coarse grid + golden-section refinement) of g(t, x).
double band_min_g(const Band& band, CurvePoint x);

/// As band_min_g, but may stop scanning and return the running minimum (an
/// upper bound on the true minimum) once it drops below `stop_below`.
double band_min_g(const Band& band, CurvePoint x, double stop_below);

/// Whether x lies in the band: min_t g(t, x) < critical (strict).
bool band_contains(const Band& band, CurvePoint x);

/// Band geometry for plotting: per-grid-t ellipse boundaries clipped to the
/// wedge {0 <= q <= p <= 1}, plus upper/lower envelope polylines.
struct BandGeometry {
    std::vector<std::vector<CurvePoint>> ellipses;
    std::vector<CurvePoint> upper;
    std::vector<CurvePoint> lower;
};

BandGeometry band_geometry(const Band& band, int resolution);

}  // namespace lorenzband
