#include "lorenzband/band.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "lorenzband/errors.hpp"
#include "lorenzband/rng.hpp"

namespace lorenzband {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Segment {
    int k = 1;          // left block index, 1-based
    double delta = 0.0; // position within [k, k+1]
};

// maps t in [1, n-1] onto a segment; t = n-1 becomes (n-2, 1) so the block
// pair (k, k+1) always exists for n >= 3
Segment locate(int n, double t) {
    if (!(t >= 1.0 && t <= n - 1.0)) throw Error(ErrorCode::bad_argument, "t out of [1, n-1]");
    if (n == 2) return {1, 0.0};
    if (t >= n - 1.0) return {n - 2, 1.0};
    const int k = static_cast<int>(std::floor(t));
    return {k, t - k};
}

Mat2 blend(const Mat2& s00, const Mat2& cross, const Mat2& s11, double delta) {
    const Mat2 sym = cross + transpose(cross);
    return ((1.0 - delta) * (1.0 - delta)) * s00 + (delta * (1.0 - delta)) * sym +
           (delta * delta) * s11;
}

Mat2 blend_derivative(const Mat2& s00, const Mat2& cross, const Mat2& s11, double delta) {
    const Mat2 sym = cross + transpose(cross);
    return (-2.0 * (1.0 - delta)) * s00 + (1.0 - 2.0 * delta) * sym + (2.0 * delta) * s11;
}

Mat2 inverse_or_throw(const Mat2& m) {
    Mat2 inv;
    if (!invert(m, inv)) throw Error(ErrorCode::numerical, "covariance not invertible");
    return inv;
}

// |d sqrt(g)/dt| building block shared by dg_sqrt_dt and estimate_C: the
// deviation is linear in delta with endpoint values d0, d1
double dg_sqrt_from_parts(const Mat2& sigma_inv, const Mat2& sigma_dot, Vec2 d, Vec2 ddot) {
    const double g = quad_form(sigma_inv, d);
    if (!(g > 0.0)) return 0.0;
    const Vec2 inv_d = sigma_inv * d;
    const double dg = 2.0 * dot(ddot, inv_d) - dot(inv_d, sigma_dot * inv_d);
    return dg / (2.0 * std::sqrt(g));
}

}  // namespace

Mat2 SigmaPath::sigma_at(double t) const {
    const Segment seg = locate(n, t);
    const Mat2& s00 = blocks.sigma[static_cast<std::size_t>(seg.k) - 1];
    if (n == 2) return s00;
    const Mat2& s11 = blocks.sigma[static_cast<std::size_t>(seg.k)];
    const Mat2& cr = blocks.cross[static_cast<std::size_t>(seg.k) - 1];
    return blend(s00, cr, s11, seg.delta);
}

Mat2 SigmaPath::sigma_inv_at(double t) const {
    return inverse_or_throw(regularize(sigma_at(t), ridge, floor));
}

Mat4 SigmaPath::stacked(int k) const {
    if (k < 1 || k > n - 2) throw Error(ErrorCode::bad_argument, "segment index out of [1, n-2]");
    const Mat2& a = blocks.sigma[static_cast<std::size_t>(k) - 1];
    const Mat2& b = blocks.cross[static_cast<std::size_t>(k) - 1];
    const Mat2& c = blocks.sigma[static_cast<std::size_t>(k)];
    Mat4 m;
    m(0, 0) = a.m00; m(0, 1) = a.m01; m(1, 0) = a.m10; m(1, 1) = a.m11;
    m(0, 2) = b.m00; m(0, 3) = b.m01; m(1, 2) = b.m10; m(1, 3) = b.m11;
    m(2, 0) = b.m00; m(3, 0) = b.m01; m(2, 1) = b.m10; m(3, 1) = b.m11;
    m(2, 2) = c.m00; m(2, 3) = c.m01; m(3, 2) = c.m10; m(3, 3) = c.m11;
    return m;
}

SigmaPath make_sigma_path(const SampleDraw& s, const CurveEstimate& est) {
    SigmaPath path;
    path.blocks = covariance_blocks(s, est);
    path.n = s.n;
    return path;
}

double g_value(const CurveEstimate& est, const SigmaPath& path, double t, CurvePoint x) {
    const CurvePoint c = interpolate(est, t);
    const Vec2 d{c.p - x.p, c.q - x.q};
    return quad_form(path.sigma_inv_at(t), d);
}

double dg_sqrt_dt(const CurveEstimate& est, const SigmaPath& path, double t, CurvePoint x) {
    const Segment seg = locate(path.n, t);
    if (path.n == 2) return 0.0;
    const Mat2& s00 = path.blocks.sigma[static_cast<std::size_t>(seg.k) - 1];
    const Mat2& s11 = path.blocks.sigma[static_cast<std::size_t>(seg.k)];
    const Mat2& cr = path.blocks.cross[static_cast<std::size_t>(seg.k) - 1];
    const CurvePoint& a = est.points[static_cast<std::size_t>(seg.k) - 1];
    const CurvePoint& b = est.points[static_cast<std::size_t>(seg.k)];
    const Vec2 d0{a.p - x.p, a.q - x.q};
    const Vec2 d1{b.p - x.p, b.q - x.q};
    const Vec2 d = (1.0 - seg.delta) * d0 + seg.delta * d1;
    const Vec2 ddot = d1 - d0;
    const Mat2 inv = inverse_or_throw(
        regularize(blend(s00, cr, s11, seg.delta), path.ridge, path.floor));
    const Mat2 sdot = blend_derivative(s00, cr, s11, seg.delta);
    return dg_sqrt_from_parts(inv, sdot, d, ddot);
}

double estimate_C(const SigmaPath& path, const CurveEstimate& est, int draws, int grid,
                  std::uint64_t seed) {
    (void)est;
    if (draws < 100) throw Error(ErrorCode::bad_argument, "need at least 100 draws");
    if (grid < 4) throw Error(ErrorCode::bad_argument, "need at least 4 grid intervals");
    const int n = path.n;
    if (n < 3) return 0.0;

    double total = 0.0;
    const std::size_t nodes = static_cast<std::size_t>(grid) + 1;
    std::vector<Mat2> inv(nodes), dot_m(nodes);
    std::vector<double> mean_abs(nodes);
    for (int k = 1; k <= n - 2; ++k) {
        const Mat2& s00 = path.blocks.sigma[static_cast<std::size_t>(k) - 1];
        const Mat2& s11 = path.blocks.sigma[static_cast<std::size_t>(k)];
        const Mat2& cr = path.blocks.cross[static_cast<std::size_t>(k) - 1];
        for (std::size_t j = 0; j < nodes; ++j) {
            const double delta = static_cast<double>(j) / grid;
            inv[j] = inverse_or_throw(regularize(blend(s00, cr, s11, delta), path.ridge, path.floor));
            dot_m[j] = blend_derivative(s00, cr, s11, delta);
        }

        Mat4 lower;
        if (!cholesky(regularize(path.stacked(k), path.ridge, path.floor), lower))
            throw Error(ErrorCode::numerical, "stacked covariance not positive definite");

        std::fill(mean_abs.begin(), mean_abs.end(), 0.0);
        Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(k));
        for (int r = 0; r < draws; ++r) {
            double u[4];
            for (double& v : u) v = rng.normal();
            double dev[4];
            for (int i = 0; i < 4; ++i) {
                dev[i] = 0.0;
                for (int j2 = 0; j2 <= i; ++j2) dev[i] += lower(i, j2) * u[j2];
            }
            const Vec2 d0{dev[0], dev[1]};
            const Vec2 d1{dev[2], dev[3]};
            const Vec2 ddot = d1 - d0;
            for (std::size_t j = 0; j < nodes; ++j) {
                const double delta = static_cast<double>(j) / grid;
                const Vec2 d = (1.0 - delta) * d0 + delta * d1;
                mean_abs[j] += std::abs(dg_sqrt_from_parts(inv[j], dot_m[j], d, ddot));
            }
        }

        // trapezoid over delta in [0, 1]; E||eta|| = (pi/2) E|d sqrt(g)/dt|
        double integral = 0.0;
        for (std::size_t j = 0; j < nodes; ++j) {
            const double weight = (j == 0 || j == nodes - 1) ? 0.5 : 1.0;
            integral += weight * mean_abs[j] / draws;
        }
        total += (kPi / 2.0) * integral / grid;
    }
    return total;
}

double pcb_critical(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::bad_argument, "alpha must lie in (0,1)");
    return -2.0 * std::log(alpha);
}

double scb_critical(double C, double alpha) {
    if (!(C >= 0.0)) throw Error(ErrorCode::bad_argument, "C must be non-negative");
    const double lo = pcb_critical(alpha);
    if (C == 0.0) return lo;
    const auto tail = [C](double u) { return std::exp(-0.5 * u) * (1.0 + C * std::sqrt(u) / kPi); };
    if (tail(lo) <= alpha) return lo;
    double a = lo;
    double b = lo + 50.0;
    while (tail(b) > alpha) {
        a = b;
        b += 50.0;
    }
    while (b - a > 1e-9) {
        const double mid = 0.5 * (a + b);
        if (tail(mid) > alpha) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

Band make_band(const CurveEstimate& est, const SigmaPath& path, BandKind kind, double alpha,
               double critical, int t_grid) {
    if (!(critical > 0.0)) throw Error(ErrorCode::bad_argument, "critical value must be positive");
    if (t_grid < 1) throw Error(ErrorCode::bad_argument, "need at least 1 scan point per segment");
    Band band;
    band.est = est;
    band.sigma = path;
    band.critical = critical;
    band.kind = kind;
    band.alpha = alpha;
    band.t_grid = t_grid;

    const int n = est.n;
    if (n == 2) {
        band.grid_t.push_back(1.0);
    } else {
        for (int k = 1; k <= n - 2; ++k)
            for (int j = 0; j < t_grid; ++j)
                band.grid_t.push_back(k + static_cast<double>(j) / t_grid);
        band.grid_t.push_back(static_cast<double>(n - 1));
    }
    band.grid_center.reserve(band.grid_t.size());
    band.grid_inv.reserve(band.grid_t.size());
    for (double t : band.grid_t) {
        band.grid_center.push_back(interpolate(est, t));
        band.grid_inv.push_back(path.sigma_inv_at(t));
    }
    return band;
}

namespace {

// quadratic-form minimum over t via coarse scan plus golden-section polish.
// stops early once the running minimum drops below `stop_below`; centers'
// abscissas are monotone, so an eigenvalue bound prunes the outward scan
double scan_min_g(const Band& band, CurvePoint x, double stop_below) {
    const auto& ts = band.grid_t;
    const auto& centers = band.grid_center;
    const std::size_t m = ts.size();

    // nearest scan point by abscissa
    std::size_t i0 = 0;
    {
        double best_dp = std::numeric_limits<double>::infinity();
        std::size_t lo = 0, hi = m;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (centers[mid].p < x.p) lo = mid + 1; else hi = mid;
        }
        for (std::size_t cand : {lo > 0 ? lo - 1 : 0, lo < m ? lo : m - 1}) {
            const double dp = std::abs(centers[cand].p - x.p);
            if (dp < best_dp) {
                best_dp = dp;
                i0 = cand;
            }
        }
    }

    double lmin_inv = std::numeric_limits<double>::infinity();
    for (const Mat2& inv : band.grid_inv) lmin_inv = std::min(lmin_inv, sym_eigenvalues(inv)[0]);
    lmin_inv = std::max(lmin_inv, 0.0);

    const auto g_at = [&](std::size_t i) {
        const Vec2 d{centers[i].p - x.p, centers[i].q - x.q};
        return quad_form(band.grid_inv[i], d);
    };

    double best = g_at(i0);
    std::size_t best_i = i0;
    bool left_open = i0 > 0;
    bool right_open = i0 + 1 < m;
    std::size_t li = i0, ri = i0;
    while ((left_open || right_open) && best >= stop_below) {
        if (left_open) {
            --li;
            const double dp = x.p - centers[li].p;
            if (dp > 0.0 && lmin_inv * dp * dp >= best) {
                left_open = false;
            } else {
                const double g = g_at(li);
                if (g < best) { best = g; best_i = li; }
                left_open = li > 0;
            }
        }
        if (right_open && best >= stop_below) {
            ++ri;
            const double dp = centers[ri].p - x.p;
            if (dp > 0.0 && lmin_inv * dp * dp >= best) {
                right_open = false;
            } else {
                const double g = g_at(ri);
                if (g < best) { best = g; best_i = ri; }
                right_open = ri + 1 < m;
            }
        }
    }
    if (best < stop_below || m == 1) return best;

    // polish around the best scan point
    double a = ts[best_i > 0 ? best_i - 1 : 0];
    double b = ts[std::min(best_i + 1, m - 1)];
    const auto g_cont = [&](double t) { return g_value(band.est, band.sigma, t, x); };
    constexpr double kInvPhi = 0.6180339887498949;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = g_cont(c);
    double fd = g_cont(d);
    while (b - a > 1e-6) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - kInvPhi * (b - a);
            fc = g_cont(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + kInvPhi * (b - a);
            fd = g_cont(d);
        }
    }
    return std::min(best, std::min(fc, fd));
}

}  // namespace

double band_min_g(const Band& band, CurvePoint x) {
    return scan_min_g(band, x, -std::numeric_limits<double>::infinity());
}

double band_min_g(const Band& band, CurvePoint x, double stop_below) {
    return scan_min_g(band, x, stop_below);
}

bool band_contains(const Band& band, CurvePoint x) {
    return scan_min_g(band, x, band.critical) < band.critical;
}

namespace {

// clip a polygon against the half-plane h(p, q) >= 0
std::vector<CurvePoint> clip_half_plane(const std::vector<CurvePoint>& poly,
                                        const std::function<double(CurvePoint)>& h) {
    std::vector<CurvePoint> out;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
        const CurvePoint& cur = poly[i];
        const CurvePoint& nxt = poly[(i + 1) % m];
        const double hc = h(cur);
        const double hn = h(nxt);
        if (hc >= 0.0) out.push_back(cur);
        if ((hc >= 0.0) != (hn >= 0.0)) {
            const double t = hc / (hc - hn);
            out.push_back({cur.p + t * (nxt.p - cur.p), cur.q + t * (nxt.q - cur.q)});
        }
    }
    return out;
}

std::vector<CurvePoint> clip_to_wedge(std::vector<CurvePoint> poly) {
    poly = clip_half_plane(poly, [](CurvePoint v) { return v.q; });           // q >= 0
    poly = clip_half_plane(poly, [](CurvePoint v) { return v.p - v.q; });     // q <= p
    poly = clip_half_plane(poly, [](CurvePoint v) { return 1.0 - v.p; });     // p <= 1
    return poly;
}

}  // namespace

BandGeometry band_geometry(const Band& band, int resolution) {
    if (resolution < 16) throw Error(ErrorCode::bad_argument, "need at least 16 boundary points");
    BandGeometry geo;
    geo.ellipses.reserve(band.grid_t.size());

    const int bins = std::max(resolution, 64);
    std::vector<double> upper(static_cast<std::size_t>(bins) + 1,
                              -std::numeric_limits<double>::infinity());
    std::vector<double> lower(static_cast<std::size_t>(bins) + 1,
                              std::numeric_limits<double>::infinity());

    for (std::size_t gi = 0; gi < band.grid_t.size(); ++gi) {
        const Mat2 sigma = regularize(band.sigma.sigma_at(band.grid_t[gi]), band.sigma.ridge,
                                      band.sigma.floor);
        std::array<double, 2> evals{};
        Mat2 rot;
        sym_eigen(sigma, evals, rot);
        const double r0 = std::sqrt(std::max(evals[0], 0.0) * band.critical);
        const double r1 = std::sqrt(std::max(evals[1], 0.0) * band.critical);
        const CurvePoint c = band.grid_center[gi];

        std::vector<CurvePoint> ring;
        ring.reserve(static_cast<std::size_t>(resolution));
        for (int j = 0; j < resolution; ++j) {
            const double theta = 2.0 * kPi * j / resolution;
            const double a = r0 * std::cos(theta);
            const double b = r1 * std::sin(theta);
            ring.push_back({c.p + rot.m00 * a + rot.m01 * b, c.q + rot.m10 * a + rot.m11 * b});
        }
        ring = clip_to_wedge(std::move(ring));
        if (ring.empty()) continue;
        for (const CurvePoint& v : ring) {
            int bin = static_cast<int>(std::floor(v.p * bins));
            bin = std::clamp(bin, 0, bins);
            upper[static_cast<std::size_t>(bin)] = std::max(upper[static_cast<std::size_t>(bin)], v.q);
            lower[static_cast<std::size_t>(bin)] = std::min(lower[static_cast<std::size_t>(bin)], v.q);
        }
        geo.ellipses.push_back(std::move(ring));
    }

    for (int b = 0; b <= bins; ++b) {
        if (upper[static_cast<std::size_t>(b)] == -std::numeric_limits<double>::infinity()) continue;
        const double p = static_cast<double>(b) / bins;
        geo.upper.push_back({p, upper[static_cast<std::size_t>(b)]});
        geo.lower.push_back({p, lower[static_cast<std::size_t>(b)]});
    }
    return geo;
}

}  // namespace lorenzband
