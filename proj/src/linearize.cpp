#include "lorenzband/linearize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lorenzband/errors.hpp"

namespace lorenzband {

namespace {

// index one past the last unit with y <= y_(k), over the ascending sample
std::size_t indicator_end(const SampleDraw& s, int k) {
    const double yk = s.y_s[static_cast<std::size_t>(k) - 1];
    return static_cast<std::size_t>(std::upper_bound(s.y_s.begin(), s.y_s.end(), yk) - s.y_s.begin());
}

}  // namespace

LinearizedSet linearized_vars(const SampleDraw& s, const CurveEstimate& est, int k) {
    if (k < 1 || k > s.n) throw Error(ErrorCode::bad_argument, "point index out of range");
    const std::size_t n = static_cast<std::size_t>(s.n);
    double nhat = 0.0;
    double yhat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        nhat += s.w[i];
        yhat += s.w[i] * s.y_s[i];
    }
    const double l1 = est.points[static_cast<std::size_t>(k) - 1].p;
    const double l2 = est.points[static_cast<std::size_t>(k) - 1].q;
    const std::size_t end = indicator_end(s, k);

    LinearizedSet z;
    z.k = k;
    z.z1.resize(n);
    z.z2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ind = i < end ? 1.0 : 0.0;
        z.z1[i] = (ind - l1) / nhat;
        z.z2[i] = s.y_s[i] * (ind - l2) / yhat;
    }
    return z;
}

double finite_diff_oracle(const SampleDraw& s, int k, int h, int i, double eps) {
    if (k < 1 || k > s.n) throw Error(ErrorCode::bad_argument, "point index out of range");
    if (h != 1 && h != 2) throw Error(ErrorCode::bad_argument, "component must be 1 or 2");
    if (i < 0 || i >= s.n) throw Error(ErrorCode::bad_argument, "unit index out of range");
    if (!(eps > 0.0 && eps <= 0.01)) throw Error(ErrorCode::bad_argument, "step must lie in (0, 0.01]");

    const std::size_t end = indicator_end(s, k);
    const auto estimate = [&](double wi) {
        double nhat = 0.0, yhat = 0.0, nk = 0.0, yk = 0.0;
        for (std::size_t j = 0; j < static_cast<std::size_t>(s.n); ++j) {
            const double w = j == static_cast<std::size_t>(i) ? wi : s.w[j];
            nhat += w;
            yhat += w * s.y_s[j];
            if (j < end) {
                nk += w;
                yk += w * s.y_s[j];
            }
        }
        return h == 1 ? nk / nhat : yk / yhat;
    };
    const double w0 = s.w[static_cast<std::size_t>(i)];
    return (estimate(w0 + eps) - estimate(w0 - eps)) / (2.0 * eps);
}

double variance_srswor(const SampleDraw& s, const std::vector<double>& z) {
    const int n = s.n;
    const int N = s.N;
    if (n < 2) throw Error(ErrorCode::bad_argument, "need n >= 2");
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : z) ss += (v - mean) * (v - mean);
    const double factor =
        (static_cast<double>(N) * N / n) * (1.0 - static_cast<double>(n) / N) / (n - 1);
    return factor * ss;
}

double variance_general(const SampleDraw& s, const std::vector<double>& z, double pi1, double pi2) {
    if (!(pi1 > 0.0) || !(pi2 > 0.0))
        throw Error(ErrorCode::bad_argument, "inclusion probabilities must be positive");
    const std::size_t n = static_cast<std::size_t>(s.n);
    double sum_t = 0.0;
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = z[i] / pi1;
        sum_t += t;
        diag += t * t;
    }
    // pi_ii = pi_i, so the diagonal coefficient (pi_i - pi_i^2)/pi_i = 1 - pi_i
    const double off_coef = (pi2 - pi1 * pi1) / pi2;
    const double diag_coef = 1.0 - pi1;
    return diag_coef * diag + off_coef * (sum_t * sum_t - diag);
}

std::vector<std::vector<double>> delta_matrix(int N, int n) {
    if (n < 2 || n > N) throw Error(ErrorCode::bad_argument, "need 2 <= n <= N");
    const double diag = static_cast<double>(N) * (N - n) / (static_cast<double>(n) * n);
    const double off = -diag / (n - 1);
    std::vector<std::vector<double>> m(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), off));
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) m[i][i] = diag;
    return m;
}

double delta_quad_form(int N, int n, const std::vector<double>& u, const std::vector<double>& v) {
    if (n < 2 || n > N) throw Error(ErrorCode::bad_argument, "need 2 <= n <= N");
    const double c1 = static_cast<double>(N) * (N - n) / (static_cast<double>(n) * n);
    const double c2 = c1 / (n - 1);
    double dot = 0.0, su = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
        dot += u[i] * v[i];
        su += u[i];
        sv += v[i];
    }
    return (c1 + c2) * dot - c2 * su * sv;
}

Mat2 covariance_block(const SampleDraw& s, const CurveEstimate& est, int k) {
    if (k < 1 || k > s.n - 1) throw Error(ErrorCode::bad_argument, "block index out of [1, n-1]");
    const auto z = linearized_vars(s, est, k);
    const double v11 = delta_quad_form(s.N, s.n, z.z1, z.z1);
    const double v12 = delta_quad_form(s.N, s.n, z.z1, z.z2);
    const double v22 = delta_quad_form(s.N, s.n, z.z2, z.z2);
    return {v11, v12, v12, v22};
}

Mat2 cross_covariance_block(const SampleDraw& s, const CurveEstimate& est, int k) {
    if (k < 1 || k > s.n - 2) throw Error(ErrorCode::bad_argument, "block index out of [1, n-2]");
    const auto a = linearized_vars(s, est, k);
    const auto b = linearized_vars(s, est, k + 1);
    return {delta_quad_form(s.N, s.n, a.z1, b.z1), delta_quad_form(s.N, s.n, a.z1, b.z2),
            delta_quad_form(s.N, s.n, a.z2, b.z1), delta_quad_form(s.N, s.n, a.z2, b.z2)};
}

CovBlocks covariance_blocks(const SampleDraw& s, const CurveEstimate& est) {
    const int n = s.n;
    CovBlocks blocks;
    if (n < 2) return blocks;
    blocks.sigma.reserve(static_cast<std::size_t>(n) - 1);
    blocks.cross.reserve(static_cast<std::size_t>(n) - 1);
    LinearizedSet cur = linearized_vars(s, est, 1);
    for (int k = 1; k <= n - 1; ++k) {
        const double v11 = delta_quad_form(s.N, s.n, cur.z1, cur.z1);
        const double v12 = delta_quad_form(s.N, s.n, cur.z1, cur.z2);
        const double v22 = delta_quad_form(s.N, s.n, cur.z2, cur.z2);
        blocks.sigma.push_back({v11, v12, v12, v22});
        if (k <= n - 2) {
            LinearizedSet next = linearized_vars(s, est, k + 1);
            blocks.cross.push_back({delta_quad_form(s.N, s.n, cur.z1, next.z1),
                                    delta_quad_form(s.N, s.n, cur.z1, next.z2),
                                    delta_quad_form(s.N, s.n, cur.z2, next.z1),
                                    delta_quad_form(s.N, s.n, cur.z2, next.z2)});
            cur = std::move(next);
        }
    }
    return blocks;
}

Mat2 regularize(const Mat2& m, double ridge, double floor) {
    Mat2 out = m + (ridge * (trace(m) / 2.0 + floor)) * Mat2::identity();
    const auto evals = sym_eigenvalues(out);
    if (evals[0] < floor) out = out + (floor - evals[0]) * Mat2::identity();
    return out;
}

Mat4 regularize(const Mat4& m, double ridge, double floor) {
    Mat4 out = m;
    double tr = 0.0;
    for (int i = 0; i < 4; ++i) tr += m(i, i);
    const double bump = ridge * (tr / 4.0 + floor);
    for (int i = 0; i < 4; ++i) out(i, i) += bump;
    const auto evals = sym_eigenvalues(out);
    if (evals[0] < floor) {
        const double lift = floor - evals[0];
        for (int i = 0; i < 4; ++i) out(i, i) += lift;
    }
    return out;
}

}  // namespace lorenzband
