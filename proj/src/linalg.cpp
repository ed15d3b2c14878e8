#include "lorenzband/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace lorenzband {

bool invert(const Mat2& m, Mat2& out) {
    const double d = det(m);
    if (d == 0.0 || !std::isfinite(d)) return false;
    const double inv = 1.0 / d;
    out = {m.m11 * inv, -m.m01 * inv, -m.m10 * inv, m.m00 * inv};
    return true;
}

std::array<double, 2> sym_eigenvalues(const Mat2& m) {
    const double mean = 0.5 * (m.m00 + m.m11);
    const double half_diff = 0.5 * (m.m00 - m.m11);
    const double r = std::sqrt(half_diff * half_diff + m.m01 * m.m10);
    return {mean - r, mean + r};
}

void sym_eigen(const Mat2& m, std::array<double, 2>& evals, Mat2& rotation) {
    evals = sym_eigenvalues(m);
    const double b = 0.5 * (m.m01 + m.m10);
    if (std::abs(b) < 1e-300) {
        // already diagonal; order columns to match ascending eigenvalues
        if (m.m00 <= m.m11) {
            rotation = Mat2::identity();
        } else {
            rotation = {0.0, 1.0, 1.0, 0.0};
        }
        return;
    }
    // eigenvector for lambda: (b, lambda - a) up to normalization
    Vec2 v0{b, evals[0] - m.m00};
    Vec2 v1{b, evals[1] - m.m00};
    const double n0 = std::sqrt(dot(v0, v0));
    const double n1 = std::sqrt(dot(v1, v1));
    v0 = (1.0 / n0) * v0;
    v1 = (1.0 / n1) * v1;
    rotation = {v0.x, v1.x, v0.y, v1.y};
}

std::array<double, 4> sym_eigenvalues(const Mat4& m) {
    // cyclic Jacobi; 4x4 inputs converge in a handful of sweeps
    Mat4 a = m;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double sign = theta >= 0.0 ? 1.0 : -1.0;
                const double t = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 4; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < 4; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::array<double, 4> evals{a(0, 0), a(1, 1), a(2, 2), a(3, 3)};
    std::sort(evals.begin(), evals.end());
    return evals;
}

bool cholesky(const Mat4& m, Mat4& lower) {
    lower = Mat4{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = m(i, j);
            for (int k = 0; k < j; ++k) sum -= lower(i, k) * lower(j, k);
            if (i == j) {
                if (sum <= 0.0) return false;
                lower(i, i) = std::sqrt(sum);
            } else {
                lower(i, j) = sum / lower(j, j);
            }
        }
    }
    return true;
}

}  // namespace lorenzband
