#pragma once

#include <array>
#include <cmath>

namespace lorenzband {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Dense 2x2 matrix, row major.
struct Mat2 {
    double m00 = 0.0, m01 = 0.0;
    double m10 = 0.0, m11 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diagonal(double a, double b) { return {a, 0.0, 0.0, b}; }
};

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.m00 + b.m00, a.m01 + b.m01, a.m10 + b.m10, a.m11 + b.m11};
}
inline Mat2 operator*(double s, const Mat2& a) {
    return {s * a.m00, s * a.m01, s * a.m10, s * a.m11};
}
inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}
inline Vec2 operator*(const Mat2& a, Vec2 v) {
    return {a.m00 * v.x + a.m01 * v.y, a.m10 * v.x + a.m11 * v.y};
}
inline Mat2 transpose(const Mat2& a) { return {a.m00, a.m10, a.m01, a.m11}; }
inline double trace(const Mat2& a) { return a.m00 + a.m11; }
inline double det(const Mat2& a) { return a.m00 * a.m11 - a.m01 * a.m10; }

/// v' M v for 2x2 M.
inline double quad_form(const Mat2& m, Vec2 v) {
    return v.x * (m.m00 * v.x + m.m01 * v.y) + v.y * (m.m10 * v.x + m.m11 * v.y);
}

bool invert(const Mat2& m, Mat2& out);

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
std::array<double, 2> sym_eigenvalues(const Mat2& m);

/// Spectral decomposition of a symmetric 2x2 matrix: m = R diag(evals) R'.
/// evals ascending; columns of R are the unit eigenvectors.
void sym_eigen(const Mat2& m, std::array<double, 2>& evals, Mat2& rotation);

/// Dense 4x4 matrix, used for the stacked neighbor covariance.
struct Mat4 {
    std::array<std::array<double, 4>, 4> m{};

    double& operator()(int i, int j) { return m[i][j]; }
    double operator()(int i, int j) const { return m[i][j]; }
};

/// Eigenvalues of a symmetric 4x4 matrix via cyclic Jacobi sweeps, ascending.
std::array<double, 4> sym_eigenvalues(const Mat4& m);

/// Lower Cholesky factor of a symmetric positive definite 4x4 matrix.
/// Returns false if a pivot is not strictly positive.
bool cholesky(const Mat4& m, Mat4& lower);

}  // namespace lorenzband
