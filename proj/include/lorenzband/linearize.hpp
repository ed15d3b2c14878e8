#pragma once

#include <vector>

#include "lorenzband/design.hpp"
#include "lorenzband/linalg.hpp"
#include "lorenzband/lorenz.hpp"

namespace lorenzband {

/// Sample linearized variables of the k-th point estimator, one entry per
/// sampled unit (income order). Their weighted sums are zero by construction.
struct LinearizedSet {
    std::vector<double> z1;  // abscissa: (1[y_i <= y_k] - L_k1) / Nhat
    std::vector<double> z2;  // ordinate: y_i (1[y_i <= y_k] - L_k2) / Yhat
    int k = 0;
};

LinearizedSet linearized_vars(const SampleDraw& s, const CurveEstimate& est, int k);

/// Central finite difference of the plug-in estimator component h (1 or 2)
/// with respect to unit i's weight, holding the indicator set fixed.
/// Independent check of the closed-form linearized variables.
double finite_diff_oracle(const SampleDraw& s, int k, int h, int i, double eps);

/// Variance estimator of a weighted total under SRSWOR:
/// (N^2/n)(1 - n/N) (1/(n-1)) sum (z_i - zbar)^2.
double variance_srswor(const SampleDraw& s, const std::vector<double>& z);

/// Generalized Horvitz-Thompson variance estimator:
/// sum_ij (z_i/pi1)(z_j/pi1) (pi_ij - pi_i pi_j)/pi_ij, with pi_ii = pi_i.
/// Reduces to variance_srswor under SRSWOR probabilities.
double variance_general(const SampleDraw& s, const std::vector<double>& z, double pi1, double pi2);

/// The SRSWOR design matrix: diagonal N(N-n)/n^2, off-diagonal
/// -N(N-n)/(n^2 (n-1)). Rows sum to zero. Materialized form, for tests and
/// small n; the covariance products below never build it.
std::vector<std::vector<double>> delta_matrix(int N, int n);

/// u' Delta v in O(n) via Delta = (c1 + c2) I - c2 11'.
double delta_quad_form(int N, int n, const std::vector<double>& u, const std::vector<double>& v);

/// Covariance of the k-th point estimator: J_k Delta J_k' (2x2), where the
/// rows of J_k are the linearized variables. k in [1, n-1].
Mat2 covariance_block(const SampleDraw& s, const CurveEstimate& est, int k);

/// Cross-covariance of neighbors: J_k Delta J_{k+1}' (2x2). k in [1, n-2].
Mat2 cross_covariance_block(const SampleDraw& s, const CurveEstimate& est, int k);

/// Per-index covariance blocks of a sample: sigma[k-1] = cov(L_k),
/// k = 1..n-1, and cross[k-1] = cov(L_k, L_{k+1}), k = 1..n-2.
struct CovBlocks {
    std::vector<Mat2> sigma;
    std::vector<Mat2> cross;
};

CovBlocks covariance_blocks(const SampleDraw& s, const CurveEstimate& est);

/// Ridge regularization for (near-)singular covariance blocks:
/// adds ridge * (trace/dim + floor) to the diagonal, then lifts the smallest
/// eigenvalue up to `floor` if it is still below it.
Mat2 regularize(const Mat2& m, double ridge, double floor = 1e-12);
Mat4 regularize(const Mat4& m, double ridge, double floor = 1e-12);

}  // namespace lorenzband
