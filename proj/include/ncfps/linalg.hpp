#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ncfps {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Bad shapes, bad indices, malformed input. CLI exit code 2.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Singular pivots, failed residual checks, non-stabilizing ranks. CLI exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A classification came out negative (not J-unitary, not inner, ...). CLI exit code 1.
struct PropertyFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A negative rank_tol selects the default max(rows, cols) * eps * sigma_max.
struct Tol {
    double rank = -1.0;
    double res = 1e-9;
};

double default_rank_tol(const Mat& M);
int rank(const Mat& M, double tol = -1.0);

// Orthonormal basis of the column space / kernel, via SVD.
Mat col_space(const Mat& M, double tol = -1.0);
Mat null_space(const Mat& M, double tol = -1.0);
Mat pinv(const Mat& M, double tol = -1.0);

Mat kron(const Mat& X, const Mat& Y);
Mat blockdiag(const std::vector<Mat>& blocks);
Mat adj(const Mat& M);

// Relative size used by residual checks: max(1, sum of Frobenius norms).
double scale_of(std::initializer_list<const Mat*> ms);

// Hermitian square root and inverse square root of a positive definite matrix.
Mat sqrt_pd(const Mat& H);
Mat inv_sqrt_pd(const Mat& H);

// Counts of (positive, negative, zero) eigenvalues of a Hermitian matrix.
// Eigenvalues with |lambda| <= rel * max|lambda| count as zero.
struct Inertia {
    int pos = 0, neg = 0, zero = 0;
};
Inertia inertia(const Mat& H, double rel = 1e-10);

bool is_signature(const Mat& J, double tol = 1e-12);

// ||residual|| / max(1, sum of the norms of the terms that make it up).
double rel_residual(const Mat& residual, std::initializer_list<Mat> terms);

}  // namespace ncfps
