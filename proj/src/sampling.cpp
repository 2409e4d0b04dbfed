#include "ncfps/sampling.hpp"

#include <cmath>

namespace ncfps {

Mat gaussian(Rng& rng, int rows, int cols) {
    std::normal_distribution<double> nd;
    Mat m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = cplx(nd(rng), nd(rng));
    return m;
}

namespace {

Mat scaled_to(const Mat& raw, double target) {
    const double nrm = raw.operatorNorm();
    return nrm > 0 ? Mat(raw * (target / nrm)) : raw;
}

}  // namespace

std::vector<Mat> small_tuple(Rng& rng, int n_vars, int n, double eps) {
    std::vector<Mat> Z;
    for (int k = 0; k < n_vars; ++k) Z.push_back(scaled_to(gaussian(rng, n, n), 0.5 * eps));
    return Z;
}

std::vector<Mat> skew_hermitian_tuple(Rng& rng, int n_vars, int n, double eps) {
    std::vector<Mat> Z;
    for (int k = 0; k < n_vars; ++k) {
        const Mat G = gaussian(rng, n, n);
        Z.push_back(scaled_to(cplx(0, 0.5) * (G + G.adjoint()), 0.5 * eps));
    }
    return Z;
}

Mat random_unitary(Rng& rng, int n) {
    Eigen::HouseholderQR<Mat> qr(gaussian(rng, n, n));
    Mat Q = qr.householderQ() * Mat::Identity(n, n);
    const Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        const double a = std::abs(R(i, i));
        if (a > 0) Q.col(i) *= R(i, i) / a;
    }
    return Q;
}

std::vector<Mat> unitary_tuple(Rng& rng, int n_vars, int n) {
    std::vector<Mat> W;
    for (int k = 0; k < n_vars; ++k) W.push_back(random_unitary(rng, n));
    return W;
}

std::vector<Mat> halfplane_tuple(Rng& rng, int n_vars, int n) {
    std::vector<Mat> Z;
    for (int k = 0; k < n_vars; ++k) {
        const Mat G = gaussian(rng, n, n);
        Z.push_back(0.5 * (G - G.adjoint()) + 0.1 * Mat::Identity(n, n));
    }
    return Z;
}

std::vector<Mat> contraction_tuple(Rng& rng, int n_vars, int n, double radius) {
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    std::vector<Mat> W;
    for (int k = 0; k < n_vars; ++k) W.push_back(scaled_to(gaussian(rng, n, n), radius * (1.0 - ud(rng))));
    return W;
}

}  // namespace ncfps
