#include "ncfps/linalg.hpp"

#include <algorithm>
#include <limits>

namespace ncfps {

double default_rank_tol(const Mat& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(M);
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    return std::max(M.rows(), M.cols()) * std::numeric_limits<double>::epsilon() * smax;
}

namespace {

double resolve_tol(const Eigen::VectorXd& sv, const Mat& M, double tol) {
    if (tol >= 0) return tol;
    const double smax = sv.size() ? sv(0) : 0.0;
    return std::max(M.rows(), M.cols()) * std::numeric_limits<double>::epsilon() * smax;
}

}  // namespace

int rank(const Mat& M, double tol) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& sv = svd.singularValues();
    const double t = resolve_tol(sv, M, tol);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > t) ++r;
    return r;
}

Mat col_space(const Mat& M, double tol) {
    if (M.size() == 0) return Mat::Zero(M.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double t = resolve_tol(sv, M, tol);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > t) ++r;
    return svd.matrixU().leftCols(r);
}

Mat null_space(const Mat& M, double tol) {
    if (M.cols() == 0) return Mat::Zero(0, 0);
    if (M.rows() == 0) return Mat::Identity(M.cols(), M.cols());
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double t = resolve_tol(sv, M, tol);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > t) ++r;
    return svd.matrixV().rightCols(M.cols() - r);
}

Mat pinv(const Mat& M, double tol) {
    if (M.size() == 0) return Mat::Zero(M.cols(), M.rows());
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double t = resolve_tol(sv, M, tol);
    Eigen::VectorXcd inv(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) inv(i) = sv(i) > t ? 1.0 / sv(i) : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Mat kron(const Mat& X, const Mat& Y) {
    Mat out(X.rows() * Y.rows(), X.cols() * Y.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            out.block(i * Y.rows(), j * Y.cols(), Y.rows(), Y.cols()) = X(i, j) * Y;
    return out;
}

Mat blockdiag(const std::vector<Mat>& blocks) {
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        r += b.rows();
        c += b.cols();
    }
    Mat out = Mat::Zero(r, c);
    r = c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

Mat adj(const Mat& M) { return M.adjoint(); }

double scale_of(std::initializer_list<const Mat*> ms) {
    double s = 0;
    for (const Mat* m : ms) s += m->norm();
    return std::max(1.0, s);
}

Mat sqrt_pd(const Mat& H) {
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    if (es.eigenvalues().size() && es.eigenvalues().minCoeff() <= 0)
        throw NumericalError("matrix square root: not positive definite");
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cast<cplx>().asDiagonal() *
           es.eigenvectors().adjoint();
}

Mat inv_sqrt_pd(const Mat& H) {
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    if (es.eigenvalues().size() && es.eigenvalues().minCoeff() <= 0)
        throw NumericalError("matrix square root: not positive definite");
    return es.eigenvectors() *
           es.eigenvalues().cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() *
           es.eigenvectors().adjoint();
}

Inertia inertia(const Mat& H, double rel) {
    Inertia in;
    if (H.size() == 0) return in;
    Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double t = rel * ev.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > t)
            ++in.pos;
        else if (ev(i) < -t)
            ++in.neg;
        else
            ++in.zero;
    }
    return in;
}

bool is_signature(const Mat& J, double tol) {
    if (J.rows() != J.cols()) return false;
    const Mat I = Mat::Identity(J.rows(), J.cols());
    return (J - J.adjoint()).norm() <= tol && (J * J - I).norm() <= tol;
}

double rel_residual(const Mat& residual, std::initializer_list<Mat> terms) {
    double s = 0;
    for (const Mat& t : terms) s += t.norm();
    return residual.norm() / std::max(1.0, s);
}

}  // namespace ncfps
