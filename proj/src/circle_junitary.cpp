#include "ncfps/circle_junitary.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ncfps/sampling.hpp"

namespace ncfps {

namespace {

void check_unimodular(cplx a) {
    if (std::abs(std::abs(a) - 1.0) > 1e-12) throw UsageError("Cayley parameter must be unimodular");
}

double spectral_distance(const Eigen::VectorXcd& ev, cplx z) {
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) d = std::min(d, std::abs(ev(i) - z));
    return d;
}

Eigen::VectorXcd spectrum(const Mat& A) {
    if (A.size() == 0) return Eigen::VectorXcd(0);
    Eigen::ComplexEigenSolver<Mat> es(A, false);
    return es.eigenvalues();
}

bool invertible(const Mat& M) {
    if (M.size() == 0) return true;
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& sv = svd.singularValues();
    return sv(0) > 0 && sv(sv.size() - 1) >= 1e-12 * sv(0);
}

}  // namespace

Node cayley(const Node& a, cplx param) {
    check_unimodular(param);
    const int r = a.state_dim();
    const Mat I = Mat::Identity(r, r);
    const Mat M = param * a.A + I;
    if (!invertible(M)) throw NumericalError("cayley: aA + I is singular");
    const Mat Mi = r ? Mat(M.inverse()) : M;
    const double s2 = std::sqrt(2.0);
    return Node(a.dims, (param * a.A - I) * Mi, s2 * Mi * param * a.B, s2 * a.C * Mi, a.D - a.C * Mi * param * a.B);
}

cplx choose_cayley_parameter(const Mat& A) {
    const auto ev = spectrum(A);
    if (ev.size() == 0) return 1.0;
    const double need = 1e-8 * std::max(1.0, A.norm());
    cplx best = 1.0;
    double best_d = -1;
    for (int k = 0; k < 16; ++k) {
        const cplx a = std::polar(1.0, 2 * std::numbers::pi * k / 16);
        const double d = spectral_distance(ev, -std::conj(a));
        if (d > best_d) {
            best_d = d;
            best = a;
        }
    }
    if (best_d > need) return best;
    Rng rng(0xca11e7);
    std::uniform_real_distribution<double> ud(0.0, 2 * std::numbers::pi);
    for (int k = 0; k < 64; ++k) {
        const cplx a = std::polar(1.0, ud(rng));
        const double d = spectral_distance(ev, -std::conj(a));
        if (d > best_d) {
            best_d = d;
            best = a;
        }
    }
    if (best_d > need) return best;
    throw NumericalError("no unimodular Cayley parameter avoids the spectrum");
}

Residuals circle_residuals(const Node& a, const Mat& J, const Mat& H) {
    const Mat Hi = H.size() ? Mat(H.inverse()) : H;
    const Mat& A = a.A;
    const Mat& B = a.B;
    const Mat& C = a.C;
    const Mat& D = a.D;
    const int r = a.state_dim(), q = a.q();
    Mat U(r + q, r + q), G = Mat::Zero(r + q, r + q), Gd = Mat::Zero(r + q, r + q);
    U << A, B, C, D;
    G.topLeftCorner(r, r) = H;
    G.bottomRightCorner(q, q) = J;
    Gd.topLeftCorner(r, r) = Hi;
    Gd.bottomRightCorner(q, q) = J;
    Residuals res;
    res["colligation"] = rel_residual(U.adjoint() * G * U - G, {U.adjoint() * G * U, G});
    res["colligation_dual"] = rel_residual(U * Gd * U.adjoint() - Gd, {U * Gd * U.adjoint(), Gd});
    res["stein"] = rel_residual(H - A.adjoint() * H * A - C.adjoint() * J * C, {H, A.adjoint() * H * A, C.adjoint() * J * C});
    res["stein_cross"] = rel_residual(D.adjoint() * J * C + B.adjoint() * H * A, {D.adjoint() * J * C, B.adjoint() * H * A});
    res["stein_d"] = rel_residual(J - D.adjoint() * J * D - B.adjoint() * H * B, {J, D.adjoint() * J * D, B.adjoint() * H * B});
    res["stein_dual"] = rel_residual(Hi - A * Hi * A.adjoint() - B * J * B.adjoint(), {Hi, A * Hi * A.adjoint(), B * J * B.adjoint()});
    res["stein_dual_cross"] = rel_residual(D * J * B.adjoint() + C * Hi * A.adjoint(), {D * J * B.adjoint(), C * Hi * A.adjoint()});
    res["stein_dual_d"] = rel_residual(J - D * J * D.adjoint() - C * Hi * C.adjoint(), {J, D * J * D.adjoint(), C * Hi * C.adjoint()});
    return res;
}

HResult associated_H_circle(const Node& a, const Mat& J, const Tol& tol) {
    check_signature(a, J);
    if (!is_minimal(a, tol.rank)) throw UsageError("node is not minimal; run minimize first");
    const cplx param = choose_cayley_parameter(a.A);
    HResult line = associated_H_line(cayley(a, param), J, tol);
    HResult out;
    out.H = std::move(line.H);
    out.residuals = circle_residuals(a, J, out.H.full());
    for (const auto& [name, v] : out.residuals)
        if (v > tol.res) throw PropertyFailure("residual " + name + " too large");
    out.cayley_param = param;
    return out;
}

Classification is_matrix_J_unitary_circle(const Node& a, const Mat& J, const Tol& tol) {
    Classification c;
    try {
        HResult h = associated_H_circle(a, J, tol);
        c.holds = true;
        c.H = std::move(h.H);
        c.residuals = std::move(h.residuals);
    } catch (const PropertyFailure& e) {
        c.reason = e.what();
    }
    return c;
}

SampleReport sample_check_circle(const Node& a, const Mat& J, int n, int samples, std::uint64_t seed) {
    check_signature(a, J);
    Rng rng(seed);
    SampleReport rep;
    const Mat Jn = kron(J, Mat::Identity(n, n));
    for (int s = 0; s < samples; ++s) {
        const auto W = unitary_tuple(rng, a.n_vars, n);
        try {
            const Mat F = eval_closed(a, W);
            rep.max_residual = std::max(rep.max_residual, (F * Jn * F.adjoint() - Jn).operatorNorm());
            ++rep.used;
        } catch (const NumericalError&) {
            ++rep.skipped;
        }
    }
    return rep;
}

Mat a_inverse_identity(const Node& a, const StructuredHermitian& H, const Tol& tol) {
    const Node x = associated(a);
    const Mat Hf = H.full();
    if (Hf.rows() != a.state_dim()) throw UsageError("H has the wrong size");
    if (a.state_dim() == 0) return Mat::Zero(0, 0);
    const Mat Ai = Hf.inverse() * x.A.adjoint() * Hf;
    const Mat I = Mat::Identity(a.state_dim(), a.state_dim());
    if (rel_residual(a.A * Ai - I, {a.A * Ai, I}) > tol.res) throw NumericalError("H^{-1}(A^x)*H does not invert A");
    return Ai;
}

namespace {

void check_circle_inputs(const Mat& A, cplx param) {
    check_unimodular(param);
    if (!invertible(A)) throw UsageError("A must be invertible");
    if (spectral_distance(spectrum(A), param) <= 1e-10 * std::max(1.0, A.norm()))
        throw UsageError("Cayley parameter lies in the spectrum of A");
}

StructuredHermitian stein_solution(const std::vector<int>& dims, const Mat& A, const Mat& rhs, bool dual, double res_tol) {
    const auto op = [&](const Mat& X) -> Mat {
        return dual ? Mat(X - A * X * A.adjoint()) : Mat(X - A.adjoint() * X * A);
    };
    const auto sol = solve_structured_hermitian(dims, op, rhs);
    if (sol.residual > res_tol)
        throw NumericalError("no structured Hermitian Stein solution; nearest residual " + std::to_string(sol.residual));
    for (const auto& b : sol.H.blocks)
        if (b.size() && inertia(b).zero > 0) throw NumericalError("structured Stein solution is singular");
    return sol.H;
}

}  // namespace

Node complete_from_CA_circle(const Mat& C, const Mat& A, const std::vector<int>& dims, const Mat& J, cplx param,
                             const Tol& tol) {
    const Node probe(dims, A, Mat::Zero(A.rows(), C.rows()), C, Mat::Identity(C.rows(), C.rows()));
    check_signature(probe, J);
    if (!is_observable(probe, tol.rank)) throw UsageError("(C, A) is not observable");
    check_circle_inputs(A, param);
    const StructuredHermitian H = stein_solution(dims, A, C.adjoint() * J * C, false, tol.res);
    const Mat Hi = H.inverse_full();
    const int r = static_cast<int>(A.rows()), q = static_cast<int>(C.rows());
    const Mat R = (Mat::Identity(r, r) - param * A.adjoint()).inverse();
    const Mat Da = Mat::Identity(q, q) - C * Hi * R * C.adjoint() * J;
    const Mat Ba = -Hi * A.adjoint().inverse() * C.adjoint() * J * Da;
    return Node(dims, A, Ba, C, Da);
}

Node complete_from_AB_circle(const Mat& A, const Mat& B, const std::vector<int>& dims, const Mat& J, cplx param,
                             const Tol& tol) {
    const Node probe(dims, A, B, Mat::Zero(B.cols(), A.rows()), Mat::Identity(B.cols(), B.cols()));
    check_signature(probe, J);
    if (!is_controllable(probe, tol.rank)) throw UsageError("(A, B) is not controllable");
    check_circle_inputs(A, param);
    const StructuredHermitian G = stein_solution(dims, A, B * J * B.adjoint(), true, tol.res);
    const Mat H = G.inverse_full();
    const int r = static_cast<int>(A.rows()), q = static_cast<int>(B.cols());
    const Mat R = (Mat::Identity(r, r) - param * A.adjoint()).inverse();
    const Mat Da = Mat::Identity(q, q) - J * B.adjoint() * R * H * B;
    const Mat Ca = -Da * J * B.adjoint() * A.adjoint().inverse() * H;
    return Node(dims, A, B, Ca, Da);
}

}  // namespace ncfps
