#include "ncfps/line_junitary.hpp"

#include <algorithm>
#include <cmath>

#include "ncfps/sampling.hpp"

namespace ncfps {

Mat StructuredHermitian::inverse_full() const {
    std::vector<Mat> inv;
    for (const auto& b : blocks) inv.push_back(b.size() ? Mat(b.inverse()) : b);
    return blockdiag(inv);
}

std::vector<Inertia> StructuredHermitian::signature() const {
    std::vector<Inertia> s;
    for (const auto& b : blocks) s.push_back(inertia(b));
    return s;
}

void check_signature(const Node& a, const Mat& J) {
    if (a.p() != a.q()) throw UsageError("J-unitarity needs square D");
    if (J.rows() != a.q() || J.cols() != a.q()) throw UsageError("J has the wrong size");
    if (!is_signature(J, 1e-12)) throw UsageError("J must satisfy J = J* and J^2 = I");
}

namespace {

std::vector<Mat> split_blocks(const Mat& H, const std::vector<int>& dims) {
    std::vector<Mat> out;
    int off = 0;
    for (int r : dims) {
        out.push_back(H.block(off, off, r, r));
        off += r;
    }
    return out;
}

}  // namespace

Residuals line_residuals(const Node& a, const Mat& J, const Mat& H) {
    const Mat Hi = H.size() ? Mat(H.inverse()) : H;
    const Mat& A = a.A;
    const Mat& B = a.B;
    const Mat& C = a.C;
    const Mat& D = a.D;
    Residuals r;
    r["lyapunov"] = rel_residual(A.adjoint() * H + H * A + C.adjoint() * J * C,
                                 {A.adjoint() * H, H * A, C.adjoint() * J * C});
    r["b_relation"] = rel_residual(B + Hi * C.adjoint() * J * D, {B, Hi * C.adjoint() * J * D});
    r["lyapunov_dual"] = rel_residual(Hi * A.adjoint() + A * Hi + B * J * B.adjoint(),
                                      {Hi * A.adjoint(), A * Hi, B * J * B.adjoint()});
    r["c_relation"] = rel_residual(C + D * J * B.adjoint() * H, {C, D * J * B.adjoint() * H});
    return r;
}

HResult associated_H_line(const Node& a, const Mat& J, const Tol& tol) {
    check_signature(a, J);
    if (!is_minimal(a, tol.rank)) throw UsageError("node is not minimal; run minimize first");
    const double dres = rel_residual(a.D * J * a.D.adjoint() - J, {a.D * J * a.D.adjoint(), J});
    if (dres > tol.res) throw PropertyFailure("D is not J-unitary");
    HResult out;
    if (a.state_dim() == 0) {
        for (int k = 0; k < a.n_vars; ++k) out.H.blocks.push_back(Mat::Zero(0, 0));
        out.residuals["d_unitary"] = dres;
        return out;
    }
    const Node cross = associated(a);
    const Node tilde(a.dims, -a.A.adjoint(), a.C.adjoint() * J, -J * a.B.adjoint(), J * a.D.adjoint() * J);
    std::vector<Mat> T;
    try {
        T = similarity_between(cross, tilde, tol);
    } catch (const NumericalError& e) {
        throw PropertyFailure(std::string("no similarity to the J-adjoint node: ") + e.what());
    }
    for (auto& t : T) {
        Mat h = -t;
        const double asym = (h - h.adjoint()).norm();
        if (asym > 1e-8 * h.norm()) throw PropertyFailure("similarity is not Hermitian");
        out.H.blocks.push_back(0.5 * (h + h.adjoint()));
    }
    out.residuals = line_residuals(a, J, out.H.full());
    out.residuals["d_unitary"] = dres;
    for (const auto& [name, v] : out.residuals)
        if (v > tol.res) throw PropertyFailure("residual " + name + " too large");
    return out;
}

Classification is_matrix_J_unitary_line(const Node& a, const Mat& J, const Tol& tol) {
    Classification c;
    try {
        HResult h = associated_H_line(a, J, tol);
        c.holds = true;
        c.H = std::move(h.H);
        c.residuals = std::move(h.residuals);
    } catch (const PropertyFailure& e) {
        c.reason = e.what();
    }
    return c;
}

SampleReport sample_check_line(const Node& a, const Mat& J, int n, int samples, std::uint64_t seed) {
    check_signature(a, J);
    Rng rng(seed);
    SampleReport rep;
    const double eps = sampling_radius(a);
    const Mat Jn = kron(J, Mat::Identity(n, n));
    for (int s = 0; s < samples; ++s) {
        const auto Z = skew_hermitian_tuple(rng, a.n_vars, n, eps);
        try {
            const Mat F = eval_closed(a, Z);
            rep.max_residual = std::max(rep.max_residual, (F * Jn * F.adjoint() - Jn).operatorNorm());
            ++rep.used;
        } catch (const NumericalError&) {
            ++rep.skipped;
        }
    }
    return rep;
}

StructuredSolve solve_structured_hermitian(const std::vector<int>& dims, const std::function<Mat(const Mat&)>& op,
                                           const Mat& rhs) {
    int r = 0;
    for (int d : dims) r += d;
    // Real basis of block-diagonal Hermitian matrices.
    std::vector<Mat> basis;
    int off = 0;
    for (int d : dims) {
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                Mat E = Mat::Zero(r, r);
                if (i == j) {
                    E(off + i, off + i) = 1;
                    basis.push_back(E);
                    continue;
                }
                E(off + i, off + j) = 1;
                E(off + j, off + i) = 1;
                basis.push_back(E);
                Mat F = Mat::Zero(r, r);
                F(off + i, off + j) = cplx(0, 1);
                F(off + j, off + i) = cplx(0, -1);
                basis.push_back(F);
            }
        off += d;
    }
    const Eigen::Index m = rhs.size();
    Eigen::MatrixXd M(2 * m, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t c = 0; c < basis.size(); ++c) {
        const Mat img = op(basis[c]);
        const Eigen::Map<const Eigen::VectorXcd> v(img.data(), m);
        M.col(c) << v.real(), v.imag();
    }
    const Eigen::Map<const Eigen::VectorXcd> rv(rhs.data(), m);
    Eigen::VectorXd b(2 * m);
    b << rv.real(), rv.imag();
    StructuredSolve out;
    Mat H = Mat::Zero(r, r);
    if (!basis.empty()) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
        const Eigen::VectorXd x = cod.solve(b);
        for (std::size_t c = 0; c < basis.size(); ++c) H += x(c) * basis[c];
    }
    out.H.blocks = split_blocks(H, dims);
    out.residual = rel_residual(op(H) - rhs, {op(H), rhs});
    return out;
}

namespace {

void require_invertible(const StructuredHermitian& H, double residual, double res_tol) {
    if (residual > res_tol)
        throw NumericalError("no structured Hermitian solution; nearest residual " + std::to_string(residual));
    for (const auto& b : H.blocks)
        if (b.size() && inertia(b).zero > 0)
            throw NumericalError("structured Hermitian solution is singular");
}

Node observable_probe(const Mat& C, const Mat& A, const std::vector<int>& dims) {
    return Node(dims, A, Mat::Zero(A.rows(), C.rows()), C, Mat::Identity(C.rows(), C.rows()));
}

}  // namespace

Node complete_from_CA(const Mat& C, const Mat& A, const std::vector<int>& dims, const Mat& J, const Tol& tol) {
    const Node probe = observable_probe(C, A, dims);
    check_signature(probe, J);
    if (!is_observable(probe, tol.rank)) throw UsageError("(C, A) is not observable");
    const Mat rhs = -C.adjoint() * J * C;
    const auto sol = solve_structured_hermitian(dims, [&](const Mat& H) { return Mat(A.adjoint() * H + H * A); }, rhs);
    require_invertible(sol.H, sol.residual, tol.res);
    const Mat B = -sol.H.inverse_full() * C.adjoint() * J;
    return Node(dims, A, B, C, Mat::Identity(C.rows(), C.rows()));
}

Node complete_from_AB(const Mat& A, const Mat& B, const std::vector<int>& dims, const Mat& J, const Tol& tol) {
    const Node probe(dims, A, B, Mat::Zero(B.cols(), A.rows()), Mat::Identity(B.cols(), B.cols()));
    check_signature(probe, J);
    if (!is_controllable(probe, tol.rank)) throw UsageError("(A, B) is not controllable");
    const Mat rhs = -B * J * B.adjoint();
    const auto sol = solve_structured_hermitian(dims, [&](const Mat& G) { return Mat(G * A.adjoint() + A * G); }, rhs);
    require_invertible(sol.H, sol.residual, tol.res);
    const Mat C = -J * B.adjoint() * sol.H.inverse_full();
    return Node(dims, A, B, C, Mat::Identity(B.cols(), B.cols()));
}

std::vector<int> negative_squares(const StructuredHermitian& H) {
    std::vector<int> nu;
    for (const auto& b : H.blocks) nu.push_back(inertia(b).neg);
    return nu;
}

namespace {

Mat component_projection(const Node& a, int k) {
    const int r = a.state_dim();
    Mat P = Mat::Zero(r, r);
    for (int i = 0; i < a.dims[k - 1]; ++i) P(a.offset(k) + i, a.offset(k) + i) = 1;
    return P;
}

void collect_candidates(const std::vector<Mat>& Abar, const Mat& Q, std::vector<Vec>& out, int depth) {
    if (Q.cols() == 0) return;
    Rng rng(0x5eed + depth);
    std::vector<Mat> restricted;
    Mat comb = Mat::Zero(Q.cols(), Q.cols());
    for (const auto& Ab : Abar) {
        restricted.push_back(Q.adjoint() * Ab * Q);
        comb += gaussian(rng, 1, 1)(0, 0) * restricted.back();
    }
    Eigen::ComplexEigenSolver<Mat> es(comb);
    const auto& ev = es.eigenvalues();
    const double sc = std::max(1.0, comb.norm());
    std::vector<bool> used(ev.size(), false);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (used[i]) continue;
        std::vector<Eigen::Index> cluster{i};
        for (Eigen::Index j = i + 1; j < ev.size(); ++j)
            if (!used[j] && std::abs(ev(i) - ev(j)) <= 1e-8 * sc) cluster.push_back(j);
        for (auto j : cluster) used[j] = true;
        if (cluster.size() == 1 || depth > 3) {
            for (auto j : cluster) out.push_back(Q * es.eigenvectors().col(j));
            continue;
        }
        Mat V(Q.cols(), static_cast<Eigen::Index>(cluster.size()));
        for (std::size_t c = 0; c < cluster.size(); ++c) V.col(c) = es.eigenvectors().col(cluster[c]);
        const Mat W = col_space(V, 1e-10);
        if (W.cols() < static_cast<Eigen::Index>(cluster.size()) || W.cols() == Q.cols()) {
            for (auto j : cluster) out.push_back(Q * es.eigenvectors().col(j));
            if (W.cols() == Q.cols()) continue;
        }
        collect_candidates(Abar, Q * W, out, depth + 1);
    }
}

UnitaryDiagnostics diagnose(const Node& a, const StructuredHermitian& H, bool circle) {
    UnitaryDiagnostics rep;
    rep.common = common_eigenvectors(a);
    for (auto& ce : rep.common) {
        for (int k = 1; k <= a.n_vars; ++k) {
            const Vec xk = ce.x.segment(a.offset(k), a.dims[k - 1]);
            const Mat& Hk = H.blocks.at(k - 1);
            ce.h_norm.push_back(xk.size() ? (xk.adjoint() * Hk * xk)(0, 0).real() : 0.0);
        }
        const double ht = 1e-9 * std::max(1.0, H.full().norm());
        for (int j = 0; j < a.n_vars; ++j) {
            const cplx l = ce.lambda[j];
            const bool off_axis = circle ? std::abs(std::abs(l) - 1.0) > 1e-9 : std::abs(l.real()) > 1e-9;
            if (off_axis && std::abs(ce.h_norm[j]) > ht) ce.condition_holds = true;
        }
        if (!ce.condition_holds) rep.violation = true;
    }
    return rep;
}

}  // namespace

std::vector<CommonEigen> common_eigenvectors(const Node& a) {
    const int r = a.state_dim();
    std::vector<CommonEigen> found;
    if (r == 0) return found;
    std::vector<Mat> Abar;
    for (int k = 1; k <= a.n_vars; ++k) Abar.push_back(a.A * component_projection(a, k));
    std::vector<Vec> cand;
    collect_candidates(Abar, Mat::Identity(r, r), cand, 0);
    const double sc = std::max(1.0, a.A.norm());
    for (Vec x : cand) {
        if (x.norm() == 0) continue;
        x.normalize();
        CommonEigen ce;
        bool ok = true;
        for (const auto& Ab : Abar) {
            const cplx l = x.dot(Ab * x);  // x* Ab x
            if ((Ab * x - l * x).norm() > 1e-9 * sc) ok = false;
            ce.lambda.push_back(l);
        }
        if (!ok) continue;
        bool dup = false;
        for (const auto& f : found) {
            Mat pair(r, 2);
            pair << f.x, x;
            if (rank(pair, 1e-8) < 2) dup = true;
        }
        if (dup) continue;
        ce.x = x;
        found.push_back(std::move(ce));
    }
    return found;
}

UnitaryDiagnostics unitary_line_diagnostics(const Node& a, const StructuredHermitian& H) { return diagnose(a, H, false); }

UnitaryDiagnostics unitary_circle_diagnostics(const Node& a, const StructuredHermitian& H) { return diagnose(a, H, true); }

}  // namespace ncfps
