#include "ncfps/selfadjoint.hpp"

#include <algorithm>

#include "ncfps/sampling.hpp"

namespace ncfps {

namespace {

const cplx I1(0, 1);

void require_square(const Node& a) {
    if (a.p() != a.q()) throw UsageError("selfadjointness needs square D");
}

bool hermitian(const Mat& M) { return (M - M.adjoint()).norm() <= 1e-10 * std::max(1.0, M.norm()); }

Classification classify(const Node& a, bool circle, const Tol& tol) {
    require_square(a);
    Classification c;
    const double dres = rel_residual(a.D - a.D.adjoint(), {a.D});
    if (!circle && dres > tol.res) {
        c.reason = "D is not Hermitian";
        c.residuals["d_hermitian"] = dres;
        return c;
    }
    const Node beta = embed_J1(a);
    const Classification inner = circle ? is_matrix_J_unitary_circle(beta, j1_signature(a.q()), tol)
                                        : is_matrix_J_unitary_line(beta, j1_signature(a.q()), tol);
    c.reason = inner.reason;
    for (const auto& [k, v] : inner.residuals) c.residuals["embedded." + k] = v;
    if (!inner.holds) return c;
    c.H = inner.H;
    const Residuals direct = circle ? selfadjoint_circle_residuals(a, c.H.full()) : selfadjoint_line_residuals(a, c.H.full());
    for (const auto& [k, v] : direct) c.residuals[k] = v;
    for (const auto& [k, v] : direct)
        if (v > tol.res) {
            c.reason = "residual " + k + " too large";
            return c;
        }
    c.holds = true;
    return c;
}

StructuredHermitian compress(const StructuredHermitian& H, const SubspaceFamily& M) {
    StructuredHermitian out;
    for (std::size_t k = 0; k < M.bases.size(); ++k)
        out.blocks.push_back(M.bases[k].adjoint() * H.blocks[k] * M.bases[k]);
    return out;
}

Decomposition decompose(const Node& a, const StructuredHermitian& H, const SubspaceFamily& M, bool circle,
                        const std::function<Mat(const SplitNode&, const StructuredHermitian&)>& first_constant,
                        const Tol& tol) {
    require_square(a);
    M.validate(a);
    if (H.blocks.size() != M.bases.size()) throw UsageError("H and subspace family differ in component count");
    if (!is_block_A_invariant(a, M)) throw UsageError("subspace family is not A-invariant");
    if (!is_nondegenerate(M, H)) throw UsageError("subspace family is degenerate for H");
    const SubspaceFamily Mperp = h_orthogonal_complement(M, H);
    const SplitNode s = split_coordinates(a, M, Mperp);
    const double sc = std::max(1.0, s.node.A.norm());
    if (s.A12.norm() > 1e-9 * sc || s.A21.norm() > 1e-9 * sc)
        throw UsageError("complement is not A-invariant; is H the node's selfadjoint H?");
    Decomposition d;
    d.H1 = compress(H, M);
    d.H2 = compress(H, Mperp);
    const Mat D1 = first_constant(s, d.H1);
    const Mat D2 = a.D - D1;
    d.first = Node(s.dims1, s.A11, s.B1, s.C1, D1);
    d.second = Node(s.dims2, s.A22, s.B2, s.C2, D2);
    auto put = [&](const std::string& prefix, const Residuals& r) {
        for (const auto& [k, v] : r) d.residuals[prefix + k] = v;
    };
    if (circle) {
        put("first.", selfadjoint_circle_residuals(d.first, d.H1.full()));
        put("second.", selfadjoint_circle_residuals(d.second, d.H2.full()));
    } else {
        put("first.", selfadjoint_line_residuals(d.first, d.H1.full()));
        put("second.", selfadjoint_line_residuals(d.second, d.H2.full()));
    }
    int deg = 6;
    while (deg > 1 && count_words(a.n_vars, deg) > 4000) --deg;
    const Fps f = expand(a, deg);
    double fs = 1.0;
    for (const auto& [w, m] : f.terms) fs = std::max(fs, m.norm());
    d.residuals["sum"] = max_coeff_diff(add(expand(d.first, deg), expand(d.second, deg)), f) / fs;
    for (const auto& [k, v] : d.residuals)
        if (v > tol.res) throw NumericalError("decomposition residual " + k + " = " + std::to_string(v));
    return d;
}

}  // namespace

Mat j1_signature(int q) {
    Mat J = Mat::Zero(2 * q, 2 * q);
    J.topRightCorner(q, q).setIdentity();
    J.bottomLeftCorner(q, q).setIdentity();
    return J;
}

Node embed_J1(const Node& a) {
    require_square(a);
    const int r = a.state_dim(), q = a.q();
    Mat B = Mat::Zero(r, 2 * q);
    B.rightCols(q) = a.B;
    Mat C = Mat::Zero(2 * q, r);
    C.topRows(q) = I1 * a.C;
    Mat D = Mat::Identity(2 * q, 2 * q);
    D.topRightCorner(q, q) = I1 * a.D;
    return Node(a.dims, a.A, B, C, D);
}

Residuals selfadjoint_line_residuals(const Node& a, const Mat& H) {
    Residuals r;
    r["d_hermitian"] = rel_residual(a.D - a.D.adjoint(), {a.D});
    r["lyapunov"] = rel_residual(a.A.adjoint() * H + H * a.A, {a.A.adjoint() * H, H * a.A});
    r["c_relation"] = rel_residual(a.C - I1 * a.B.adjoint() * H, {a.C, a.B.adjoint() * H});
    return r;
}

Residuals selfadjoint_circle_residuals(const Node& a, const Mat& H) {
    Residuals r;
    const Mat BHB = a.B.adjoint() * H * a.B;
    r["stein"] = rel_residual(a.A.adjoint() * H * a.A - H, {a.A.adjoint() * H * a.A, H});
    r["d_relation"] = rel_residual(a.D - a.D.adjoint() - I1 * BHB, {a.D, BHB});
    r["c_relation"] = rel_residual(a.C - I1 * a.B.adjoint() * H * a.A, {a.C, a.B.adjoint() * H * a.A});
    return r;
}

Classification is_matrix_selfadjoint_line(const Node& a, const Tol& tol) { return classify(a, false, tol); }

Classification is_matrix_selfadjoint_circle(const Node& a, const Tol& tol) { return classify(a, true, tol); }

SampleReport sample_check_selfadjoint(const Node& a, bool circle, int n, int samples, std::uint64_t seed) {
    require_square(a);
    Rng rng(seed);
    SampleReport rep;
    for (int s = 0; s < samples; ++s) {
        const auto Z = circle ? unitary_tuple(rng, a.n_vars, n) : skew_hermitian_tuple(rng, a.n_vars, n, 2.0);
        try {
            const Mat F = eval_closed(a, Z);
            rep.max_residual = std::max(rep.max_residual, (F - F.adjoint()).norm());
            ++rep.used;
        } catch (const NumericalError&) {
            ++rep.skipped;
        }
    }
    return rep;
}

Decomposition selfadjoint_decompose(const Node& a, const StructuredHermitian& H, const SubspaceFamily& M,
                                    std::optional<std::pair<Mat, Mat>> split, const Tol& tol) {
    require_square(a);
    Mat D1 = Mat::Zero(a.q(), a.q());
    if (split) {
        const auto& [d1, d2] = *split;
        if (d1.rows() != a.q() || d1.cols() != a.q() || d2.rows() != a.q() || d2.cols() != a.q())
            throw UsageError("D split factors must be q x q");
        if (!hermitian(d1) || !hermitian(d2)) throw UsageError("D split must be Hermitian");
        if (rel_residual(d1 + d2 - a.D, {d1, d2, a.D}) > 1e-10) throw UsageError("D split does not add up to D");
        D1 = d1;
    }
    return decompose(a, H, M, false, [&](const SplitNode&, const StructuredHermitian&) { return D1; }, tol);
}

Decomposition circle_selfadjoint_decompose(const Node& a, const StructuredHermitian& H, const SubspaceFamily& M,
                                           std::optional<Mat> S, const Tol& tol) {
    require_square(a);
    const Mat Sm = S ? *S : Mat(Mat::Zero(a.q(), a.q()));
    if (Sm.rows() != a.q() || Sm.cols() != a.q() || !hermitian(Sm)) throw UsageError("S must be a Hermitian q x q matrix");
    return decompose(
        a, H, M, true,
        [&](const SplitNode& s, const StructuredHermitian& H1) {
            return Mat(0.5 * I1 * s.B1.adjoint() * H1.full() * s.B1 + Sm);
        },
        tol);
}

}  // namespace ncfps
