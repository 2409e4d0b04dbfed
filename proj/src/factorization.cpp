#include "ncfps/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ncfps {

std::vector<int> SubspaceFamily::dims() const {
    std::vector<int> d;
    for (const auto& b : bases) d.push_back(static_cast<int>(b.cols()));
    return d;
}

void SubspaceFamily::validate(const Node& a) const {
    if (static_cast<int>(bases.size()) != a.n_vars) throw UsageError("subspace family needs one basis per component");
    for (int k = 0; k < a.n_vars; ++k) {
        const Mat& M = bases[k];
        if (M.rows() != a.dims[k]) throw UsageError("subspace basis " + std::to_string(k + 1) + " has the wrong row count");
        if (M.cols() > M.rows()) throw UsageError("subspace basis " + std::to_string(k + 1) + " has too many columns");
        if (M.cols() > 0 && rank(M, 1e-10 * M.norm()) < M.cols())
            throw UsageError("subspace basis " + std::to_string(k + 1) + " is not of full column rank");
    }
}

SubspaceFamily zero_family(const Node& a) {
    SubspaceFamily M;
    for (int r : a.dims) M.bases.push_back(Mat::Zero(r, 0));
    return M;
}

SubspaceFamily full_family(const Node& a) {
    SubspaceFamily M;
    for (int r : a.dims) M.bases.push_back(Mat::Identity(r, r));
    return M;
}

namespace {

Mat orth_or_empty(const Mat& M, int rows) { return M.cols() ? col_space(M) : Mat::Zero(rows, 0); }

Mat inverse_or_empty(const Mat& M) { return M.size() ? Mat(M.inverse()) : M; }

double min_singular(const Mat& M) {
    if (M.size() == 0) return 1.0;
    Eigen::JacobiSVD<Mat> svd(M);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

double expansion_mismatch(const Node& a, const Node& b) {
    int d = 6;
    while (d > 1 && count_words(a.n_vars, d) > 4000) --d;
    const Fps fa = expand(a, d), fb = expand(b, d);
    double sc = 1.0;
    for (const auto& [w, m] : fa.terms) sc = std::max(sc, m.norm());
    return max_coeff_diff(fa, fb) / sc;
}

// Smallest block-A-invariant family containing the given one.
SubspaceFamily invariant_closure(const Node& a, SubspaceFamily M) {
    for (int it = 0; it <= a.state_dim(); ++it) {
        bool grew = false;
        SubspaceFamily next;
        for (int k = 1; k <= a.n_vars; ++k) {
            const int rk = a.dims[k - 1];
            Mat X = M.bases[k - 1];
            for (int j = 1; j <= a.n_vars; ++j) {
                if (M.bases[j - 1].cols() == 0 || rk == 0) continue;
                const Mat Y = a.A_block(k, j) * M.bases[j - 1];
                Mat Z(rk, X.cols() + Y.cols());
                Z << X, Y;
                X = Z;
            }
            const Mat Q = orth_or_empty(X, rk);
            if (Q.cols() > M.bases[k - 1].cols()) grew = true;
            next.bases.push_back(Q);
        }
        M = std::move(next);
        if (!grew) break;
    }
    return M;
}

bool same_family(const SubspaceFamily& x, const SubspaceFamily& y) {
    for (std::size_t k = 0; k < x.bases.size(); ++k) {
        if (x.bases[k].cols() != y.bases[k].cols()) return false;
        if (x.bases[k].cols() == 0) continue;
        const Mat qx = col_space(x.bases[k]), qy = col_space(y.bases[k]);
        if ((qx * qx.adjoint() - qy * qy.adjoint()).norm() > 1e-8) return false;
    }
    return true;
}

bool is_trivial(const Node& a, const SubspaceFamily& M) {
    bool zero = true, full = true;
    for (int k = 0; k < a.n_vars; ++k) {
        if (M.bases[k].cols() != 0) zero = false;
        if (M.bases[k].cols() != a.dims[k]) full = false;
    }
    return zero || full;
}

void check_split(const Mat& D, const Mat& D1, const Mat& D2) {
    if (D1.rows() != D.rows() || D2.cols() != D.cols() || D1.cols() != D2.rows())
        throw UsageError("D split has the wrong shapes");
    if (min_singular(D1) < 1e-12 * std::max(1.0, D1.norm()) || min_singular(D2) < 1e-12 * std::max(1.0, D2.norm()))
        throw UsageError("D split factors must be invertible");
    if (rel_residual(D1 * D2 - D, {D1 * D2, D}) > 1e-10) throw UsageError("D split does not multiply to D");
}

StructuredHermitian compress(const StructuredHermitian& H, const SubspaceFamily& M) {
    StructuredHermitian out;
    for (std::size_t k = 0; k < M.bases.size(); ++k)
        out.blocks.push_back(M.bases[k].adjoint() * H.blocks[k] * M.bases[k]);
    return out;
}

void prefix_into(Residuals& out, const std::string& prefix, const Residuals& r) {
    for (const auto& [k, v] : r) out[prefix + k] = v;
}

Factorization finish(const Node& a, const SubspaceFamily& M, const SubspaceFamily& Mperp, const StructuredHermitian& H,
                     const Mat& D1, const Mat& D2) {
    Factorization f;
    std::tie(f.first, f.second) = project_factors(a, M, Mperp, D1, D2);
    f.H1 = compress(H, M);
    f.H2 = compress(H, Mperp);
    f.D1 = D1;
    f.D2 = D2;
    f.residuals["product"] = expansion_mismatch(product(f.first, f.second), a);
    return f;
}

void prepare(const Node& a, const SubspaceFamily& M, const StructuredHermitian& H) {
    M.validate(a);
    if (!is_block_A_invariant(a, M)) throw UsageError("subspace family is not A-invariant");
    if (!is_nondegenerate(M, H)) throw UsageError("subspace family is degenerate for H");
}

void require_small(const Residuals& r, double tol) {
    for (const auto& [name, v] : r)
        if (v > tol) throw NumericalError("factorization residual " + name + " = " + std::to_string(v));
}

}  // namespace

bool is_block_A_invariant(const Node& a, const SubspaceFamily& M, double tol) {
    M.validate(a);
    const double sc = std::max(1.0, a.A.norm());
    for (int k = 1; k <= a.n_vars; ++k) {
        const int rk = a.dims[k - 1];
        const Mat Q = orth_or_empty(M.bases[k - 1], rk);
        for (int j = 1; j <= a.n_vars; ++j) {
            const Mat& Mj = M.bases[j - 1];
            if (Mj.cols() == 0 || rk == 0) continue;
            const Mat X = a.A_block(k, j) * Mj;
            const Mat res = X - Q * (Q.adjoint() * X);
            if (res.norm() > tol * sc * std::max(1.0, Mj.norm())) return false;
        }
    }
    return true;
}

SubspaceFamily h_orthogonal_complement(const SubspaceFamily& M, const StructuredHermitian& H) {
    if (H.blocks.size() != M.bases.size()) throw UsageError("H and subspace family differ in component count");
    SubspaceFamily out;
    for (std::size_t k = 0; k < M.bases.size(); ++k) {
        const Mat& Mk = M.bases[k];
        const int rk = static_cast<int>(Mk.rows());
        if (Mk.cols() == 0) {
            out.bases.push_back(Mat::Identity(rk, rk));
            continue;
        }
        out.bases.push_back(rk ? null_space(Mk.adjoint() * H.blocks[k]) : Mat::Zero(0, 0));
    }
    return out;
}

bool is_nondegenerate(const SubspaceFamily& M, const StructuredHermitian& H) {
    if (H.blocks.size() != M.bases.size()) return false;
    for (std::size_t k = 0; k < M.bases.size(); ++k) {
        const Mat& Mk = M.bases[k];
        if (Mk.cols() == 0) continue;
        const Mat G = Mk.adjoint() * H.blocks[k] * Mk;
        if (min_singular(G) <= 1e-10 * H.blocks[k].norm() * Mk.squaredNorm()) return false;
    }
    return true;
}

std::vector<Mat> supporting_projection(const SubspaceFamily& M, const SubspaceFamily& Mperp) {
    if (M.bases.size() != Mperp.bases.size()) throw UsageError("kernel and range families differ in component count");
    std::vector<Mat> Pi;
    for (std::size_t k = 0; k < M.bases.size(); ++k) {
        const Mat& K = M.bases[k];
        const Mat& R = Mperp.bases[k];
        const int rk = static_cast<int>(K.rows());
        if (R.rows() != rk || K.cols() + R.cols() != rk) throw UsageError("kernel and range do not span the state space");
        Mat S(rk, rk);
        S << K, R;
        if (rk && min_singular(S) < 1e-12 * S.norm()) throw UsageError("kernel and range are not complementary");
        Mat E = Mat::Zero(rk, rk);
        E.bottomRightCorner(R.cols(), R.cols()).setIdentity();
        Pi.push_back(rk ? Mat(S * E * S.inverse()) : Mat::Zero(0, 0));
    }
    return Pi;
}

std::pair<SubspaceFamily, SubspaceFamily> projection_parts(const std::vector<Mat>& Pi) {
    SubspaceFamily ker, ran;
    for (const auto& P : Pi) {
        if (P.rows() != P.cols()) throw UsageError("projection blocks must be square");
        if ((P * P - P).norm() > 1e-10 * std::max(1.0, P.norm())) throw UsageError("block is not idempotent");
        const int r = static_cast<int>(P.rows());
        ker.bases.push_back(r ? null_space(P, 1e-10 * std::max(1.0, P.norm())) : Mat::Zero(0, 0));
        ran.bases.push_back(P.norm() > 0 ? col_space(P, 1e-10 * P.norm()) : Mat::Zero(r, 0));
    }
    return {ker, ran};
}

SplitNode split_coordinates(const Node& a, const SubspaceFamily& M, const SubspaceFamily& Mperp) {
    M.validate(a);
    Mperp.validate(a);
    std::vector<Mat> S;
    SplitNode out;
    std::vector<int> idx1, idx2;
    for (int k = 0; k < a.n_vars; ++k) {
        const int rk = a.dims[k], mk = static_cast<int>(M.bases[k].cols());
        if (mk + Mperp.bases[k].cols() != rk) throw UsageError("families do not split component " + std::to_string(k + 1));
        Mat Sk(rk, rk);
        Sk << M.bases[k], Mperp.bases[k];
        if (rk && min_singular(Sk) < 1e-12 * Sk.norm()) throw UsageError("families are not complementary");
        S.push_back(Sk);
        out.m.push_back(mk);
        out.dims1.push_back(mk);
        out.dims2.push_back(rk - mk);
        const int off = a.offset(k + 1);
        for (int i = 0; i < rk; ++i) (i < mk ? idx1 : idx2).push_back(off + i);
    }
    out.node = apply_similarity(a, S);
    const Node& t = out.node;
    const int p = t.p(), q = t.q();
    std::vector<int> all_p(p), all_q(q);
    for (int i = 0; i < p; ++i) all_p[i] = i;
    for (int i = 0; i < q; ++i) all_q[i] = i;
    out.A11 = t.A(idx1, idx1);
    out.A12 = t.A(idx1, idx2);
    out.A21 = t.A(idx2, idx1);
    out.A22 = t.A(idx2, idx2);
    out.B1 = t.B(idx1, all_q);
    out.B2 = t.B(idx2, all_q);
    out.C1 = t.C(all_p, idx1);
    out.C2 = t.C(all_p, idx2);
    return out;
}

std::pair<Node, Node> project_factors(const Node& a, const SubspaceFamily& ker, const SubspaceFamily& ran,
                                      const Mat& D1, const Mat& D2) {
    check_split(a.D, D1, D2);
    const SplitNode s = split_coordinates(a, ker, ran);
    const double sc = std::max(1.0, s.node.A.norm());
    if (s.A21.norm() > 1e-9 * sc) throw UsageError("kernel family is not A-invariant");
    const Mat Di = a.D.inverse();
    const Mat cross = s.A12 - s.B1 * Di * s.C2;
    if (cross.norm() > 1e-9 * std::max(sc, (s.B1 * Di * s.C2).norm())) throw UsageError("range family is not invariant under the associated A");
    const Mat D1i = D1.inverse(), D2i = D2.inverse();
    Node f1(s.dims1, s.A11, s.B1 * D2i, s.C1, D1);
    Node f2(s.dims2, s.A22, s.B2, D1i * s.C2, D2);
    return {f1, f2};
}

std::pair<Node, Node> project_factors(const Node& a, const std::vector<Mat>& Pi, const Mat& D1, const Mat& D2) {
    const auto [ker, ran] = projection_parts(Pi);
    return project_factors(a, ker, ran, D1, D2);
}

Factorization minimal_junitary_factorize_line(const Node& a, const Mat& J, const SubspaceFamily& M,
                                              std::optional<std::pair<Mat, Mat>> split, const Tol& tol) {
    const HResult hr = associated_H_line(a, J, tol);
    prepare(a, M, hr.H);
    const Mat D1 = split ? split->first : a.D;
    const Mat D2 = split ? split->second : Mat(Mat::Identity(a.q(), a.q()));
    for (const Mat* d : {&D1, &D2}) {
        if (d->rows() != J.rows() || d->cols() != J.cols()) throw UsageError("D split factors must be q x q");
        if (rel_residual(*d * J * d->adjoint() - J, {*d * J * d->adjoint(), J}) > 1e-10)
            throw UsageError("D split factors must be J-unitary");
    }
    Factorization f = finish(a, M, h_orthogonal_complement(M, hr.H), hr.H, D1, D2);
    prefix_into(f.residuals, "first.", line_residuals(f.first, J, f.H1.full()));
    prefix_into(f.residuals, "second.", line_residuals(f.second, J, f.H2.full()));
    require_small(f.residuals, tol.res);
    return f;
}

Factorization minimal_junitary_factorize_circle(const Node& a, const Mat& J, const SubspaceFamily& M,
                                                std::optional<cplx> param, const Tol& tol) {
    const HResult hr = associated_H_circle(a, J, tol);
    prepare(a, M, hr.H);
    if (min_singular(a.D) < 1e-12 * std::max(1.0, a.D.norm())) throw UsageError("circle factorization needs invertible D");
    const SubspaceFamily Mperp = h_orthogonal_complement(M, hr.H);
    const SplitNode s = split_coordinates(a, M, Mperp);
    const int m = static_cast<int>(s.A11.rows());
    const Mat Im = Mat::Identity(m, m);
    cplx p = 1.0;
    if (param) {
        if (std::abs(std::abs(*param) - 1.0) > 1e-12) throw UsageError("circle parameter must be unimodular");
        p = *param;
        if (m && min_singular(Im - p * s.A11.adjoint()) < 1e-10 * std::max(1.0, s.A11.norm()))
            throw UsageError("circle parameter lies on the spectrum of the first factor");
    } else if (m) {
        double best = -1;
        for (int j = 0; j < 16; ++j) {
            const cplx c = std::polar(1.0, 2 * std::numbers::pi * j / 16);
            const double v = min_singular(Im - c * s.A11.adjoint());
            if (v > best) {
                best = v;
                p = c;
            }
        }
    }
    const Mat H1i = inverse_or_empty(compress(hr.H, M).full());
    const Mat Iq = Mat::Identity(a.q(), a.q());
    const Mat D1 = m ? Mat(Iq - s.C1 * H1i * (Im - p * s.A11.adjoint()).inverse() * s.C1.adjoint() * J) : Iq;
    if (min_singular(D1) < 1e-12) throw NumericalError("first factor constant is singular");
    const Mat D2 = D1.inverse() * a.D;
    Factorization f = finish(a, M, Mperp, hr.H, D1, D2);
    prefix_into(f.residuals, "first.", circle_residuals(f.first, J, f.H1.full()));
    prefix_into(f.residuals, "second.", circle_residuals(f.second, J, f.H2.full()));
    require_small(f.residuals, tol.res);
    return f;
}

std::vector<FamilyCandidate> enumerate_invariant_families(const Node& a, const StructuredHermitian& H,
                                                          int max_results) {
    std::vector<FamilyCandidate> out;
    auto add = [&](const SubspaceFamily& M) {
        if (static_cast<int>(out.size()) >= max_results) return;
        for (const auto& c : out)
            if (same_family(c.M, M)) return;
        FamilyCandidate c{M, is_trivial(a, M), is_nondegenerate(M, H)};
        out.push_back(std::move(c));
    };
    add(zero_family(a));
    add(full_family(a));
    const int r = a.state_dim();
    if (r == 0) return out;

    if (r <= 16) {
        for (long mask = 1; mask + 1 < (1L << r); ++mask) {
            SubspaceFamily M;
            for (int k = 1; k <= a.n_vars; ++k) {
                const int rk = a.dims[k - 1], off = a.offset(k);
                std::vector<int> cols;
                for (int i = 0; i < rk; ++i)
                    if (mask >> (off + i) & 1) cols.push_back(i);
                Mat Mk = Mat::Zero(rk, static_cast<int>(cols.size()));
                for (std::size_t c = 0; c < cols.size(); ++c) Mk(cols[c], static_cast<int>(c)) = 1;
                M.bases.push_back(Mk);
            }
            if (is_block_A_invariant(a, M)) add(M);
        }
    }

    std::vector<Vec> seeds;
    for (const auto& ce : common_eigenvectors(a)) seeds.push_back(ce.x);
    for (int k = 1; k <= a.n_vars; ++k) {
        if (a.dims[k - 1] == 0) continue;
        Mat Ak = Mat::Zero(r, r);
        Ak.middleCols(a.offset(k), a.dims[k - 1]) = a.A.middleCols(a.offset(k), a.dims[k - 1]);
        Eigen::ComplexEigenSolver<Mat> es(Ak);
        for (int i = 0; i < r; ++i) seeds.push_back(es.eigenvectors().col(i));
    }
    for (const Vec& x : seeds) {
        SubspaceFamily M;
        for (int k = 1; k <= a.n_vars; ++k) {
            const int rk = a.dims[k - 1];
            const Vec xk = x.segment(a.offset(k), rk);
            M.bases.push_back(xk.norm() > 1e-10 * x.norm() ? Mat(xk.normalized()) : Mat::Zero(rk, 0));
        }
        M = invariant_closure(a, M);
        if (is_block_A_invariant(a, M, 1e-8)) add(M);
    }
    std::stable_partition(out.begin(), out.end(), [](const FamilyCandidate& c) { return c.trivial; });
    return out;
}

}  // namespace ncfps
