#include "ncfps/grnode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncfps/sampling.hpp"

namespace ncfps {

Node::Node(std::vector<int> d, Mat a, Mat b, Mat c, Mat dd)
    : n_vars(static_cast<int>(d.size())), dims(std::move(d)), A(std::move(a)), B(std::move(b)),
      C(std::move(c)), D(std::move(dd)) {
    validate();
}

int Node::state_dim() const { return std::accumulate(dims.begin(), dims.end(), 0); }

int Node::offset(int k) const {
    if (k < 1 || k > n_vars) throw UsageError("component index out of range");
    return std::accumulate(dims.begin(), dims.begin() + (k - 1), 0);
}

Mat Node::A_block(int k, int j) const {
    return A.block(offset(k), offset(j), dims[k - 1], dims[j - 1]);
}
Mat Node::B_block(int k) const { return B.middleRows(offset(k), dims[k - 1]); }
Mat Node::C_block(int k) const { return C.middleCols(offset(k), dims[k - 1]); }

void Node::validate() const {
    if (n_vars < 1 || static_cast<int>(dims.size()) != n_vars) throw UsageError("node: dims must list N >= 1 sizes");
    for (int r : dims)
        if (r < 0) throw UsageError("node: negative state dimension");
    const int r = state_dim();
    if (A.rows() != r || A.cols() != r) throw UsageError("node: A must be r x r");
    if (B.rows() != r || B.cols() != D.cols()) throw UsageError("node: B must be r x q");
    if (C.cols() != r || C.rows() != D.rows()) throw UsageError("node: C must be p x r");
}

Node constant_node(int n_vars, const Mat& D) {
    return Node(std::vector<int>(n_vars, 0), Mat::Zero(0, 0), Mat::Zero(0, D.cols()), Mat::Zero(D.rows(), 0), D);
}

Mat transfer_coeff(const Node& a, const Word& w) {
    if (!valid_word(w, a.n_vars)) throw UsageError("transfer_coeff: letter out of range");
    if (w.empty()) return a.D;
    Mat x = a.C_block(w[0]);
    for (std::size_t i = 1; i < w.size(); ++i) x = x * a.A_block(w[i - 1], w[i]);
    return x * a.B_block(w.back());
}

namespace {

// Depth-first walk over words; row carries C_{i1} A_{i1 i2} ... up to the last letter.
void expand_rec(const Node& a, const std::vector<std::vector<Mat>>& Ablk, const std::vector<Mat>& Bblk,
                Word& w, const Mat& row, int degree, Fps& out) {
    out.set(w, row * Bblk[w.back() - 1]);
    if (static_cast<int>(w.size()) == degree) return;
    for (int g = 1; g <= a.n_vars; ++g) {
        const Mat next = row * Ablk[w.back() - 1][g - 1];
        w.push_back(g);
        expand_rec(a, Ablk, Bblk, w, next, degree, out);
        w.pop_back();
    }
}

}  // namespace

Fps expand(const Node& a, int degree) {
    Fps out(a.n_vars, a.p(), a.q(), degree);
    out.set({}, a.D);
    if (a.state_dim() == 0 || degree == 0) return out;
    std::vector<std::vector<Mat>> Ablk(a.n_vars, std::vector<Mat>(a.n_vars));
    std::vector<Mat> Bblk(a.n_vars);
    for (int k = 1; k <= a.n_vars; ++k) {
        Bblk[k - 1] = a.B_block(k);
        for (int j = 1; j <= a.n_vars; ++j) Ablk[k - 1][j - 1] = a.A_block(k, j);
    }
    Word w;
    for (int g = 1; g <= a.n_vars; ++g) {
        w.assign(1, g);
        expand_rec(a, Ablk, Bblk, w, a.C_block(g), degree, out);
    }
    return out;
}

Mat delta(const std::vector<int>& dims, const std::vector<Mat>& Z) {
    if (dims.size() != Z.size()) throw UsageError("delta: tuple length mismatch");
    std::vector<Mat> blocks;
    for (std::size_t k = 0; k < dims.size(); ++k) blocks.push_back(kron(Mat::Identity(dims[k], dims[k]), Z[k]));
    return blockdiag(blocks);
}

namespace {

Eigen::Index tuple_size(const std::vector<Mat>& Z, int n_vars) {
    if (static_cast<int>(Z.size()) != n_vars) throw UsageError("tuple length must equal n_vars");
    const Eigen::Index n = Z[0].rows();
    for (const auto& z : Z)
        if (z.rows() != n || z.cols() != n) throw UsageError("ragged matrix tuple");
    return n;
}

}  // namespace

Mat eval_closed(const Node& a, const std::vector<Mat>& Z) {
    const Eigen::Index n = tuple_size(Z, a.n_vars);
    const Mat In = Mat::Identity(n, n);
    const Mat Dz = kron(a.D, In);
    if (a.state_dim() == 0) return Dz;
    const Mat Del = delta(a.dims, Z);
    const Mat M = Mat::Identity(Del.rows(), Del.cols()) - Del * kron(a.A, In);
    Eigen::PartialPivLU<Mat> lu(M);
    if (lu.rcond() < 1e-13) throw NumericalError("eval_closed: singular resolvent");
    return Dz + kron(a.C, In) * lu.solve(Del * kron(a.B, In));
}

Node product(const Node& a, const Node& b) {
    if (a.n_vars != b.n_vars) throw UsageError("product: different numbers of variables");
    if (a.q() != b.p()) throw UsageError("product: inner dimensions differ");
    const int ra = a.state_dim(), rb = b.state_dim(), r = ra + rb;
    Mat As = Mat::Zero(r, r);
    As.topLeftCorner(ra, ra) = a.A;
    As.topRightCorner(ra, rb) = a.B * b.C;
    As.bottomRightCorner(rb, rb) = b.A;
    Mat Bs(r, b.q());
    Bs << a.B * b.D, b.B;
    Mat Cs(a.p(), r);
    Cs << a.C, a.D * b.C;
    // Component j of the product holds a's states of component j, then b's.
    std::vector<int> dims(a.n_vars), perm(r);
    int pos = 0;
    for (int j = 1; j <= a.n_vars; ++j) {
        dims[j - 1] = a.dims[j - 1] + b.dims[j - 1];
        for (int i = 0; i < a.dims[j - 1]; ++i) perm[a.offset(j) + i] = pos++;
        for (int i = 0; i < b.dims[j - 1]; ++i) perm[ra + b.offset(j) + i] = pos++;
    }
    Mat A(r, r), B(r, b.q()), C(a.p(), r);
    for (int i = 0; i < r; ++i) {
        B.row(perm[i]) = Bs.row(i);
        C.col(perm[i]) = Cs.col(i);
        for (int j = 0; j < r; ++j) A(perm[i], perm[j]) = As(i, j);
    }
    return Node(dims, A, B, C, a.D * b.D);
}

Node adjoint(const Node& a) { return Node(a.dims, a.A.adjoint(), a.C.adjoint(), a.B.adjoint(), a.D.adjoint()); }

Node associated(const Node& a) {
    if (a.p() != a.q()) throw UsageError("associated: D must be square");
    Eigen::JacobiSVD<Mat> svd(a.D);
    const auto& sv = svd.singularValues();
    if (sv.size() && (sv(0) == 0.0 || sv(sv.size() - 1) < 1e-12 * sv(0))) throw NumericalError("associated: D is singular");
    const Mat Di = a.D.inverse();
    return Node(a.dims, a.A - a.B * Di * a.C, a.B * Di, -Di * a.C, Di);
}

Mat obs_word(const Node& a, const Word& w, int k) {
    if (w.empty()) return a.C_block(k);
    Mat x = a.C_block(w[0]);
    for (std::size_t i = 1; i < w.size(); ++i) x = x * a.A_block(w[i - 1], w[i]);
    return x * a.A_block(w.back(), k);
}

Mat ctrl_word(const Node& a, const Word& w, int k) {
    // (A sharp B)^{g_k w^T} = A_{k, w_m} A_{w_m, w_{m-1}} ... A_{w_2, w_1} B_{w_1}
    if (w.empty()) return a.B_block(k);
    Mat y = a.B_block(w[0]);
    for (std::size_t i = 1; i < w.size(); ++i) y = a.A_block(w[i], w[i - 1]) * y;
    return a.A_block(k, w.back()) * y;
}

namespace {

constexpr std::size_t word_budget = 1u << 18;

std::vector<Word> words_below(int n_vars, int bound) {
    if (bound <= 0) return {};
    if (count_words(n_vars, bound - 1) > word_budget)
        throw NumericalError("truncated matrix too large for the word budget");
    return enumerate(n_vars, bound - 1);
}

}  // namespace

Mat truncated_obs(const Node& a, int k) {
    const int rk = a.dims.at(k - 1);
    const auto words = words_below(a.n_vars, a.p() * a.state_dim());
    Mat O = Mat::Zero(static_cast<Eigen::Index>(words.size()) * a.p(), rk);
    for (std::size_t i = 0; i < words.size(); ++i) O.middleRows(i * a.p(), a.p()) = obs_word(a, words[i], k);
    return O;
}

Mat truncated_ctrl(const Node& a, int k) {
    const int rk = a.dims.at(k - 1);
    const auto words = words_below(a.n_vars, a.state_dim() * a.q());
    Mat Ct = Mat::Zero(rk, static_cast<Eigen::Index>(words.size()) * a.q());
    for (std::size_t i = 0; i < words.size(); ++i) Ct.middleCols(i * a.q(), a.q()) = ctrl_word(a, words[i], k);
    return Ct;
}

MinimalityReport minimality(const Node& a, double rank_tol) {
    MinimalityReport rep;
    for (int k = 1; k <= a.n_vars; ++k) {
        const int rk = a.dims[k - 1];
        const int ro = rk == 0 ? 0 : rank(truncated_obs(a, k), rank_tol);
        const int rc = rk == 0 ? 0 : rank(truncated_ctrl(a, k), rank_tol);
        rep.obs_ranks.push_back(ro);
        rep.ctrl_ranks.push_back(rc);
        rep.observable = rep.observable && ro == rk;
        rep.controllable = rep.controllable && rc == rk;
    }
    return rep;
}

bool is_observable(const Node& a, double rank_tol) { return minimality(a, rank_tol).observable; }
bool is_controllable(const Node& a, double rank_tol) { return minimality(a, rank_tol).controllable; }
bool is_minimal(const Node& a, double rank_tol) { return minimality(a, rank_tol).minimal(); }

Mat hankel(const Fps& f, int k, int row_deg, int col_deg) {
    if (k < 1 || k > f.n_vars) throw UsageError("hankel: component index out of range");
    if (row_deg + 1 + col_deg > f.degree) throw UsageError("hankel: series degree too small");
    const auto rw = enumerate(f.n_vars, row_deg);
    const auto cw = enumerate(f.n_vars, col_deg);
    Mat Hk(static_cast<Eigen::Index>(rw.size()) * f.rows, static_cast<Eigen::Index>(cw.size()) * f.cols);
    for (std::size_t i = 0; i < rw.size(); ++i)
        for (std::size_t j = 0; j < cw.size(); ++j)
            Hk.block(i * f.rows, j * f.cols, f.rows, f.cols) = f.coeff(concat(concat(rw[i], {k}), transpose(cw[j])));
    return Hk;
}

namespace {

// Compresses a onto per-component subspaces: A_kj <- L_k A_kj R_j etc.
Node compress(const Node& a, const std::vector<Mat>& L, const std::vector<Mat>& R) {
    std::vector<int> dims;
    for (const auto& l : L) dims.push_back(static_cast<int>(l.rows()));
    const Mat Lb = blockdiag(L), Rb = blockdiag(R);
    return Node(dims, Lb * a.A * Rb, Lb * a.B, a.C * Rb, a.D);
}

void check_small(double v, double scale, const char* what) {
    if (v > 1e-8 * scale) throw NumericalError(std::string("reduce_to_minimal: ") + what);
}

}  // namespace

Reduction reduce_to_minimal(const Node& a, double rank_tol) {
    const double sc = scale_of({&a.A, &a.B, &a.C});
    // Stage 1: restrict to the reachable family R_k = span of truncated_ctrl(k).
    std::vector<Mat> Q(a.n_vars);
    for (int k = 1; k <= a.n_vars; ++k)
        Q[k - 1] = a.dims[k - 1] ? col_space(truncated_ctrl(a, k), rank_tol) : Mat::Zero(0, 0);
    for (int k = 1; k <= a.n_vars; ++k) {
        const Mat& Qk = Q[k - 1];
        const Mat Pperp = Mat::Identity(Qk.rows(), Qk.rows()) - Qk * Qk.adjoint();
        if (Qk.rows()) check_small((Pperp * a.B_block(k)).norm(), sc, "B not in reachable family");
        for (int j = 1; j <= a.n_vars; ++j)
            if (Qk.rows() && Q[j - 1].cols())
                check_small((Pperp * a.A_block(k, j) * Q[j - 1]).norm(), sc, "reachable family not invariant");
    }
    std::vector<Mat> Qa;
    for (const auto& q : Q) Qa.push_back(q.adjoint());
    const Node s1 = compress(a, Qa, Q);

    // Stage 2: quotient by the unobservable family N_k = ker truncated_obs(k).
    std::vector<Mat> V(a.n_vars), Nk(a.n_vars);
    for (int k = 1; k <= s1.n_vars; ++k) {
        const int rk = s1.dims[k - 1];
        if (rk == 0) {
            V[k - 1] = Mat::Zero(0, 0);
            Nk[k - 1] = Mat::Zero(0, 0);
            continue;
        }
        const Mat O = truncated_obs(s1, k);
        V[k - 1] = col_space(O.adjoint(), rank_tol);
        Nk[k - 1] = null_space(O, rank_tol);
        // Keep the two bases complementary even if the rank rule splits a borderline value.
        if (V[k - 1].cols() + Nk[k - 1].cols() != rk) Nk[k - 1] = null_space(V[k - 1].adjoint());
    }
    for (int k = 1; k <= s1.n_vars; ++k) {
        if (!Nk[k - 1].cols()) continue;
        check_small((s1.C_block(k) * Nk[k - 1]).norm(), sc, "C does not annihilate unobservable family");
        for (int i = 1; i <= s1.n_vars; ++i)
            if (V[i - 1].cols())
                check_small((V[i - 1].adjoint() * s1.A_block(i, k) * Nk[k - 1]).norm(), sc,
                            "unobservable family not invariant");
    }
    std::vector<Mat> Va;
    for (const auto& v : V) Va.push_back(v.adjoint());
    Reduction out{compress(s1, Va, V), {}, {}};
    for (int k = 0; k < a.n_vars; ++k) {
        out.left.push_back(V[k].adjoint() * Q[k].adjoint());
        out.right.push_back(Q[k] * V[k]);
    }
    return out;
}

Node apply_similarity(const Node& a, const std::vector<Mat>& T) {
    if (static_cast<int>(T.size()) != a.n_vars) throw UsageError("apply_similarity: need one block per component");
    std::vector<Mat> Ti;
    for (int k = 0; k < a.n_vars; ++k) {
        if (T[k].rows() != a.dims[k] || T[k].cols() != a.dims[k]) throw UsageError("apply_similarity: block size mismatch");
        if (a.dims[k] == 0) {
            Ti.push_back(T[k]);
            continue;
        }
        Eigen::FullPivLU<Mat> lu(T[k]);
        if (!lu.isInvertible()) throw NumericalError("apply_similarity: singular block");
        Ti.push_back(lu.inverse());
    }
    const Mat Tb = blockdiag(T), Tib = blockdiag(Ti);
    return Node(a.dims, Tib * a.A * Tb, Tib * a.B, a.C * Tb, a.D);
}

std::vector<Mat> similarity_between(const Node& a1, const Node& a2, const Tol& tol) {
    if (a1.dims != a2.dims || a1.p() != a2.p() || a1.q() != a2.q())
        throw UsageError("similarity_between: nodes have different shapes");
    if (!is_minimal(a1, tol.rank) || !is_minimal(a2, tol.rank))
        throw NumericalError("similarity_between: nodes are not minimal");
    const int r = a1.state_dim();
    int deg = a1.p() * r + r * a1.q();
    while (deg > 0 && count_words(a1.n_vars, deg) > 20000) --deg;
    // Early exit for different series; the intertwining residual below is the real check.
    const Fps f1 = expand(a1, deg), f2 = expand(a2, deg);
    const double nA = std::max({1.0, a1.A.operatorNorm(), a2.A.operatorNorm()});
    const double nBC = std::max({1.0, a1.B.norm() * a1.C.norm(), a2.B.norm() * a2.C.norm()});
    for (const auto& w : enumerate(a1.n_vars, deg)) {
        const double bound = 1e-8 * nBC * std::pow(nA, static_cast<double>(w.size())) + 1e-8 * a1.D.norm();
        if ((f1.coeff(w) - f2.coeff(w)).norm() > bound)
            throw NumericalError("similarity_between: transfer functions differ at " + to_string(w));
    }
    std::vector<Mat> T;
    for (int k = 1; k <= a1.n_vars; ++k) {
        if (a1.dims[k - 1] == 0) {
            T.push_back(Mat::Zero(0, 0));
            continue;
        }
        T.push_back(pinv(truncated_obs(a2, k)) * truncated_obs(a1, k));
    }
    const Node chk = apply_similarity(a2, T);
    const double sc = scale_of({&a1.A, &a1.B, &a1.C, &a2.A, &a2.B, &a2.C});
    const double res = (chk.A - a1.A).norm() + (chk.B - a1.B).norm() + (chk.C - a1.C).norm();
    if (res > tol.res * sc) throw NumericalError("similarity_between: intertwining residual too large");
    return T;
}

double sampling_radius(const Node& a) {
    const double nA = a.A.size() ? a.A.operatorNorm() : 0.0;
    return nA > 0 ? 1.0 / nA : 1.0;
}

Mat obs_kernel_sample(const Node& a, int k, int n, int samples, std::uint64_t seed) {
    if (n < 1 || samples < 1) throw UsageError("obs_kernel_sample: need n >= 1 and samples >= 1");
    const int rk = a.dims.at(k - 1);
    if (rk == 0) return Mat::Zero(0, 0);
    Rng rng(seed);
    const double eps = sampling_radius(a);
    const Mat In = Mat::Identity(n, n);
    Mat stacked(0, rk * n);
    for (int s = 0; s < samples; ++s) {
        const auto Z = small_tuple(rng, a.n_vars, n, eps);
        const Mat Del = delta(a.dims, Z);
        const Mat M = Mat::Identity(Del.rows(), Del.cols()) - Del * kron(a.A, In);
        const Mat phi = kron(a.C, In) * M.inverse();
        Mat grown(stacked.rows() + phi.rows(), rk * n);
        grown << stacked, phi.middleCols(a.offset(k) * n, rk * n);
        stacked = grown;
    }
    return null_space(stacked);
}

}  // namespace ncfps
