#include "ncfps/kernels.hpp"

#include <algorithm>
#include <array>
#include <functional>

namespace ncfps {

const Mat& KernelTable::at(const Word& w, const Word& w2) const {
    const auto it = entries.find({w, w2});
    if (it == entries.end()) throw UsageError("kernel entry outside the table: (" + to_string(w) + ", " + to_string(w2) + ")");
    return it->second;
}

double KernelTable::hermitian_defect() const {
    double d = 0;
    for (const auto& [key, m] : entries) d = std::max(d, (m - at(key.second, key.first).adjoint()).norm());
    return d;
}

double max_entry_diff(const KernelTable& a, const KernelTable& b) {
    if (a.size != b.size) throw UsageError("kernel tables have different coefficient sizes");
    const int d = std::min(a.degree, b.degree);
    double m = 0;
    for (const auto& [key, v] : a.entries)
        if (static_cast<int>(key.first.size()) <= d && static_cast<int>(key.second.size()) <= d)
            m = std::max(m, (v - b.at(key.first, key.second)).norm());
    return m;
}

Fps backward_shift(const Fps& f, int k) {
    if (k < 1 || k > f.n_vars) throw UsageError("backward shift: component out of range");
    Fps out(f.n_vars, f.rows, f.cols, std::max(0, f.degree - 1));
    if (f.degree == 0) return out;
    for (const auto& [w, m] : f.terms) {
        if (w.empty() || w.back() != k) continue;
        out.set(Word(w.begin(), w.end() - 1), m);
    }
    return out;
}

namespace {

void check_k(int k, int n_vars) {
    if (k < 1 || k > n_vars) throw UsageError("kernel component out of range");
}

void check_series(const Fps& f, const Mat& J, int k, int degree) {
    check_k(k, f.n_vars);
    if (degree < 0) throw UsageError("kernel degree must be non-negative");
    if (f.rows != f.cols) throw UsageError("kernel needs square coefficients");
    if (J.rows() != f.cols || J.cols() != f.cols || !is_signature(J)) throw UsageError("J must be a q x q signature matrix");
    if (f.degree < 2 * degree + 1)
        throw UsageError("series degree " + std::to_string(f.degree) + " is too low for kernel degree " +
                         std::to_string(degree) + " (needs " + std::to_string(2 * degree + 1) + ")");
}

KernelTable empty_table(int k, int degree, int size) {
    KernelTable K;
    K.k = k;
    K.degree = degree;
    K.size = size;
    return K;
}

// sum_{v v' = w'} (-1)^{|v'|+1} f_{w g_k v'^T} J f_v*
Mat series_entry(const Fps& f, const Mat& J, int k, const Word& w, const Word& w2) {
    Mat out = Mat::Zero(f.rows, f.rows);
    for (std::size_t cut = 0; cut <= w2.size(); ++cut) {
        const Word v(w2.begin(), w2.begin() + cut), vp(w2.begin() + cut, w2.end());
        Word left = w;
        left.push_back(k);
        left = concat(left, transpose(vp));
        const double sign = vp.size() % 2 == 0 ? -1.0 : 1.0;
        out += sign * f.coeff(left) * J * f.coeff(v).adjoint();
    }
    return out;
}

// Polynomials in the doubled alphabet plus lambda, truncated as they are built.
using Poly = std::map<Word, cplx>;
using Mat2 = std::array<Poly, 4>;  // row-major 2 x 2

struct FormalAlphabet {
    int n, d;
    int lambda() const { return 2 * n + 1; }
    bool keep(const Word& w) const {
        int zs = 0, zps = 0, ls = 0;
        for (int l : w) (l <= n ? zs : l <= 2 * n ? zps : ls)++;
        return ls <= 1 && zs <= d && zps <= d;
    }
};

void poly_mul_add(const Poly& x, const Poly& y, Poly& out, const FormalAlphabet& al) {
    for (const auto& [u, a] : x)
        for (const auto& [v, b] : y) {
            Word w = concat(u, v);
            if (al.keep(w)) out[w] += a * b;
        }
}

Mat2 mat2_mul(const Mat2& x, const Mat2& y, const FormalAlphabet& al) {
    Mat2 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int l = 0; l < 2; ++l) poly_mul_add(x[2 * i + l], y[2 * l + j], out[2 * i + j], al);
    return out;
}

bool mat2_empty(const Mat2& m) {
    return std::all_of(m.begin(), m.end(), [](const Poly& p) { return p.empty(); });
}

}  // namespace

KernelTable kernel_from_node(const Node& a, const StructuredHermitian& H, int k, int degree) {
    check_k(k, a.n_vars);
    if (degree < 0) throw UsageError("kernel degree must be non-negative");
    if (static_cast<int>(H.blocks.size()) != a.n_vars || H.blocks[k - 1].rows() != a.dims[k - 1])
        throw UsageError("H does not match the node");
    KernelTable K = empty_table(k, degree, a.p());
    const auto words = enumerate(a.n_vars, degree);
    std::vector<Mat> obs;
    for (const auto& w : words) obs.push_back(obs_word(a, w, k));
    const Mat& Hk = H.blocks[k - 1];
    if (Hk.size() && Eigen::FullPivLU<Mat>(Hk).rank() < Hk.rows()) throw NumericalError("H block is singular");
    const Mat Hi = Hk.size() ? Mat(Hk.inverse()) : Hk;
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = 0; j < words.size(); ++j)
            K.entries[{words[i], words[j]}] =
                Hk.size() ? Mat(obs[i] * Hi * obs[j].adjoint()) : Mat(Mat::Zero(a.p(), a.p()));
    return K;
}

KernelTable kernel_from_series(const Fps& f, const Mat& J, int k, int degree) {
    check_series(f, J, k, degree);
    KernelTable K = empty_table(k, degree, f.rows);
    const auto words = enumerate(f.n_vars, degree);
    for (const auto& w : words)
        for (const auto& w2 : words) K.entries[{w, w2}] = series_entry(f, J, k, w, w2);
    return K;
}

KernelTable kernel_formal_derivative(const Fps& f, const Mat& J, int k, int degree) {
    check_series(f, J, k, degree);
    const int n = f.n_vars;
    const FormalAlphabet al{n, degree};
    const int lam = al.lambda();
    std::vector<Mat2> letter(n + 1);
    for (int j = 1; j <= n; ++j) {
        Mat2& m = letter[j];
        m[0][{j}] = 1.0;
        m[3][{n + j}] = -1.0;
        if (j == k) {
            m[0][{lam}] = 1.0;
            m[1][{lam}] = 1.0;
            m[2][{lam}] = 1.0;
            m[3][{lam}] = 1.0;
        }
    }

    // G = -(d/dlambda) F(Lambda)_{12}, over z and z' letters
    Fps G(2 * n, f.rows, f.cols, 2 * degree);
    std::function<void(Word&, const Mat2&)> walk = [&](Word& u, const Mat2& P) {
        if (!u.empty()) {
            const Mat Fu = f.coeff(u);
            for (const auto& [w, c] : P[1]) {
                if (std::count(w.begin(), w.end(), lam) != 1) continue;
                Word stripped;
                for (int l : w)
                    if (l != lam) stripped.push_back(l);
                G.add_to(stripped, -c * Fu);
            }
        }
        if (static_cast<int>(u.size()) == 2 * degree + 1) return;
        for (int j = 1; j <= n; ++j) {
            const Mat2 next = mat2_mul(P, letter[j], al);
            if (mat2_empty(next)) continue;
            u.push_back(j);
            walk(u, next);
            u.pop_back();
        }
    };
    Mat2 unit;
    unit[0][{}] = 1.0;
    unit[3][{}] = 1.0;
    Word u;
    walk(u, unit);

    // J F(z')*, with z' letters shifted past the z letters
    Fps S(2 * n, f.cols, f.rows, 2 * degree);
    for (const auto& v : enumerate(n, degree)) {
        Word t = transpose(v);
        for (int& l : t) l += n;
        S.set(t, J * f.coeff(v).adjoint());
    }
    const Fps prod = mul(G, S);

    KernelTable K = empty_table(k, degree, f.rows);
    const auto words = enumerate(n, degree);
    for (const auto& w : words)
        for (const auto& w2 : words) K.entries[{w, w2}] = Mat::Zero(f.rows, f.rows);
    for (const auto& [x, m] : prod.terms) {
        const auto split = std::find_if(x.begin(), x.end(), [&](int l) { return l > n; });
        const Word zpart(x.begin(), split);
        Word zp(split, x.end());
        for (int& l : zp) {
            if (l <= n) throw NumericalError("formal kernel produced a z letter after a z' letter");
            l -= n;
        }
        if (static_cast<int>(zpart.size()) > degree || static_cast<int>(zp.size()) > degree) continue;
        K.entries[{zpart, transpose(zp)}] = m;
    }
    return K;
}

KernelTable kernel_formal_derivative(const Node& a, const Mat& J, int k, int degree) {
    return kernel_formal_derivative(expand(a, 2 * degree + 1), J, k, degree);
}

KernelGram kernel_gram(const KernelTable& K, const std::vector<std::pair<Word, Vec>>& pairs) {
    const int m = static_cast<int>(pairs.size());
    Mat G(m, m);
    for (int i = 0; i < m; ++i) {
        if (pairs[i].second.size() != K.size) throw UsageError("gram vector has the wrong length");
        for (int j = 0; j < m; ++j)
            G(i, j) = (pairs[i].second.adjoint() * K.at(pairs[i].first, pairs[j].first) * pairs[j].second)(0, 0);
    }
    KernelGram out;
    out.G = G;
    out.signature = m ? inertia(0.5 * (G + G.adjoint()), 1e-9) : Inertia{};
    return out;
}

KernelGram kernel_gram_all(const KernelTable& K) {
    std::vector<std::pair<Word, Vec>> pairs;
    for (const auto& [key, m] : K.entries) {
        if (!key.second.empty()) continue;
        for (int i = 0; i < K.size; ++i) pairs.emplace_back(key.first, Vec::Unit(K.size, i));
    }
    return kernel_gram(K, pairs);
}

int kernel_column_rank(const KernelTable& K) {
    std::vector<Word> ws;
    for (const auto& [key, m] : K.entries)
        if (key.second.empty()) ws.push_back(key.first);
    if (ws.empty()) return 0;
    Mat X(K.size * static_cast<int>(ws.size()), K.size * static_cast<int>(ws.size()));
    for (std::size_t j = 0; j < ws.size(); ++j)
        for (std::size_t i = 0; i < ws.size(); ++i)
            X.block(K.size * i, K.size * j, K.size, K.size) = K.at(ws[i], ws[j]);
    const double nrm = X.norm();
    return nrm == 0 ? 0 : rank(X, 1e-9 * nrm);
}

namespace {

// Greedy pivoted basis of the kernel columns K_{., w'} e_i, rows over |w| <= row_deg.
struct KernelBasis {
    Mat X;  // stacked coefficient vectors, one column per basis element
    std::vector<std::pair<Word, int>> pivots;
    int rank_before_last = 0;  // rank using columns with |w'| < col_deg
};

KernelBasis pick_basis(const Fps& f, const Mat& J, int k, int row_deg, int col_deg, double rtol) {
    const int p = f.rows;
    const auto rows = enumerate(f.n_vars, row_deg);
    KernelBasis b;
    std::vector<Vec> cols;
    Mat Q = Mat::Zero(p * static_cast<int>(rows.size()), 0);
    double biggest = 0;
    std::vector<std::pair<Vec, std::pair<Word, int>>> cand;
    for (const auto& w2 : enumerate(f.n_vars, col_deg)) {
        std::vector<Mat> blocks;
        for (const auto& w : rows) blocks.push_back(series_entry(f, J, k, w, w2));
        for (int i = 0; i < p; ++i) {
            Vec x(p * static_cast<int>(rows.size()));
            for (std::size_t r = 0; r < rows.size(); ++r) x.segment(p * r, p) = blocks[r].col(i);
            biggest = std::max(biggest, x.norm());
            cand.push_back({x, {w2, i}});
        }
    }
    const double thresh = rtol * std::max(1.0, biggest);
    for (const auto& [x, key] : cand) {
        const Vec res = x - Q * (Q.adjoint() * x);
        if (res.norm() <= thresh) continue;
        Mat Qn(Q.rows(), Q.cols() + 1);
        Qn << Q, res.normalized();
        Q = Qn;
        cols.push_back(x);
        b.pivots.push_back(key);
        if (static_cast<int>(key.first.size()) < col_deg) b.rank_before_last = static_cast<int>(cols.size());
    }
    b.X = Mat(Q.rows(), static_cast<int>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) b.X.col(j) = cols[j];
    return b;
}

// Rows of a stacked vector restricted to |w| <= deg (graded order keeps them on top).
Mat top_rows(const Mat& X, int p, int n_vars, int deg) {
    return X.topRows(p * static_cast<int>(count_words(n_vars, deg)));
}

}  // namespace

ModelRealization model_realization(const Fps& f, const Mat& J, const Tol& tol) {
    if (f.rows != f.cols) throw UsageError("model realization needs square coefficients");
    if (J.rows() != f.cols || J.cols() != f.cols || !is_signature(J)) throw UsageError("J must be a q x q signature matrix");
    if (f.degree < 1) throw UsageError("model realization needs a series of degree >= 1");
    const int N = f.n_vars, p = f.rows;
    const int col_deg = (f.degree - 1) / 2, row_deg = f.degree - 1 - col_deg;
    const double rtol = tol.rank >= 0 ? tol.rank : 1e-9;
    const auto shifted_rows = row_deg >= 1 ? enumerate(N, row_deg - 1) : std::vector<Word>{};

    std::vector<KernelBasis> basis;
    std::vector<int> dims;
    for (int k = 1; k <= N; ++k) {
        basis.push_back(pick_basis(f, J, k, row_deg, col_deg, rtol));
        const KernelBasis& b = basis.back();
        const int g = static_cast<int>(b.pivots.size());
        if (g > 0 && (col_deg == 0 || b.rank_before_last < g))
            throw NumericalError("kernel column rank did not stabilize for component " + std::to_string(k) +
                                 "; supply a longer series");
        if (g > 0 && rank(top_rows(b.X, p, N, row_deg - 1), rtol * b.X.norm()) < g)
            throw NumericalError("series too short to resolve the shifted kernel span for component " +
                                 std::to_string(k));
        dims.push_back(g);
    }

    int r = 0;
    std::vector<int> off;
    for (int g : dims) {
        off.push_back(r);
        r += g;
    }
    Mat A = Mat::Zero(r, r), B = Mat::Zero(r, p), C = Mat::Zero(p, r);
    double ls_res = 0;
    auto solve_into = [&](int k, const Mat& rhs) -> Mat {
        const Mat Xs = top_rows(basis[k].X, p, N, row_deg - 1);
        const Mat sol = Xs.completeOrthogonalDecomposition().solve(rhs);
        ls_res = std::max(ls_res, rel_residual(Xs * sol - rhs, {rhs}));
        return sol;
    };
    std::map<Word, int, GradedLess> pos;
    for (const auto& w : enumerate(N, row_deg)) pos.emplace(w, static_cast<int>(pos.size()));
    for (int k = 0; k < N; ++k) {
        if (dims[k] == 0) continue;
        const int kl = k + 1;
        // B_k c = R_k F c
        Mat rb(p * static_cast<int>(shifted_rows.size()), p);
        for (std::size_t i = 0; i < shifted_rows.size(); ++i) {
            Word w = shifted_rows[i];
            w.push_back(kl);
            rb.middleRows(p * i, p) = f.coeff(w);
        }
        B.middleRows(off[k], dims[k]) = solve_into(k, rb);
        C.middleCols(off[k], dims[k]) = basis[k].X.topRows(p);
        for (int j = 0; j < N; ++j) {
            if (dims[j] == 0) continue;
            // A_kj h = R_k h for h in the span of component j
            Mat ra(p * static_cast<int>(shifted_rows.size()), dims[j]);
            for (std::size_t i = 0; i < shifted_rows.size(); ++i) {
                Word w = shifted_rows[i];
                w.push_back(kl);
                ra.middleRows(p * i, p) = basis[j].X.middleRows(p * pos.at(w), p);
            }
            A.block(off[k], off[j], dims[k], dims[j]) = solve_into(k, ra);
        }
    }

    ModelRealization out;
    Node raw(dims, A, B, C, f.coeff({}));
    std::vector<Mat> T;
    for (int k = 0; k < N; ++k) {
        const auto& pv = basis[k].pivots;
        const int g = dims[k];
        Mat G(g, g);
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j)
                G(i, j) = series_entry(f, J, k + 1, pv[i].first, pv[j].first)(pv[i].second, pv[j].second);
        G = 0.5 * (G + G.adjoint());
        out.gram.push_back(G);
        if (g == 0) {
            T.push_back(Mat::Zero(0, 0));
            out.H.blocks.push_back(Mat::Zero(0, 0));
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(G);
        const double top = es.eigenvalues().cwiseAbs().maxCoeff();
        Mat Tk(g, g), Hk = Mat::Zero(g, g);
        for (int i = 0; i < g; ++i) {
            const int src = g - 1 - i;  // positive eigenvalues first
            const double l = es.eigenvalues()(src);
            if (std::abs(l) <= 1e-10 * top) throw PropertyFailure("kernel Gram matrix is singular; the series is not J-unitary");
            Tk.col(i) = es.eigenvectors().col(src) / std::sqrt(std::abs(l));
            Hk(i, i) = l > 0 ? 1.0 : -1.0;
        }
        T.push_back(Tk);
        out.H.blocks.push_back(Hk);
    }
    out.node = apply_similarity(raw, T);
    out.residuals = line_residuals(out.node, J, out.H.full());
    out.residuals["shift_solve"] = ls_res;
    double sc = 1.0;
    for (const auto& [w, m] : f.terms) sc = std::max(sc, m.norm());
    out.residuals["expansion"] = max_coeff_diff(expand(out.node, f.degree), f) / sc;
    for (const auto& [name, v] : out.residuals)
        if (v > tol.res)
            throw PropertyFailure("model residual " + name + " = " + std::to_string(v) +
                                  "; the series is not J-unitary or too short");
    return out;
}

}  // namespace ncfps
