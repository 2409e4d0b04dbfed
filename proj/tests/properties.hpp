#pragma once

// Seeded randomized laws shared by the property suite and the acceptance runner.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "ncfps/kernels.hpp"
#include "ncfps/sampling.hpp"

namespace props {

using namespace ncfps;

struct Outcome {
    int trials = 0;
    int failures = 0;
    double worst = 0;  // largest relative defect seen
    void record(double defect, double tol) {
        ++trials;
        worst = std::max(worst, defect);
        if (!(defect <= tol)) ++failures;
    }
};

inline Word random_word(Rng& rng, int n_letters, int max_len) {
    std::uniform_int_distribution<int> len(0, max_len), letter(1, n_letters);
    Word w(len(rng));
    for (int& l : w) l = letter(rng);
    return w;
}

inline Fps random_fps(Rng& rng, int n_vars, int p, int q, int degree, bool invertible = false) {
    Fps f(n_vars, p, q, degree);
    for (const Word& w : enumerate(n_vars, degree)) f.set(w, 0.5 * gaussian(rng, p, q));
    if (invertible) f.set({}, Mat::Identity(p, q) + 0.2 * gaussian(rng, p, q));
    return f;
}

inline std::vector<int> random_dims(Rng& rng, int n_vars, int lo) {
    std::uniform_int_distribution<int> d(lo, 2);
    std::vector<int> dims(n_vars);
    for (int& x : dims) x = d(rng);
    if (std::all_of(dims.begin(), dims.end(), [](int x) { return x == 0; })) dims[0] = 1;
    return dims;
}

inline Node random_node(Rng& rng, int n_vars, int p, int q) {
    const std::vector<int> dims = random_dims(rng, n_vars, 0);
    int r = 0;
    for (int d : dims) r += d;
    Mat D = gaussian(rng, p, q);
    if (p == q) D += 2.0 * Mat::Identity(p, q);  // keeps D comfortably invertible
    return Node(dims, 0.5 * gaussian(rng, r, r), gaussian(rng, r, q), gaussian(rng, p, r), D);
}

// J-unitary node on the line: H block-diagonal Hermitian, S skew-Hermitian,
// A = H^{-1}(S - C*JC/2) so that A*H + HA = -C*JC, then completed from (C, A).
inline Node random_junitary_line(Rng& rng, int n_vars, const Mat& J) {
    const std::vector<int> dims = random_dims(rng, n_vars, 1);
    std::vector<Mat> blocks;
    for (int d : dims) {
        const Mat G = gaussian(rng, d, d);
        std::uniform_int_distribution<int> sign(0, 1);
        Mat s = Mat::Identity(d, d);
        for (int i = 0; i < d; ++i)
            if (sign(rng)) s(i, i) = -1;
        blocks.push_back(G * s * G.adjoint());
    }
    const Mat H = blockdiag(blocks);
    const int r = static_cast<int>(H.rows());
    const Mat C = gaussian(rng, static_cast<int>(J.rows()), r);
    const Mat X = gaussian(rng, r, r);
    const Mat S = 0.5 * (X - X.adjoint());
    const Mat A = H.inverse() * (S - 0.5 * C.adjoint() * J * C);
    return complete_from_CA(C, A, dims, J);
}

inline double rel(double defect, double scale) { return defect / std::max(1.0, scale); }

inline double norm_of(const Fps& f) {
    double m = 0;
    for (const auto& [w, c] : f.terms) m = std::max(m, c.norm());
    return m;
}

inline Outcome words_laws(std::uint64_t seed, int trials) {
    Rng rng(seed);
    Outcome o;
    for (int t = 0; t < trials; ++t) {
        const Word u = random_word(rng, 3, 4), v = random_word(rng, 3, 4), w = random_word(rng, 3, 4);
        bool ok = concat(concat(u, v), w) == concat(u, concat(v, w));
        ok = ok && concat(u, {}) == u && concat({}, u) == u;
        ok = ok && transpose(concat(u, v)) == concat(transpose(v), transpose(u));
        ok = ok && transpose(transpose(u)) == u;
        const GradedLess less;
        ok = ok && !(less(u, v) && less(v, u)) && (u == v || less(u, v) || less(v, u));
        o.record(ok ? 0.0 : 1.0, 0.0);
    }
    return o;
}

inline Outcome fps_laws(std::uint64_t seed, int trials) {
    Rng rng(seed);
    Outcome o;
    for (int t = 0; t < trials; ++t) {
        const int n = 1 + t % 3, d = 3;
        const Fps f = random_fps(rng, n, 2, 2, d), g = random_fps(rng, n, 2, 2, d), h = random_fps(rng, n, 2, 2, d);
        const Fps one = identity_series(n, 2, d);
        const Fps fg_h = mul(mul(f, g), h);
        double defect = rel(max_coeff_diff(fg_h, mul(f, mul(g, h))), norm_of(fg_h));
        defect = std::max(defect, rel(max_coeff_diff(mul(f, one), f), norm_of(f)));
        defect = std::max(defect, rel(max_coeff_diff(mul(one, f), f), norm_of(f)));
        defect = std::max(defect, rel(max_coeff_diff(add(f, g), add(g, f)), norm_of(f)));
        const Fps lhs = mul(f, add(g, h));
        defect = std::max(defect, rel(max_coeff_diff(lhs, add(mul(f, g), mul(f, h))), norm_of(lhs)));
        const Fps u = random_fps(rng, n, 2, 2, d, true);
        defect = std::max(defect, rel(max_coeff_diff(mul(u, invert(u)), one), norm_of(u)));
        o.record(defect, 1e-12);
    }
    return o;
}

inline Outcome grnode_laws(std::uint64_t seed, int trials) {
    Rng rng(seed);
    Outcome o;
    const int d = 4;
    for (int t = 0; t < trials; ++t) {
        const int n = 1 + t % 3, p = 1 + t % 2;
        const Node a = random_node(rng, n, p, p), b = random_node(rng, n, p, p);
        const Fps fa = expand(a, d), fb = expand(b, d);
        const Fps ab = mul(fa, fb);
        double defect = rel(max_coeff_diff(expand(product(a, b), d), ab), norm_of(ab));
        const Fps inv = invert(fa);
        defect = std::max(defect, rel(max_coeff_diff(expand(associated(a), d), inv), norm_of(inv)));
        const Fps adj = expand(adjoint(a), d);
        for (const auto& w : enumerate(n, d))
            defect = std::max(defect, rel((adj.coeff(w) - fa.coeff(transpose(w)).adjoint()).norm(), norm_of(fa)));
        o.record(defect, 1e-9);
    }
    return o;
}

// Every kernel table produced by the three routes is Hermitian: K(w, w') = K(w', w)*.
inline Outcome kernel_symmetry(std::uint64_t seed, int trials) {
    Rng rng(seed);
    Outcome o;
    const int d = 2;
    for (int t = 0; t < trials; ++t) {
        const int n = 1 + t % 2;
        Mat J = Mat::Identity(2, 2);
        if (t % 3 == 1) J(1, 1) = -1;
        Node a;
        StructuredHermitian H;
        try {
            a = random_junitary_line(rng, n, J);
            H = associated_H_line(a, J).H;
        } catch (const std::exception&) {
            continue;  // ill-conditioned draw; the next trial covers it
        }
        const Fps f = expand(a, 2 * d + 1);
        for (int k = 1; k <= n; ++k) {
            for (const KernelTable& K : {kernel_from_node(a, H, k, d), kernel_from_series(f, J, k, d),
                                         kernel_formal_derivative(f, J, k, d)}) {
                double scale = 0;
                for (const auto& [key, m] : K.entries) scale = std::max(scale, m.norm());
                o.record(rel(K.hermitian_defect(), scale), 1e-9);
            }
        }
    }
    return o;
}

}  // namespace props
