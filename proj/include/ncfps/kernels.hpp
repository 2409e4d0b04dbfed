#pragma once

#include <map>
#include <utility>
#include <vector>

#include "ncfps/line_junitary.hpp"

namespace ncfps {

// Coefficients K_{w,w'} of the k-th reproducing kernel for |w|, |w'| <= degree.
struct KernelTable {
    int k = 1;
    int degree = 0;
    int size = 0;  // coefficients are size x size
    std::map<std::pair<Word, Word>, Mat> entries;

    const Mat& at(const Word& w, const Word& w2) const;
    // max ||K_{w,w'} - K_{w',w}*||
    double hermitian_defect() const;
};

double max_entry_diff(const KernelTable& a, const KernelTable& b);

// (R_k f)_w = f_{w g_k}
Fps backward_shift(const Fps& f, int k);

// K_{w,w'} = (C flat A)^{w g_k} H_k^{-1} ((C flat A)^{w' g_k})*
KernelTable kernel_from_node(const Node& a, const StructuredHermitian& H, int k, int degree);

// K_{w,w'} = sum_{v v' = w'} (-1)^{|v'|+1} f_{w g_k v'^T} J f_v*; needs f.degree >= 2 degree + 1.
KernelTable kernel_from_series(const Fps& f, const Mat& J, int k, int degree);

// Minus the lambda-derivative of the (1,2) entry of F evaluated at the 2 x 2 matrices
// diag(z_j, -z'_j) (j != k) and [[lambda + z_k, lambda], [lambda, lambda - z'_k]],
// times J F(z')*. Computed over the doubled alphabet with fps::mul.
KernelTable kernel_formal_derivative(const Fps& f, const Mat& J, int k, int degree);
KernelTable kernel_formal_derivative(const Node& a, const Mat& J, int k, int degree);

struct KernelGram {
    Mat G;
    Inertia signature;
};
// G_{ij} = c_i* K_{w_i, w_j} c_j
KernelGram kernel_gram(const KernelTable& K, const std::vector<std::pair<Word, Vec>>& pairs);
// Gram over all (w, e_i) with |w| <= K.degree.
KernelGram kernel_gram_all(const KernelTable& K);

// Rank of the span of the kernel columns K_{., w'} c.
int kernel_column_rank(const KernelTable& K);

struct ModelRealization {
    Node node;
    StructuredHermitian H;  // each block diag(+-1)
    std::vector<Mat> gram;  // Gram of the chosen kernel columns before normalization
    Residuals residuals;
};
// Backward-shift model on the spans of kernel columns. Kernel words reach
// depth (f.degree - 1) / 2 in the column index; the basis is normalized so that
// every H_k is a signature matrix.
ModelRealization model_realization(const Fps& f, const Mat& J, const Tol& tol = {});

}  // namespace ncfps
