#pragma once

#include <cstdint>
#include <vector>

#include "ncfps/fps.hpp"
#include "ncfps/linalg.hpp"
#include "ncfps/words.hpp"

namespace ncfps {

// Givone-Roesser node (N; A, B, C, D) with state space C^{r_1} + ... + C^{r_N}.
// Component indices k are 1-based throughout the public API.
struct Node {
    int n_vars = 1;
    std::vector<int> dims;
    Mat A, B, C, D;

    Node() = default;
    Node(std::vector<int> dims, Mat A, Mat B, Mat C, Mat D);

    int state_dim() const;
    int offset(int k) const;  // first state index of component k
    int p() const { return static_cast<int>(D.rows()); }
    int q() const { return static_cast<int>(D.cols()); }

    Mat A_block(int k, int j) const;
    Mat B_block(int k) const;
    Mat C_block(int k) const;

    void validate() const;
};

// Constant node: r = 0 in every component.
Node constant_node(int n_vars, const Mat& D);

Mat transfer_coeff(const Node& a, const Word& w);
Fps expand(const Node& a, int degree);

// blockdiag(I_{r_1} (x) Z_1, ..., I_{r_N} (x) Z_N)
Mat delta(const std::vector<int>& dims, const std::vector<Mat>& Z);
// (D (x) I) + (C (x) I)(I - Delta(Z)(A (x) I))^{-1} Delta(Z)(B (x) I)
Mat eval_closed(const Node& a, const std::vector<Mat>& Z);

Node product(const Node& a, const Node& b);
Node adjoint(const Node& a);
Node associated(const Node& a);

// Row block (C flat A)^{w g_k}: p x r_k.
Mat obs_word(const Node& a, const Word& w, int k);
// Column block (A sharp B)^{g_k w^T}: r_k x q.
Mat ctrl_word(const Node& a, const Word& w, int k);

// Stacks over |w| < p r (resp. |w| < r q) in graded lex order.
Mat truncated_obs(const Node& a, int k);
Mat truncated_ctrl(const Node& a, int k);

struct MinimalityReport {
    std::vector<int> obs_ranks, ctrl_ranks;
    bool observable = true, controllable = true;
    bool minimal() const { return observable && controllable; }
};
MinimalityReport minimality(const Node& a, double rank_tol = -1.0);
bool is_observable(const Node& a, double rank_tol = -1.0);
bool is_controllable(const Node& a, double rank_tol = -1.0);
bool is_minimal(const Node& a, double rank_tol = -1.0);

// Rows |w| <= row_deg, columns |w'| <= col_deg, entry f_{w g_k w'^T}.
Mat hankel(const Fps& f, int k, int row_deg, int col_deg);

// Minimal node plus per-component maps with left_k * right_k = I:
// A_min = L A R, B_min = L B, C_min = C R.
struct Reduction {
    Node node;
    std::vector<Mat> left, right;
};
Reduction reduce_to_minimal(const Node& a, double rank_tol = -1.0);

Node apply_similarity(const Node& a, const std::vector<Mat>& T);
// Block diagonal T with a1 = apply_similarity(a2, T).
std::vector<Mat> similarity_between(const Node& a1, const Node& a2, const Tol& tol = {});

// Orthonormal basis of the common kernel of phi_k(Z) over random Z, where
// phi_k(Z) = (C (x) I)(I - Delta(Z)(A (x) I))^{-1} restricted to component k.
Mat obs_kernel_sample(const Node& a, int k, int n, int samples, std::uint64_t seed);

// ||A||-based radius for sampling: 1/||A||, or 1 when A = 0.
double sampling_radius(const Node& a);

}  // namespace ncfps
