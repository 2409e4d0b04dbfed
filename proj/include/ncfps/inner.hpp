#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncfps/circle_junitary.hpp"
#include "ncfps/fps.hpp"

namespace ncfps {

struct InnerReport {
    bool j_unitary = false;
    bool inner = false;
    bool borderline = false;  // some H_k has an eigenvalue within tolerance of zero
    std::string reason;
    std::vector<int> nu;
    StructuredHermitian H;
    Residuals residuals;
};

// H_k positive definite: lambda_min > 1e-10 * max |lambda|.
bool is_positive_definite(const StructuredHermitian& H, bool* borderline = nullptr);

InnerReport is_J_inner_line(const Node& a, const Mat& J, const Tol& tol = {});
InnerReport is_J_inner_disk(const Node& a, const Mat& J, const Tol& tol = {});

struct BalanceResult {
    Node node;
    Residuals residuals;
};
// A -> H^{1/2} A H^{-1/2}, B -> H^{1/2} B, C -> C H^{-1/2}. The residuals checked are
// A* + A = -C*JC, B = -C*JD on the line and the unitary colligation on the circle.
BalanceResult balance(const Node& a, const StructuredHermitian& H, const Mat& J, bool circle = false,
                      const Tol& tol = {});

// ||[[A, B], [C, D]]* [[A, B], [C, D]] - I||
double unitary_node_defect(const Node& a);
bool unitary_node_check(const Node& a, double tol = 1e-9);

// Largest ||F(W)|| over random tuples with ||W_k|| <= 0.95, n cycling through 1..n_max.
SampleReport schur_agler_sample(const Node& a, int n_max, int samples, std::uint64_t seed);
SampleReport schur_agler_sample(const Fps& f, int n_max, int samples, std::uint64_t seed);

// Smallest eigenvalue of J (x) I - F(Z)(J (x) I)F(Z)* over Z_k = S + 0.1 I, S skew-Hermitian.
double halfplane_contractivity_min(const Node& a, const Mat& J, int n, int samples, std::uint64_t seed);

}  // namespace ncfps
