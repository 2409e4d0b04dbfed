#pragma once

#include <optional>
#include <vector>

#include "ncfps/circle_junitary.hpp"

namespace ncfps {

// One basis matrix per component, M_k of size r_k x m_k with full column rank.
struct SubspaceFamily {
    std::vector<Mat> bases;

    std::vector<int> dims() const;
    void validate(const Node& a) const;
};

SubspaceFamily zero_family(const Node& a);
SubspaceFamily full_family(const Node& a);

bool is_block_A_invariant(const Node& a, const SubspaceFamily& M, double tol = 1e-10);
// Per component ker(M_k* H_k).
SubspaceFamily h_orthogonal_complement(const SubspaceFamily& M, const StructuredHermitian& H);
bool is_nondegenerate(const SubspaceFamily& M, const StructuredHermitian& H);

// Block projection with kernel M and range Mperp, one matrix per component.
std::vector<Mat> supporting_projection(const SubspaceFamily& M, const SubspaceFamily& Mperp);
// Kernel and range bases of a block projection.
std::pair<SubspaceFamily, SubspaceFamily> projection_parts(const std::vector<Mat>& Pi);

// Node written in the coordinates [M_k | Mperp_k] of every component, plus the
// per-component sizes of the M part.
struct SplitNode {
    Node node;
    std::vector<int> m;
    Mat A11, A12, A21, A22, B1, B2, C1, C2;
    std::vector<int> dims1, dims2;
};
SplitNode split_coordinates(const Node& a, const SubspaceFamily& M, const SubspaceFamily& Mperp);

// F = F1 F2 with F1 = (A11, B1 D2^{-1}, C1, D1) and F2 = (A22, B2, D1^{-1} C2, D2)
// in the [ker | ran] coordinates. Throws UsageError when the pair is not supporting.
std::pair<Node, Node> project_factors(const Node& a, const SubspaceFamily& ker, const SubspaceFamily& ran,
                                      const Mat& D1, const Mat& D2);
std::pair<Node, Node> project_factors(const Node& a, const std::vector<Mat>& Pi, const Mat& D1, const Mat& D2);

struct Factorization {
    Node first, second;
    StructuredHermitian H1, H2;
    Mat D1, D2;
    Residuals residuals;
};

// Defaults D1 = D, D2 = I.
Factorization minimal_junitary_factorize_line(const Node& a, const Mat& J, const SubspaceFamily& M,
                                              std::optional<std::pair<Mat, Mat>> split = std::nullopt,
                                              const Tol& tol = {});
// D1 = I - C1 H1^{-1}(I - a A11*)^{-1} C1* J, D2 = D1^{-1} D. Without a parameter the
// 16th root of unity that best conditions I - a A11* is used.
Factorization minimal_junitary_factorize_circle(const Node& a, const Mat& J, const SubspaceFamily& M,
                                                std::optional<cplx> param = std::nullopt, const Tol& tol = {});

struct FamilyCandidate {
    SubspaceFamily M;
    bool trivial = false;
    bool nondegenerate = false;
};
// Coordinate families (state dimension <= 16) and the invariant closures of
// P_k x over eigenvectors x of the maps A P_k. Trivial families come first.
std::vector<FamilyCandidate> enumerate_invariant_families(const Node& a, const StructuredHermitian& H,
                                                          int max_results = 64);

}  // namespace ncfps
