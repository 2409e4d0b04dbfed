#pragma once

#include <cstdint>
#include <optional>

#include "ncfps/factorization.hpp"

namespace ncfps {

// J1 = [[0, I_q], [I_q, 0]].
Mat j1_signature(int q);

// (A, [0 B], [iC; 0], [[I, iD], [0, I]]), realizing [[I, i Phi], [0, I]].
Node embed_J1(const Node& a);

// Line: D = D*, A*H + HA = 0, C = iB*H.
Residuals selfadjoint_line_residuals(const Node& a, const Mat& H);
// Circle: A*HA = H, D - D* = iB*HB, C = iB*HA.
Residuals selfadjoint_circle_residuals(const Node& a, const Mat& H);

// Both classifications run the J1-unitary test on embed_J1(a) and read H from it.
Classification is_matrix_selfadjoint_line(const Node& a, const Tol& tol = {});
Classification is_matrix_selfadjoint_circle(const Node& a, const Tol& tol = {});

// max ||Phi(Z) - Phi(Z)*|| over random skew-Hermitian (line) or unitary (circle) tuples.
SampleReport sample_check_selfadjoint(const Node& a, bool circle, int n, int samples, std::uint64_t seed);

struct Decomposition {
    Node first, second;
    StructuredHermitian H1, H2;
    Residuals residuals;
};

// Phi = Phi1 + Phi2 split along M and its H-orthogonal complement. The split (D1, D2)
// defaults to (0, D).
Decomposition selfadjoint_decompose(const Node& a, const StructuredHermitian& H, const SubspaceFamily& M,
                                    std::optional<std::pair<Mat, Mat>> split = std::nullopt, const Tol& tol = {});
// Circle version with D1 = (i/2) B1* H1 B1 + S for Hermitian S (default 0), D2 = D - D1.
Decomposition circle_selfadjoint_decompose(const Node& a, const StructuredHermitian& H, const SubspaceFamily& M,
                                           std::optional<Mat> S = std::nullopt, const Tol& tol = {});

}  // namespace ncfps
