#pragma once

#include <cstdint>

#include "ncfps/line_junitary.hpp"

namespace ncfps {

// A_a = (aA - I)(aA + I)^{-1}, B_a = sqrt2 (aA + I)^{-1} aB,
// C_a = sqrt2 C (aA + I)^{-1}, D_a = D - C(aA + I)^{-1} aB.
Node cayley(const Node& a, cplx param);

// Unimodular a maximizing the distance of -conj(a) from the spectrum of A:
// 16th roots of unity first, then 64 seeded random points if none is usable.
cplx choose_cayley_parameter(const Mat& A);

// Residuals of the Stein relations H - A*HA = C*JC, D*JC = -B*HA, J - D*JD = B*HB,
// their duals, and the full colligation identity.
Residuals circle_residuals(const Node& a, const Mat& J, const Mat& H);

// H taken from the line-side computation on cayley(a, param); the Stein relations
// are then checked on a itself.
HResult associated_H_circle(const Node& a, const Mat& J, const Tol& tol = {});
Classification is_matrix_J_unitary_circle(const Node& a, const Mat& J, const Tol& tol = {});

// max ||f(W)(J (x) I)f(W)* - J (x) I|| over random unitary tuples.
SampleReport sample_check_circle(const Node& a, const Mat& J, int n, int samples, std::uint64_t seed);

// H^{-1}(A^x)*H; throws NumericalError unless it inverts A.
Mat a_inverse_identity(const Node& a, const StructuredHermitian& H, const Tol& tol = {});

// Node (A, B_a, C, D_a) with H - A*HA = C*JC and
// D_a = I - CH^{-1}(I - aA*)^{-1}C*J, B_a = -H^{-1}A^{-*}C*J D_a.
Node complete_from_CA_circle(const Mat& C, const Mat& A, const std::vector<int>& dims, const Mat& J, cplx param,
                             const Tol& tol = {});
// Node (A, B, C'_a, D'_a) with G - AGA* = BJB*, H = G^{-1} and
// D'_a = I - JB*(I - aA*)^{-1}HB, C'_a = -D'_a J B* A^{-*} H.
Node complete_from_AB_circle(const Mat& A, const Mat& B, const std::vector<int>& dims, const Mat& J, cplx param,
                             const Tol& tol = {});

}  // namespace ncfps
