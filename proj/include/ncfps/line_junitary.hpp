#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ncfps/grnode.hpp"

namespace ncfps {

using Residuals = std::map<std::string, double>;

// Block-diagonal Hermitian H = diag(H_1, ..., H_N).
struct StructuredHermitian {
    std::vector<Mat> blocks;

    Mat full() const { return blockdiag(blocks); }
    Mat inverse_full() const;
    std::vector<Inertia> signature() const;
};

struct HResult {
    StructuredHermitian H;
    Residuals residuals;
    cplx cayley_param = 1.0;  // circle case: the parameter of the line-side computation
};

// H from the similarity between the associated node and (-A*, C*J, -JB*, JD*J).
// Throws PropertyFailure when the node is not matrix-J-unitary on skew-Hermitian tuples,
// UsageError when the node is not minimal or shapes are wrong.
HResult associated_H_line(const Node& a, const Mat& J, const Tol& tol = {});

// Residuals of A*H + HA = -C*JC, B = -H^{-1}C*JD and the dual pair.
Residuals line_residuals(const Node& a, const Mat& J, const Mat& H);

struct Classification {
    bool holds = false;
    std::string reason;
    StructuredHermitian H;
    Residuals residuals;
};
Classification is_matrix_J_unitary_line(const Node& a, const Mat& J, const Tol& tol = {});

struct SampleReport {
    double max_residual = 0;
    int used = 0;
    int skipped = 0;
};
// max ||F(Z)(J (x) I)F(Z)* - J (x) I|| over random skew-Hermitian tuples.
SampleReport sample_check_line(const Node& a, const Mat& J, int n, int samples, std::uint64_t seed);

// Least-squares solve of op(H) = rhs over block-diagonal Hermitian H with the given block sizes.
// Returns the minimum-norm solution and its relative residual.
struct StructuredSolve {
    StructuredHermitian H;
    double residual = 0;
};
StructuredSolve solve_structured_hermitian(const std::vector<int>& dims, const std::function<Mat(const Mat&)>& op,
                                           const Mat& rhs);

// Node (A, -H^{-1}C*J, C, I) where A*H + HA = -C*JC.
Node complete_from_CA(const Mat& C, const Mat& A, const std::vector<int>& dims, const Mat& J, const Tol& tol = {});
// Node (A, B, -JB*G^{-1}, I) where GA* + AG = -BJB*.
Node complete_from_AB(const Mat& A, const Mat& B, const std::vector<int>& dims, const Mat& J, const Tol& tol = {});

std::vector<int> negative_squares(const StructuredHermitian& H);

// Common eigenvectors of the tuple (A P_1, ..., A P_N).
struct CommonEigen {
    Vec x;
    std::vector<cplx> lambda;
    std::vector<double> h_norm;  // [P_j x, P_j x]_{H_j}
    bool condition_holds = false;
};
struct UnitaryDiagnostics {
    std::vector<CommonEigen> common;
    bool violation = false;  // some common eigenvector breaks the necessary condition
};
std::vector<CommonEigen> common_eigenvectors(const Node& a);
// Line: needs some j with Re lambda_j != 0 and [P_j x, P_j x]_H != 0.
UnitaryDiagnostics unitary_line_diagnostics(const Node& a, const StructuredHermitian& H);
// Circle: same with |lambda_j| != 1.
UnitaryDiagnostics unitary_circle_diagnostics(const Node& a, const StructuredHermitian& H);

// Throws UsageError unless J is a q x q signature matrix matching the node.
void check_signature(const Node& a, const Mat& J);

}  // namespace ncfps
