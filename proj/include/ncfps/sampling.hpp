#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ncfps/linalg.hpp"

namespace ncfps {

using Rng = std::mt19937_64;

Mat gaussian(Rng& rng, int rows, int cols);

// Tuple with ||Z_k|| = 0.5 * eps (raw Gaussian scaled by 0.5 eps / ||raw||).
std::vector<Mat> small_tuple(Rng& rng, int n_vars, int n, double eps);
// Z_k = i (G + G*) / 2, scaled so that ||Z_k|| = 0.5 * eps.
std::vector<Mat> skew_hermitian_tuple(Rng& rng, int n_vars, int n, double eps);
// QR of a complex Gaussian with the diagonal phases of R moved into Q.
Mat random_unitary(Rng& rng, int n);
std::vector<Mat> unitary_tuple(Rng& rng, int n_vars, int n);
// Z_k = S + 0.1 I with S skew-Hermitian, so Z_k + Z_k* = 0.2 I.
std::vector<Mat> halfplane_tuple(Rng& rng, int n_vars, int n);
// Random tuple with ||W_k|| = radius * u, u uniform in (0, 1].
std::vector<Mat> contraction_tuple(Rng& rng, int n_vars, int n, double radius);

}  // namespace ncfps
