#pragma once

#include <map>
#include <vector>

#include "ncfps/linalg.hpp"
#include "ncfps/words.hpp"

namespace ncfps {

// Degree-truncated series sum_w f_w z^w with p x q complex coefficients.
// Absent words are zero; entries below drop_tol (Frobenius) are not stored.
struct Fps {
    static constexpr double drop_tol = 1e-14;

    int n_vars = 1;
    int rows = 1;
    int cols = 1;
    int degree = 0;
    std::map<Word, Mat, GradedLess> terms;

    Fps() = default;
    Fps(int n_vars, int rows, int cols, int degree);

    Mat coeff(const Word& w) const;
    // Stores m at w (or erases it if negligible). Checks shape and length.
    void set(const Word& w, const Mat& m);
    void add_to(const Word& w, const Mat& m);
};

Fps constant(int n_vars, const Mat& c, int degree);
Fps identity_series(int n_vars, int size, int degree);

Fps add(const Fps& f, const Fps& g);
Fps sub(const Fps& f, const Fps& g);
Fps scale(const Fps& f, cplx s);
Fps mul(const Fps& f, const Fps& g);
Fps truncate(const Fps& f, int degree);

// Neumann series f^{-1} = sum_k (I - f0^{-1} f)^k f0^{-1}, k <= degree.
Fps invert(const Fps& f);

// sum_w f_w (x) Z^w with Z^w = Z_{i1} ... Z_{ik}.
Mat eval(const Fps& f, const std::vector<Mat>& Z);

// max_w ||f_w - g_w||_F over words of length <= min degree.
double max_coeff_diff(const Fps& f, const Fps& g);

}  // namespace ncfps
