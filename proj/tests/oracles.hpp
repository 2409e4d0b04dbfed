#pragma once

// Independent reference computations used to derive frozen expected values.
// Nothing here calls into the library's series or node code.

#include <complex>
#include <map>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Taylor coefficients of num(z) / den(z) by long division, den[0] != 0.
inline std::vector<cplx> taylor(std::vector<cplx> num, const std::vector<cplx>& den, int degree) {
    num.resize(degree + 1);
    std::vector<cplx> out(degree + 1);
    for (int n = 0; n <= degree; ++n) {
        cplx s = num[n];
        for (int j = 1; j <= n && j < static_cast<int>(den.size()); ++j) s -= den[j] * out[n - j];
        out[n] = s / den[0];
    }
    return out;
}

// (z - 1)/(z + 1)
inline std::vector<cplx> cayley_line(int degree) { return taylor({-1, 1}, {1, 1}, degree); }

// (z - 1/2)/(1 - z/2)
inline std::vector<cplx> blaschke(int degree) { return taylor({-0.5, 1}, {1, -0.5}, degree); }

// Scalar series in non-commuting letters 1..n, keyed by word.
using NcSeries = std::map<std::vector<int>, cplx>;

inline cplx nc_coeff(const NcSeries& f, const std::vector<int>& w) {
    const auto it = f.find(w);
    return it == f.end() ? cplx(0) : it->second;
}

inline NcSeries nc_mul(const NcSeries& f, const NcSeries& g, int degree) {
    NcSeries out;
    for (const auto& [u, a] : f)
        for (const auto& [v, b] : g) {
            if (u.size() + v.size() > static_cast<std::size_t>(degree)) continue;
            std::vector<int> w = u;
            w.insert(w.end(), v.begin(), v.end());
            out[w] += a * b;
        }
    return out;
}

// g with f g = 1, solved word by word: f_e g_w = [w = e] - sum_{w = a b, a != e} f_a g_b.
inline NcSeries nc_inverse(const NcSeries& f, int n, int degree) {
    NcSeries g;
    std::vector<std::vector<int>> level{{}};
    for (int len = 0; len <= degree; ++len) {
        for (const auto& w : level) {
            cplx s = w.empty() ? 1.0 : 0.0;
            for (std::size_t cut = 1; cut <= w.size(); ++cut) {
                const std::vector<int> a(w.begin(), w.begin() + cut), b(w.begin() + cut, w.end());
                s -= nc_coeff(f, a) * nc_coeff(g, b);
            }
            g[w] = s / nc_coeff(f, {});
        }
        std::vector<std::vector<int>> next;
        for (const auto& w : level)
            for (int l = 1; l <= n; ++l) {
                auto x = w;
                x.push_back(l);
                next.push_back(x);
            }
        level = std::move(next);
    }
    return g;
}

}  // namespace oracle
