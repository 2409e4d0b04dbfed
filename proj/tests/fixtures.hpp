#pragma once

#include <cmath>
#include <vector>

#include "ncfps/grnode.hpp"

namespace fx {

using ncfps::cplx;
using ncfps::Mat;
using ncfps::Node;

inline Mat m1(cplx v) { return Mat::Constant(1, 1, v); }

inline Mat mat(std::initializer_list<std::initializer_list<cplx>> rows) {
    Mat m(rows.size(), rows.begin()->size());
    int i = 0;
    for (const auto& r : rows) {
        int j = 0;
        for (cplx v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

const double s2 = std::sqrt(2.0);
const cplx I(0, 1);

// (z + 1)^{-1}(z - 1)
inline Node e1() { return Node({1}, m1(-1), m1(s2), m1(s2), m1(-1)); }

// e1 placed in variable k of an n_vars-variable alphabet
inline Node e1_in(int k, int n_vars) {
    std::vector<int> dims(n_vars, 0);
    dims[k - 1] = 1;
    return Node(dims, m1(-1), m1(s2), m1(s2), m1(-1));
}

// (z1 + z2 + 1)^{-1}(z1 + z2 - 1)
inline Node e2() {
    return Node({1, 1}, -Mat::Ones(2, 2), Mat::Constant(2, 1, s2), Mat::Constant(1, 2, s2), m1(-1));
}

// f(z) = z
inline Node shift() { return Node({1}, m1(0), m1(1), m1(1), m1(0)); }

// (z - 1/2)(1 - z/2)^{-1}
inline Node blaschke() { return Node({1}, m1(0.5), m1(0.75), m1(1), m1(-0.5)); }

inline Node blaschke_in(int k, int n_vars) {
    std::vector<int> dims(n_vars, 0);
    dims[k - 1] = 1;
    return Node(dims, m1(0.5), m1(0.75), m1(1), m1(-0.5));
}

// (z1 + 1)^{-1}(z1 - 1)(z2 + 1)^{-1}(z2 - 1)
inline Node ex1() { return ncfps::product(e1_in(1, 2), e1_in(2, 2)); }

// ((z2 + i)(z1 + 1) + 1)^{-1}((z2 + i)(z1 - 1) + 1), built as u -> (u + 1)^{-1}(u - 1)
// with u = z1 + (z2 + i)^{-1}.
inline Node ex3() {
    // u + 1 = (1 - i) + z1 + sum_{n>=1} (-i)(i z2)^n
    const Node up1({1, 1}, fx::mat({{0, 0}, {0, I}}), Mat::Ones(2, 1), Mat::Ones(1, 2), m1(1.0 - I));
    const Node inv = ncfps::associated(up1);
    // 1 - 2 (u + 1)^{-1}
    return Node(inv.dims, inv.A, inv.B, -2.0 * inv.C, m1(1) - 2.0 * inv.D);
}

// Unobservable and unreachable extra state appended to e1.
inline Node e1_padded() {
    return Node({2}, mat({{-1, 0}, {0, 5}}), mat({{s2}, {0}}), mat({{s2, 0}}), m1(-1));
}

}  // namespace fx
