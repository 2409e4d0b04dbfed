#include "doctest.h"
#include "fixtures.hpp"
#include "ncfps/fps.hpp"
#include "oracles.hpp"

using namespace ncfps;
using fx::m1;

namespace {

Fps one_plus(int var, int n_vars, int degree) {
    Fps f = identity_series(n_vars, 1, degree);
    f.set({var}, m1(1));
    return f;
}

}  // namespace

TEST_SUITE("fps") {
    TEST_CASE("add") {
        const Fps f = one_plus(1, 2, 3);
        CHECK(max_coeff_diff(add(f, Fps(2, 1, 1, 3)), f) == 0.0);
        CHECK(add(constant(1, m1(1), 2), constant(1, m1(-1), 2)).terms.empty());
        const Fps s = add(one_plus(1, 2, 2), one_plus(2, 2, 2));
        CHECK(s.coeff({}) (0, 0) == cplx(2));
        CHECK(s.coeff({1})(0, 0) == cplx(1));
        CHECK(s.coeff({2})(0, 0) == cplx(1));
        CHECK(add(one_plus(1, 2, 2), one_plus(2, 2, 5)).degree == 2);
        CHECK_THROWS_AS(add(Fps(2, 1, 1, 2), Fps(2, 2, 1, 2)), UsageError);
    }

    TEST_CASE("mul is non-commutative") {
        Fps z1(2, 1, 1, 3), z2(2, 1, 1, 3);
        z1.set({1}, m1(1));
        z2.set({2}, m1(1));
        const Fps p = mul(z1, z2);
        CHECK(p.terms.size() == 1);
        CHECK(p.coeff({1, 2})(0, 0) == cplx(1));
        CHECK(p.coeff({2, 1})(0, 0) == cplx(0));
    }

    TEST_CASE("mul identity and geometric oracle") {
        const int d = 6;
        const Fps f = one_plus(1, 1, d);
        CHECK(max_coeff_diff(mul(identity_series(1, 1, d), f), f) == 0.0);
        CHECK(max_coeff_diff(mul(f, identity_series(1, 1, d)), f) == 0.0);
        const auto geo = oracle::taylor({1}, {1, 1}, d);
        Fps g(1, 1, 1, d);
        for (int k = 0; k <= d; ++k) g.set(Word(k, 1), m1(geo[k]));
        CHECK(max_coeff_diff(mul(f, g), identity_series(1, 1, d)) < 1e-15);
    }

    TEST_CASE("invert") {
        CHECK(invert(constant(1, m1(2), 3)).coeff({})(0, 0) == cplx(0.5));
        const int d = 7;
        const auto geo = oracle::taylor({1}, {1, 1}, d);
        const Fps inv = invert(one_plus(1, 1, d));
        for (int k = 0; k <= d; ++k) CHECK(std::abs(inv.coeff(Word(k, 1))(0, 0) - geo[k]) < 1e-14);

        Fps f = identity_series(1, 2, 4);
        Mat E12 = Mat::Zero(2, 2);
        E12(0, 1) = 1;
        f.set({1}, E12);
        const Fps fi = invert(f);
        CHECK(fi.terms.size() == 2);
        CHECK((fi.coeff({1}) + E12).norm() == 0.0);

        CHECK_THROWS_AS(invert(constant(1, Mat::Zero(1, 1), 2)), NumericalError);
        CHECK_THROWS_AS(invert(Fps(1, 1, 2, 2)), UsageError);
    }

    TEST_CASE("eval") {
        Fps f(2, 1, 1, 3);
        f.set({}, m1(3));
        f.set({1, 2}, m1(1));
        const std::vector<Mat> zero{Mat::Zero(2, 2), Mat::Zero(2, 2)};
        CHECK((eval(f, zero) - 3.0 * Mat::Identity(2, 2)).norm() == 0.0);
        const Mat Z1 = fx::mat({{1, 2}, {0, 1}}), Z2 = fx::mat({{0, 1}, {1, 0}});
        CHECK((eval(f, {Z1, Z2}) - (3.0 * Mat::Identity(2, 2) + Z1 * Z2)).norm() < 1e-15);
        CHECK_THROWS_AS(eval(f, {Z1}), UsageError);
        CHECK_THROWS_AS(eval(f, {Z1, Mat::Zero(3, 3)}), UsageError);
    }

    TEST_CASE("eval of truncated e1 expansion") {
        const int d = 10;
        const auto c = oracle::cayley_line(d);
        Fps f(1, 1, 1, d);
        for (int k = 0; k <= d; ++k) f.set(Word(k, 1), m1(c[k]));
        const cplx v = eval(f, {m1(0.1)})(0, 0);
        const double exact = (0.1 - 1) / (0.1 + 1);
        CHECK(std::abs(v - exact) <= 2 * std::pow(0.1, d + 1) / 0.9);
    }

    TEST_CASE("set rejects out-of-table words") {
        Fps f(2, 1, 1, 2);
        CHECK_THROWS_AS(f.set({1, 1, 1}, m1(1)), UsageError);
        CHECK_THROWS_AS(f.set({3}, m1(1)), UsageError);
        CHECK_THROWS_AS(f.set({1}, Mat::Zero(2, 1)), UsageError);
        f.set({1}, m1(1e-16));
        CHECK(f.terms.empty());
    }
}
