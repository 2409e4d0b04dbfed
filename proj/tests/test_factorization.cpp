#include "doctest.h"
#include "fixtures.hpp"
#include "ncfps/factorization.hpp"
#include "oracles.hpp"

using namespace ncfps;
using fx::m1;

namespace {

const Mat J1 = Mat::Identity(1, 1);

SubspaceFamily fam(std::vector<Mat> b) { return SubspaceFamily{std::move(b)}; }

// First-factor family of a product of single-state factors in variables 1 and 2.
SubspaceFamily first_factor() { return fam({m1(1), Mat::Zero(1, 0)}); }
SubspaceFamily second_factor() { return fam({Mat::Zero(1, 0), m1(1)}); }

// Largest deviation of f from the one-variable series sum_m c_m z_k^m times u.
double single_var_gap(const Fps& f, int k, const std::vector<oracle::cplx>& c, cplx u = 1.0) {
    double gap = 0;
    for (const auto& w : enumerate(f.n_vars, f.degree)) {
        const bool pure = std::all_of(w.begin(), w.end(), [&](int l) { return l == k; });
        const cplx want = pure ? u * c[w.size()] : cplx(0);
        gap = std::max(gap, std::abs(f.coeff(w)(0, 0) - want));
    }
    return gap;
}

}  // namespace

TEST_SUITE("factorization") {
    TEST_CASE("block invariance") {
        const Node a = fx::ex1();
        CHECK(is_block_A_invariant(a, full_family(a)));
        CHECK(is_block_A_invariant(a, zero_family(a)));
        CHECK(is_block_A_invariant(a, first_factor()));
        CHECK_FALSE(is_block_A_invariant(a, second_factor()));
        CHECK_THROWS_AS(is_block_A_invariant(a, fam({m1(1)})), UsageError);
        CHECK_THROWS_AS(is_block_A_invariant(a, fam({Mat::Zero(1, 1), Mat::Zero(1, 0)})), UsageError);
    }

    TEST_CASE("H-orthogonal complements") {
        const StructuredHermitian I2{{Mat::Identity(2, 2)}};
        const SubspaceFamily M = fam({fx::mat({{1}, {1}})});
        CHECK(is_nondegenerate(M, I2));
        const Mat P = h_orthogonal_complement(M, I2).bases[0];
        REQUIRE(P.cols() == 1);
        CHECK(std::abs((M.bases[0].adjoint() * P)(0, 0)) < 1e-14);
        const StructuredHermitian swap{{fx::mat({{0, 1}, {1, 0}})}};
        CHECK_FALSE(is_nondegenerate(fam({fx::mat({{1}, {0}})}), swap));
        CHECK(is_nondegenerate(first_factor(), StructuredHermitian{{m1(1), m1(1)}}));
    }

    TEST_CASE("supporting projections") {
        const SubspaceFamily zero = fam({Mat::Zero(2, 0)}), full = fam({Mat::Identity(2, 2)});
        CHECK((supporting_projection(zero, full)[0] - Mat::Identity(2, 2)).norm() < 1e-15);
        CHECK(supporting_projection(full, zero)[0].norm() < 1e-15);
        const StructuredHermitian H{{fx::mat({{1, 0}, {0, -1}})}};
        const SubspaceFamily e1 = fam({fx::mat({{1}, {0}})});
        const auto Pi = supporting_projection(e1, h_orthogonal_complement(e1, H));
        CHECK((Pi[0] - fx::mat({{0, 0}, {0, 1}})).norm() < 1e-14);
        const SubspaceFamily skew = fam({fx::mat({{1}, {1}})});
        const auto Q = supporting_projection(e1, skew)[0];
        CHECK((Q * Q - Q).norm() < 1e-14);
        CHECK((Q * fx::mat({{1}, {0}})).norm() < 1e-14);
        CHECK((Q * fx::mat({{1}, {1}}) - fx::mat({{1}, {1}})).norm() < 1e-14);
        CHECK_THROWS_AS(supporting_projection(e1, e1), UsageError);
        const auto [ker, ran] = projection_parts({Q});
        CHECK(ker.bases[0].cols() == 1);
        CHECK(ran.bases[0].cols() == 1);
        CHECK_THROWS_AS(projection_parts({fx::mat({{1, 1}, {0, 0.5}})}), UsageError);
    }

    TEST_CASE("project factors") {
        const Node a = fx::ex1();
        const Mat one = m1(1);
        const auto [f1, f2] = project_factors(a, full_family(a), zero_family(a), one, one);
        CHECK(max_coeff_diff(expand(f1, 5), expand(a, 5)) < 1e-14);
        CHECK(f2.state_dim() == 0);

        const auto [g1, g2] = project_factors(a, first_factor(), second_factor(), m1(-1), m1(-1));
        CHECK(g1.dims == std::vector<int>{1, 0});
        CHECK(g2.dims == std::vector<int>{0, 1});
        CHECK(single_var_gap(expand(g1, 6), 1, oracle::cayley_line(6)) < 1e-10);
        CHECK(single_var_gap(expand(g2, 6), 2, oracle::cayley_line(6)) < 1e-10);
        CHECK(max_coeff_diff(expand(product(g1, g2), 6), expand(a, 6)) < 1e-12);

        CHECK_THROWS_AS(project_factors(a, second_factor(), first_factor(), m1(-1), m1(-1)), UsageError);
        CHECK_THROWS_AS(project_factors(a, first_factor(), second_factor(), m1(2), m1(2)), UsageError);
        // kernel invariant, range not invariant under the associated A
        const Node big = product(fx::e1_in(1, 2), fx::e1_in(1, 2));
        const SubspaceFamily ker = fam({fx::mat({{1}, {0}}), Mat::Zero(0, 0)});
        const SubspaceFamily ran = fam({fx::mat({{1}, {1}}), Mat::Zero(0, 0)});
        CHECK_THROWS_AS(project_factors(big, ker, ran, m1(1), m1(1)), UsageError);
    }

    TEST_CASE("projection matrices as input") {
        const Node a = fx::ex1();
        const auto Pi = supporting_projection(first_factor(), second_factor());
        const auto [g1, g2] = project_factors(a, Pi, m1(-1), m1(-1));
        CHECK(max_coeff_diff(expand(product(g1, g2), 5), expand(a, 5)) < 1e-12);
    }

    TEST_CASE("line J-unitary factorization") {
        const Node a = fx::ex1();
        const auto f = minimal_junitary_factorize_line(a, J1, first_factor(), std::make_pair(m1(-1), m1(-1)));
        CHECK(single_var_gap(expand(f.first, 6), 1, oracle::cayley_line(6)) < 1e-10);
        CHECK(single_var_gap(expand(f.second, 6), 2, oracle::cayley_line(6)) < 1e-10);
        CHECK(is_matrix_J_unitary_line(f.first, J1).holds);
        CHECK(is_matrix_J_unitary_line(f.second, J1).holds);
        CHECK((associated_H_line(f.first, J1).H.full() - f.H1.full()).norm() < 1e-9);
        CHECK((associated_H_line(f.second, J1).H.full() - f.H2.full()).norm() < 1e-9);
        for (const auto& [name, v] : f.residuals) CHECK_MESSAGE(v <= 1e-9, name);

        const auto d = minimal_junitary_factorize_line(a, J1, first_factor());
        CHECK(d.D1(0, 0) == cplx(1));
        CHECK(max_coeff_diff(expand(product(d.first, d.second), 6), expand(a, 6)) < 1e-12);

        const auto z = minimal_junitary_factorize_line(a, J1, zero_family(a));
        CHECK(z.first.state_dim() == 0);
        CHECK(max_coeff_diff(expand(z.second, 5), expand(a, 5)) < 1e-12);
        const auto w = minimal_junitary_factorize_line(a, J1, full_family(a));
        CHECK(w.second.state_dim() == 0);

        CHECK_THROWS_AS(minimal_junitary_factorize_line(a, J1, second_factor()), UsageError);
        CHECK_THROWS_AS(minimal_junitary_factorize_line(a, J1, first_factor(), std::make_pair(m1(2), m1(0.5))),
                        UsageError);
    }

    TEST_CASE("negative squares add across factors") {
        const Node a = product(associated(fx::e1_in(1, 2)), fx::e1_in(2, 2));
        const auto H = associated_H_line(a, J1).H;
        const auto f = minimal_junitary_factorize_line(a, J1, first_factor());
        const auto n = negative_squares(H), n1 = negative_squares(f.H1), n2 = negative_squares(f.H2);
        CHECK(n == std::vector<int>{1, 0});
        for (int k = 0; k < 2; ++k) CHECK(n[k] == n1[k] + n2[k]);
        for (int k = 0; k < 2; ++k)
            CHECK(reduce_to_minimal(a).node.dims[k] ==
                  reduce_to_minimal(f.first).node.dims[k] + reduce_to_minimal(f.second).node.dims[k]);
    }

    TEST_CASE("circle J-unitary factorization") {
        const Node a = product(fx::blaschke_in(1, 2), fx::blaschke_in(2, 2));
        const auto f = minimal_junitary_factorize_circle(a, J1, first_factor(), cplx(-1));
        CHECK(std::abs(f.D1(0, 0) - 0.5) < 1e-12);
        const cplx u1 = f.first.D(0, 0) / -0.5, u2 = f.second.D(0, 0) / -0.5;
        CHECK(std::abs(std::abs(u1) - 1) < 1e-12);
        CHECK(std::abs(std::abs(u2) - 1) < 1e-12);
        CHECK(single_var_gap(expand(f.first, 6), 1, oracle::blaschke(6), u1) < 1e-10);
        CHECK(single_var_gap(expand(f.second, 6), 2, oracle::blaschke(6), u2) < 1e-10);
        CHECK(is_matrix_J_unitary_circle(f.first, J1).holds);
        CHECK(is_matrix_J_unitary_circle(f.second, J1).holds);
        CHECK(f.residuals.at("product") < 1e-12);

        const auto g = minimal_junitary_factorize_circle(a, J1, first_factor());
        CHECK(max_coeff_diff(expand(product(g.first, g.second), 6), expand(a, 6)) < 1e-12);
        const auto z = minimal_junitary_factorize_circle(a, J1, zero_family(a));
        CHECK(z.first.state_dim() == 0);
        CHECK(z.D1(0, 0) == cplx(1));
        const auto w = minimal_junitary_factorize_circle(a, J1, full_family(a));
        CHECK(w.second.state_dim() == 0);
        CHECK_THROWS_AS(minimal_junitary_factorize_circle(a, J1, first_factor(), cplx(2)), UsageError);
        CHECK_THROWS_AS(minimal_junitary_factorize_circle(fx::shift(), J1, full_family(fx::shift())), UsageError);
    }

    TEST_CASE("compressed blocks are triangular") {
        const Node a = fx::ex1();
        const auto s = split_coordinates(a, first_factor(), second_factor());
        CHECK(s.A21.norm() == 0.0);
        CHECK(s.dims1 == std::vector<int>{1, 0});
    }

    TEST_CASE("enumerating invariant families") {
        const Node a = fx::ex1();
        const auto H = associated_H_line(a, J1).H;
        const auto c = enumerate_invariant_families(a, H);
        bool found = false;
        for (const auto& x : c)
            if (!x.trivial && x.M.dims() == std::vector<int>{1, 0}) found = x.nondegenerate;
        CHECK(found);
        CHECK(c.front().trivial);

        const auto e = enumerate_invariant_families(fx::e1(), associated_H_line(fx::e1(), J1).H);
        CHECK(e.size() == 2);
        for (const auto& x : e) CHECK(x.trivial);

        const Node irr({1, 1}, fx::mat({{0, 1}, {1, 0}}), Mat::Ones(2, 1), Mat::Ones(1, 2), m1(0));
        for (const auto& x : enumerate_invariant_families(irr, StructuredHermitian{{m1(1), m1(1)}}))
            CHECK(x.trivial);

        const auto e2 = enumerate_invariant_families(fx::e2(), associated_H_line(fx::e2(), J1).H);
        for (const auto& x : e2) CHECK(is_block_A_invariant(fx::e2(), x.M));
        CHECK(enumerate_invariant_families(a, H, 1).size() == 1);
    }
}
