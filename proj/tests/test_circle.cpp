#include "doctest.h"
#include "fixtures.hpp"
#include "ncfps/circle_junitary.hpp"
#include "ncfps/sampling.hpp"

using namespace ncfps;
using fx::m1;
using fx::s2;

namespace {

const Mat J1 = Mat::Identity(1, 1);

// c-Blaschke factor (z - c)/(1 - cz) for real c.
Node blaschke_c(double c) { return Node({1}, m1(c), m1(1 - c * c), m1(1), m1(-c)); }

Node two_var_inner() { return product(fx::blaschke_in(1, 2), fx::blaschke_in(2, 2)); }

// Output map C with C*JC = H - A*HA for an H chosen so the right side has the inertia of J.
Mat stein_output(const Mat& A, const Mat& H, const Mat& J) {
    Eigen::SelfAdjointEigenSolver<Mat> es(H - A.adjoint() * H * A);
    const Vec& ev = es.eigenvalues();
    Mat C = Mat::Zero(J.rows(), A.cols());
    int pos = 0, neg = static_cast<int>(J.rows()) - 1;
    for (int i = static_cast<int>(ev.size()) - 1; i >= 0; --i) {
        const double l = ev(i).real();
        const int row = l > 0 ? pos++ : neg--;
        C.row(row) = std::sqrt(std::abs(l)) * es.eigenvectors().col(i).adjoint();
    }
    return C;
}

std::vector<Mat> adj_all(const std::vector<Mat>& Z) {
    std::vector<Mat> out;
    for (const auto& z : Z) out.push_back(z.adjoint());
    return out;
}

}  // namespace

TEST_SUITE("circle_junitary") {
    TEST_CASE("cayley") {
        const Node c = cayley(fx::shift(), 1.0);
        const Node e = fx::e1();
        CHECK(c.A == e.A);
        CHECK(c.B == e.B);
        CHECK(c.C == e.C);
        CHECK(c.D == e.D);
        CHECK(cayley(constant_node(2, m1(5)), 1.0).D(0, 0) == cplx(5));
        const Node h({2}, -0.5 * Mat::Identity(2, 2), Mat::Ones(2, 1), Mat::Ones(1, 2), m1(0));
        CHECK((cayley(h, 1.0).A + 3.0 * Mat::Identity(2, 2)).norm() < 1e-15);
        CHECK_THROWS_AS(cayley(fx::shift(), 2.0), UsageError);
        CHECK_THROWS_AS(cayley(fx::e1(), 1.0), NumericalError);
    }

    TEST_CASE("cayley parameter choice") {
        const cplx a = choose_cayley_parameter(m1(-1));
        CHECK(std::abs(std::abs(a) - 1) < 1e-15);
        CHECK(std::abs(-std::conj(a) + 1.0) > 1.9);
        CHECK(choose_cayley_parameter(Mat::Zero(0, 0)) == cplx(1));
    }

    TEST_CASE("associated H on the circle") {
        CHECK(std::abs(associated_H_circle(fx::shift(), J1).H.blocks[0](0, 0) - 1.0) < 1e-12);
        const auto hb = associated_H_circle(fx::blaschke(), J1);
        CHECK(std::abs(hb.H.blocks[0](0, 0) - 4.0 / 3.0) < 1e-12);
        for (const auto& [name, v] : hb.residuals) CHECK_MESSAGE(v <= 1e-9, name);
        CHECK(std::abs(std::abs(hb.cayley_param) - 1.0) < 1e-15);
        CHECK(associated_H_circle(constant_node(1, m1(fx::I)), J1).H.full().size() == 0);
    }

    TEST_CASE("classification") {
        CHECK(is_matrix_J_unitary_circle(fx::shift(), J1).holds);
        CHECK(is_matrix_J_unitary_circle(fx::blaschke(), J1).holds);
        CHECK(is_matrix_J_unitary_circle(two_var_inner(), J1).holds);
        CHECK_FALSE(is_matrix_J_unitary_circle(constant_node(1, m1(2)), J1).holds);
        CHECK_FALSE(is_matrix_J_unitary_circle(fx::e1(), J1).holds);
    }

    TEST_CASE("sampling") {
        CHECK(sample_check_circle(fx::shift(), J1, 3, 16, 1).max_residual <= 1e-10);
        CHECK(sample_check_circle(fx::blaschke(), J1, 3, 16, 2).max_residual <= 1e-9);
        CHECK(sample_check_circle(two_var_inner(), J1, 2, 16, 3).max_residual <= 1e-9);
        CHECK(sample_check_circle(fx::e1(), J1, 1, 16, 4).max_residual > 0.1);
    }

    TEST_CASE("inverse of A") {
        const auto H = associated_H_circle(fx::blaschke(), J1).H;
        CHECK(std::abs(a_inverse_identity(fx::blaschke(), H)(0, 0) - 2.0) < 1e-12);

        const Node b1 = blaschke_c(0.5), b2 = blaschke_c(1.0 / 3.0);
        const Node sum({2}, fx::mat({{0.5, 0}, {0, 1.0 / 3.0}}), fx::mat({{0.75, 0}, {0, 8.0 / 9.0}}),
                       Mat::Identity(2, 2), fx::mat({{-0.5, 0}, {0, -1.0 / 3.0}}));
        const auto Hs = associated_H_circle(sum, Mat::Identity(2, 2)).H;
        CHECK((Hs.full() - fx::mat({{4.0 / 3.0, 0}, {0, 9.0 / 8.0}})).norm() < 1e-12);
        CHECK((a_inverse_identity(sum, Hs) - fx::mat({{2, 0}, {0, 3}})).norm() < 1e-12);

        CHECK(a_inverse_identity(constant_node(1, m1(1)), StructuredHermitian{{Mat::Zero(0, 0)}}).size() == 0);
        CHECK_THROWS_AS(a_inverse_identity(fx::shift(), StructuredHermitian{{m1(1)}}), NumericalError);
    }

    TEST_CASE("complete from (C, A) on the circle") {
        const Node a = complete_from_CA_circle(m1(1), m1(0.5), {1}, J1, -1.0);
        CHECK(std::abs(a.D(0, 0) - 0.5) < 1e-12);
        CHECK(std::abs(a.B(0, 0) + 0.75) < 1e-12);
        CHECK(sample_check_circle(a, J1, 2, 16, 5).max_residual <= 1e-9);
        CHECK(is_matrix_J_unitary_circle(a, J1).holds);
        const Node b = complete_from_CA_circle(m1(1), m1(0.5), {1}, J1, cplx(0, 1));
        CHECK(sample_check_circle(b, J1, 2, 16, 6).max_residual <= 1e-9);
        CHECK_THROWS_AS(complete_from_CA_circle(m1(0), m1(0.5), {1}, J1, -1.0), UsageError);
        CHECK_THROWS_AS(complete_from_CA_circle(m1(1), m1(0), {1}, J1, -1.0), UsageError);
    }

    TEST_CASE("complete from (A, B) on the circle") {
        const Node a = complete_from_AB_circle(m1(0.5), m1(0.75), {1}, J1, -1.0);
        CHECK(std::abs(a.D(0, 0) - 0.5) < 1e-12);
        CHECK(std::abs(a.C(0, 0) + 1.0) < 1e-12);
        CHECK(sample_check_circle(a, J1, 2, 16, 7).max_residual <= 1e-9);
        CHECK_THROWS_AS(complete_from_AB_circle(m1(0.5), m1(0), {1}, J1, -1.0), UsageError);
    }

    TEST_CASE("two-variable indefinite completion") {
        const Mat J = fx::mat({{1, 0}, {0, -1}});
        const Mat A = fx::mat({{0.3, 0.2}, {-0.1, 0.6}});
        const Mat H = fx::mat({{1, 0}, {0, -1}});
        const Mat C = stein_output(A, H, J);
        REQUIRE((C.adjoint() * J * C - H + A.adjoint() * H * A).norm() < 1e-12);
        const Node a = complete_from_CA_circle(C, A, {1, 1}, J, cplx(0, 1));
        CHECK(is_matrix_J_unitary_circle(a, J).holds);
        CHECK(sample_check_circle(a, J, 2, 16, 8).max_residual <= 1e-9);
        CHECK((associated_H_circle(a, J).H.full() - H).norm() <= 1e-9);
        const Node b = complete_from_AB_circle(a.A, a.B, {1, 1}, J, -1.0);
        CHECK(sample_check_circle(b, J, 2, 16, 9).max_residual <= 1e-9);
    }

    TEST_CASE("circle H equals line H of every Cayley image") {
        for (const Node& a : {fx::blaschke(), two_var_inner(), fx::shift()}) {
            const Mat H = associated_H_circle(a, J1).H.full();
            for (cplx p : {cplx(1), cplx(0, 1), std::polar(1.0, 2.0)})
                CHECK((associated_H_line(cayley(a, p), J1).H.full() - H).norm() <= 1e-9);
        }
    }

    TEST_CASE("two-point Stein identities") {
        Rng rng(21);
        for (const Node& a : {fx::blaschke(), two_var_inner(), complete_from_CA_circle(m1(1), m1(2.0), {1}, J1, cplx(0, 1))}) {
            const Mat H = associated_H_circle(a, J1).H.full();
            for (int s = 0; s < 8; ++s) {
                const int n = 1 + s % 2;
                const auto Z = small_tuple(rng, a.n_vars, n, sampling_radius(a));
                const auto W = small_tuple(rng, a.n_vars, n, sampling_radius(a));
                const Mat In = Mat::Identity(n, n);
                const Mat Dz = delta(a.dims, Z), Dw = delta(a.dims, W), Dws = delta(a.dims, adj_all(W));
                const Mat Ir = Mat::Identity(Dz.rows(), Dz.cols());
                const Mat Fz = eval_closed(a, Z), Fw = eval_closed(a, W);
                const Mat rhs = kron(J1, In) - kron(a.B.adjoint(), In) * (Ir - Dws * kron(a.A.adjoint(), In)).inverse() *
                                                   kron(H, In) * (Ir - Dw.adjoint() * Dz) *
                                                   (Ir - kron(a.A, In) * Dz).inverse() * kron(a.B, In);
                CHECK((Fw.adjoint() * kron(J1, In) * Fz - rhs).norm() <= 1e-9);
                const Mat rhs2 = kron(J1, In) - kron(a.C, In) * (Ir - Dz * kron(a.A, In)).inverse() *
                                                    kron(H.inverse(), In) * (Ir - Dz * Dw.adjoint()) *
                                                    (Ir - kron(a.A.adjoint(), In) * Dws).inverse() * kron(a.C.adjoint(), In);
                CHECK((Fz * kron(J1, In) * Fw.adjoint() - rhs2).norm() <= 1e-9);
            }
        }
    }

    TEST_CASE("observable iff controllable under an invertible H") {
        const Node a({2}, fx::mat({{0.5, 0}, {0, cplx(0, 1)}}), fx::mat({{0.75}, {0}}), fx::mat({{1, 0}}), m1(-0.5));
        const Mat H = fx::mat({{4.0 / 3.0, 0}, {0, 1}});
        for (const auto& [name, v] : circle_residuals(a, J1, H)) CHECK_MESSAGE(v <= 1e-12, name);
        const auto rep = minimality(a);
        CHECK(rep.observable == rep.controllable);
        CHECK_FALSE(rep.observable);
        for (const Node& b : {fx::blaschke(), two_var_inner()}) {
            const auto r = minimality(b);
            CHECK(r.observable == r.controllable);
        }
    }

    TEST_CASE("signature invariant under similarity") {
        const Node two = two_var_inner();
        const Node a = complete_from_CA_circle(two.C, two.A, {1, 1}, J1, cplx(0, 1));
        const auto Ha = associated_H_circle(a, J1).H;
        const std::vector<Mat> T{m1(cplx(0.5, 1)), m1(3)};
        const auto Hb = associated_H_circle(apply_similarity(a, T), J1).H;
        for (int k = 0; k < 2; ++k) {
            CHECK((Hb.blocks[k] - T[k].adjoint() * Ha.blocks[k] * T[k]).norm() < 1e-9);
            CHECK(Hb.signature()[k].neg == Ha.signature()[k].neg);
        }
    }

    TEST_CASE("circle diagnostics") {
        const auto H = associated_H_circle(fx::blaschke(), J1).H;
        const auto d = unitary_circle_diagnostics(fx::blaschke(), H);
        REQUIRE(d.common.size() == 1);
        CHECK(std::abs(d.common[0].lambda[0] - 0.5) < 1e-12);
        CHECK_FALSE(d.violation);
        const Node on_circle({1}, m1(cplx(0, 1)), m1(1), m1(1), m1(1));
        CHECK(unitary_circle_diagnostics(on_circle, StructuredHermitian{{m1(1)}}).violation);
    }
}
