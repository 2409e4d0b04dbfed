#include "ncfps/inner.hpp"

#include <algorithm>
#include <limits>

#include "ncfps/sampling.hpp"

namespace ncfps {

bool is_positive_definite(const StructuredHermitian& H, bool* borderline) {
    bool pd = true, edge = false;
    for (const auto& b : H.blocks) {
        if (b.size() == 0) continue;
        Eigen::SelfAdjointEigenSolver<Mat> es(b, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        const double t = 1e-10 * ev.cwiseAbs().maxCoeff();
        if (ev.minCoeff() <= t) pd = false;
        if (std::abs(ev.minCoeff()) <= t) edge = true;
    }
    if (borderline) *borderline = edge;
    return pd;
}

namespace {

InnerReport classify(const Classification& c) {
    InnerReport rep;
    rep.j_unitary = c.holds;
    rep.reason = c.reason;
    rep.residuals = c.residuals;
    if (!c.holds) return rep;
    rep.H = c.H;
    rep.nu = negative_squares(c.H);
    rep.inner = is_positive_definite(c.H, &rep.borderline);
    if (rep.borderline) rep.reason = "indefinite within tolerance";
    return rep;
}

}  // namespace

InnerReport is_J_inner_line(const Node& a, const Mat& J, const Tol& tol) {
    return classify(is_matrix_J_unitary_line(a, J, tol));
}

InnerReport is_J_inner_disk(const Node& a, const Mat& J, const Tol& tol) {
    return classify(is_matrix_J_unitary_circle(a, J, tol));
}

BalanceResult balance(const Node& a, const StructuredHermitian& H, const Mat& J, bool circle, const Tol& tol) {
    if (!is_positive_definite(H)) throw UsageError("balance needs a positive definite H");
    std::vector<Mat> T;
    for (const auto& b : H.blocks) T.push_back(b.size() ? inv_sqrt_pd(b) : b);
    BalanceResult out{apply_similarity(a, T), {}};
    const Node& n = out.node;
    if (circle) {
        const int r = n.state_dim();
        out.residuals = circle_residuals(n, J, Mat::Identity(r, r));
    } else {
        out.residuals["lyapunov_identity"] =
            rel_residual(n.A.adjoint() + n.A + n.C.adjoint() * J * n.C, {n.A, n.C.adjoint() * J * n.C});
        out.residuals["b_identity"] = rel_residual(n.B + n.C.adjoint() * J * n.D, {n.B, n.C.adjoint() * J * n.D});
    }
    for (const auto& [name, v] : out.residuals)
        if (v > tol.res) throw NumericalError("balanced node fails " + name);
    return out;
}

double unitary_node_defect(const Node& a) {
    if (a.p() != a.q()) throw UsageError("unitary node check needs p = q");
    const int r = a.state_dim(), q = a.q();
    Mat U(r + q, r + q);
    U << a.A, a.B, a.C, a.D;
    return (U.adjoint() * U - Mat::Identity(r + q, r + q)).norm();
}

bool unitary_node_check(const Node& a, double tol) { return unitary_node_defect(a) <= tol; }

namespace {

template <class Eval>
SampleReport contraction_sweep(int n_vars, int n_max, int samples, std::uint64_t seed, Eval&& ev) {
    if (n_max < 1) throw UsageError("schur sampling: n_max must be >= 1");
    Rng rng(seed);
    SampleReport rep;
    for (int s = 0; s < samples; ++s) {
        const int n = 1 + s % n_max;
        const auto W = contraction_tuple(rng, n_vars, n, 0.95);
        try {
            rep.max_residual = std::max(rep.max_residual, ev(W).operatorNorm());
            ++rep.used;
        } catch (const NumericalError&) {
            ++rep.skipped;
        }
    }
    return rep;
}

}  // namespace

SampleReport schur_agler_sample(const Node& a, int n_max, int samples, std::uint64_t seed) {
    return contraction_sweep(a.n_vars, n_max, samples, seed, [&](const std::vector<Mat>& W) { return eval_closed(a, W); });
}

SampleReport schur_agler_sample(const Fps& f, int n_max, int samples, std::uint64_t seed) {
    return contraction_sweep(f.n_vars, n_max, samples, seed, [&](const std::vector<Mat>& W) { return eval(f, W); });
}

double halfplane_contractivity_min(const Node& a, const Mat& J, int n, int samples, std::uint64_t seed) {
    check_signature(a, J);
    Rng rng(seed);
    const Mat Jn = kron(J, Mat::Identity(n, n));
    double worst = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        const auto Z = halfplane_tuple(rng, a.n_vars, n);
        const Mat F = eval_closed(a, Z);
        const Mat G = Jn - F * Jn * F.adjoint();
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (G + G.adjoint()), Eigen::EigenvaluesOnly);
        worst = std::min(worst, es.eigenvalues().minCoeff());
    }
    return worst;
}

}  // namespace ncfps
