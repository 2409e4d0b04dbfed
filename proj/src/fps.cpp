#include "ncfps/fps.hpp"

#include <algorithm>

namespace ncfps {

Fps::Fps(int n, int p, int q, int d) : n_vars(n), rows(p), cols(q), degree(d) {
    if (n < 1 || p < 0 || q < 0 || d < 0) throw UsageError("fps: bad shape");
}

Mat Fps::coeff(const Word& w) const {
    auto it = terms.find(w);
    return it == terms.end() ? Mat::Zero(rows, cols) : it->second;
}

void Fps::set(const Word& w, const Mat& m) {
    if (m.rows() != rows || m.cols() != cols) throw UsageError("fps: coefficient shape mismatch");
    if (static_cast<int>(w.size()) > degree || !valid_word(w, n_vars))
        throw UsageError("fps: word " + to_string(w) + " outside table");
    if (m.norm() <= drop_tol)
        terms.erase(w);
    else
        terms[w] = m;
}

void Fps::add_to(const Word& w, const Mat& m) {
    auto it = terms.find(w);
    set(w, it == terms.end() ? m : Mat(it->second + m));
}

Fps constant(int n_vars, const Mat& c, int degree) {
    Fps f(n_vars, static_cast<int>(c.rows()), static_cast<int>(c.cols()), degree);
    f.set({}, c);
    return f;
}

Fps identity_series(int n_vars, int size, int degree) {
    return constant(n_vars, Mat::Identity(size, size), degree);
}

namespace {

void check_same(const Fps& f, const Fps& g) {
    if (f.n_vars != g.n_vars || f.rows != g.rows || f.cols != g.cols)
        throw UsageError("fps: shape mismatch");
}

}  // namespace

Fps truncate(const Fps& f, int degree) {
    Fps out(f.n_vars, f.rows, f.cols, std::min(degree, f.degree));
    for (const auto& [w, m] : f.terms)
        if (static_cast<int>(w.size()) <= out.degree) out.terms[w] = m;
    return out;
}

Fps add(const Fps& f, const Fps& g) {
    check_same(f, g);
    Fps out = truncate(f, std::min(f.degree, g.degree));
    for (const auto& [w, m] : g.terms)
        if (static_cast<int>(w.size()) <= out.degree) out.add_to(w, m);
    return out;
}

Fps scale(const Fps& f, cplx s) {
    Fps out(f.n_vars, f.rows, f.cols, f.degree);
    for (const auto& [w, m] : f.terms) out.set(w, s * m);
    return out;
}

Fps sub(const Fps& f, const Fps& g) { return add(f, scale(g, -1.0)); }

Fps mul(const Fps& f, const Fps& g) {
    if (f.n_vars != g.n_vars || f.cols != g.rows) throw UsageError("fps: shape mismatch in mul");
    const int d = std::min(f.degree, g.degree);
    Fps out(f.n_vars, f.rows, g.cols, d);
    std::map<Word, Mat, GradedLess> acc;
    for (const auto& [u, a] : f.terms) {
        if (static_cast<int>(u.size()) > d) break;
        for (const auto& [v, b] : g.terms) {
            if (static_cast<int>(u.size() + v.size()) > d) break;
            Word w = concat(u, v);
            auto it = acc.find(w);
            if (it == acc.end())
                acc.emplace(std::move(w), a * b);
            else
                it->second += a * b;
        }
    }
    for (auto& [w, m] : acc) out.set(w, m);
    return out;
}

Fps invert(const Fps& f) {
    if (f.rows != f.cols) throw UsageError("fps invert: non-square coefficients");
    const Mat f0 = f.coeff({});
    Eigen::JacobiSVD<Mat> svd(f0);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0 || sv(sv.size() - 1) < 1e-12 * sv(0))
        throw NumericalError("fps invert: constant coefficient is singular");
    const Mat f0inv = f0.inverse();
    // g = I - f0^{-1} f has no constant term, so g^k starts at degree k.
    Fps g = scale(mul(constant(f.n_vars, f0inv, f.degree), f), -1.0);
    g.add_to({}, Mat::Identity(f.rows, f.rows));
    g.terms.erase(Word{});
    Fps sum = identity_series(f.n_vars, f.rows, f.degree);
    Fps power = sum;
    for (int k = 1; k <= f.degree; ++k) {
        power = mul(power, g);
        sum = add(sum, power);
    }
    return mul(sum, constant(f.n_vars, f0inv, f.degree));
}

Mat eval(const Fps& f, const std::vector<Mat>& Z) {
    if (static_cast<int>(Z.size()) != f.n_vars) throw UsageError("fps eval: tuple length mismatch");
    const Eigen::Index n = Z.empty() ? 0 : Z[0].rows();
    for (const auto& z : Z)
        if (z.rows() != n || z.cols() != n) throw UsageError("fps eval: ragged tuple");
    Mat out = Mat::Zero(f.rows * n, f.cols * n);
    // Terms are graded-sorted, so every prefix of w was visited before w.
    std::map<Word, Mat, GradedLess> powers;
    powers[{}] = Mat::Identity(n, n);
    auto power_of = [&](const Word& w) -> const Mat& {
        auto it = powers.find(w);
        if (it != powers.end()) return it->second;
        Mat p = Mat::Identity(n, n);
        Word prefix;
        for (int g : w) {
            prefix.push_back(g);
            auto hit = powers.find(prefix);
            if (hit != powers.end()) {
                p = hit->second;
            } else {
                p = p * Z[g - 1];
                powers.emplace(prefix, p);
            }
        }
        return powers.at(w);
    };
    for (const auto& [w, m] : f.terms) out += kron(m, power_of(w));
    return out;
}

double max_coeff_diff(const Fps& f, const Fps& g) {
    check_same(f, g);
    const int d = std::min(f.degree, g.degree);
    double worst = 0;
    for (const auto& [w, m] : f.terms)
        if (static_cast<int>(w.size()) <= d) worst = std::max(worst, (m - g.coeff(w)).norm());
    for (const auto& [w, m] : g.terms)
        if (static_cast<int>(w.size()) <= d && !f.terms.count(w)) worst = std::max(worst, m.norm());
    return worst;
}

}  // namespace ncfps
