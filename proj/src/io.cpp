#include "ncfps/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace ncfps::io {

namespace {

int as_int(const json& j, const char* what) {
    if (!j.is_number_integer()) throw UsageError(std::string(what) + " must be an integer");
    return j.get<int>();
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw UsageError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

Word word_from_json(const json& j) {
    if (!j.is_array()) throw UsageError("a word must be an array of letters");
    Word w;
    for (const auto& l : j) w.push_back(as_int(l, "word letter"));
    return w;
}

void dump_into(const json& j, std::string& out, int indent) {
    const std::string pad(2 * indent, ' '), inner(2 * indent + 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [k, v] : j.items()) {  // nlohmann::json keeps object keys sorted
                if (!first) out += ",\n";
                first = false;
                out += inner + json(k).dump() + ": ";
                dump_into(v, out, indent + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            // scalars and [re, im] pairs stay on one line
            auto prim_array = [](const json& x) {
                return x.is_array() && std::all_of(x.begin(), x.end(), [](const json& y) { return y.is_primitive(); });
            };
            const bool flat = std::all_of(j.begin(), j.end(), [&](const json& x) { return x.is_primitive() || prim_array(x); });
            if (j.empty() || flat) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out += ", ";
                    dump_into(j[i], out, indent + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += inner;
                dump_into(j[i], out, indent + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
            out += buf;
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw UsageError("complex scalars are [re, im] pairs");
}

json to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

Mat mat_from_json(const json& j, int rows_hint, int cols_hint) {
    if (!j.is_array()) throw UsageError("a matrix must be an array of rows");
    if (j.empty()) {
        if (rows_hint > 0) throw UsageError("matrix has no rows but " + std::to_string(rows_hint) + " are expected");
        return Mat::Zero(0, std::max(cols_hint, 0));
    }
    const int rows = static_cast<int>(j.size());
    if (!j[0].is_array()) throw UsageError("a matrix must be an array of rows");
    const int cols = static_cast<int>(j[0].size());
    if (cols == 0 && cols_hint > 0) throw UsageError("matrix has empty rows but " + std::to_string(cols_hint) + " columns are expected");
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) throw UsageError("matrix rows differ in length");
        for (int c = 0; c < cols; ++c) m(r, c) = cplx_from_json(j[r][c]);
    }
    if ((rows_hint >= 0 && rows != rows_hint) || (cols_hint >= 0 && cols != cols_hint))
        throw UsageError("matrix is " + std::to_string(rows) + " x " + std::to_string(cols) + ", expected " +
                         std::to_string(rows_hint) + " x " + std::to_string(cols_hint));
    return m;
}

json to_json(const Node& a, const std::optional<Mat>& J) {
    json j;
    j["n_vars"] = a.n_vars;
    j["dims"] = a.dims;
    j["A"] = to_json(a.A);
    j["B"] = to_json(a.B);
    j["C"] = to_json(a.C);
    j["D"] = to_json(a.D);
    if (J) j["J"] = to_json(*J);
    return j;
}

Node node_from_json(const json& j) {
    const int n = as_int(field(j, "n_vars"), "n_vars");
    const json& dj = field(j, "dims");
    if (!dj.is_array()) throw UsageError("dims must be an array");
    std::vector<int> dims;
    for (const auto& d : dj) dims.push_back(as_int(d, "dims entry"));
    if (static_cast<int>(dims.size()) != n) throw UsageError("dims must have n_vars entries");
    int r = 0;
    for (int d : dims) {
        if (d < 0) throw UsageError("dims must be non-negative");
        r += d;
    }
    const Mat D = mat_from_json(field(j, "D"));
    const int p = static_cast<int>(D.rows()), q = static_cast<int>(D.cols());
    return Node(dims, mat_from_json(field(j, "A"), r, r), mat_from_json(field(j, "B"), r, q),
                mat_from_json(field(j, "C"), p, r), D);
}

Mat signature_from_json(const json& j, int q) {
    if (j.is_object() && j.contains("J")) return mat_from_json(j.at("J"), q, q);
    return Mat::Identity(q, q);
}

json to_json(const Fps& f) {
    json j;
    j["n_vars"] = f.n_vars;
    j["rows"] = f.rows;
    j["cols"] = f.cols;
    j["degree"] = f.degree;
    json terms = json::array();
    for (const auto& [w, m] : f.terms) terms.push_back({{"word", w}, {"matrix", to_json(m)}});
    j["terms"] = terms;
    return j;
}

Fps fps_from_json(const json& j) {
    const int n = as_int(field(j, "n_vars"), "n_vars");
    const int p = as_int(field(j, "rows"), "rows"), q = as_int(field(j, "cols"), "cols");
    const int d = as_int(field(j, "degree"), "degree");
    if (n < 1 || p < 1 || q < 1 || d < 0) throw UsageError("series header out of range");
    Fps f(n, p, q, d);
    const json& terms = field(j, "terms");
    if (!terms.is_array()) throw UsageError("terms must be an array");
    for (const auto& t : terms) {
        const Word w = word_from_json(field(t, "word"));
        if (!valid_word(w, n)) throw UsageError("word " + to_string(w) + " uses letters outside 1..n_vars");
        f.add_to(w, mat_from_json(field(t, "matrix"), p, q));
    }
    return f;
}

json to_json(const SubspaceFamily& M) {
    json b = json::array();
    for (const auto& m : M.bases) b.push_back(to_json(m));
    return {{"bases", b}};
}

SubspaceFamily family_from_json(const json& j, const Node& a) {
    const json& b = field(j, "bases");
    if (!b.is_array() || static_cast<int>(b.size()) != a.n_vars) throw UsageError("bases must list one matrix per component");
    SubspaceFamily M;
    for (int k = 0; k < a.n_vars; ++k) {
        const int rk = a.dims[k];
        if (b[k].is_array() && b[k].empty()) {
            M.bases.push_back(Mat::Zero(rk, 0));
            continue;
        }
        M.bases.push_back(mat_from_json(b[k], rk, -1));
    }
    M.validate(a);
    return M;
}

json to_json(const KernelTable& K) {
    json out = json::array();
    for (const auto& [key, m] : K.entries) out.push_back({{"w", key.first}, {"w2", key.second}, {"matrix", to_json(m)}});
    return out;
}

json to_json(const StructuredHermitian& H) {
    json out = json::array();
    for (const auto& b : H.blocks) out.push_back(to_json(b));
    return out;
}

json to_json(const Residuals& r) {
    json out = json::object();
    for (const auto& [k, v] : r) out[k] = v;
    return out;
}

std::string dump(const json& j) {
    std::string out;
    dump_into(j, out, 0);
    out += "\n";
    return out;
}

json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

}  // namespace ncfps::io
