// Command-line front end. Every command prints one JSON report with the keys
// command, inputs, result, residuals and seed. Exit codes: 0 success or property
// holds, 1 property fails, 2 usage or input error, 3 numerical failure.

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ncfps/inner.hpp"
#include "ncfps/io.hpp"
#include "ncfps/kernels.hpp"
#include "ncfps/selfadjoint.hpp"

using namespace ncfps;
using io::json;

namespace {

struct Options {
    std::string input, output;
    int degree = 4;
    double rank_tol = -1.0;
    double res_tol = 1e-9;
    int samples = 32;
    int matrix_size = 2;
    std::uint64_t seed = 1;

    // per-command
    std::string kase, from, param, subspace, split, point, shift_s, route;
    bool search = false;
    int k = 1;

    Tol tol() const { return {rank_tol, res_tol}; }
};

struct Report {
    json result = json::object();
    Residuals residuals;
    int exit = 0;
};

json input_file(const Options& o) {
    if (o.input.empty()) throw UsageError("--input is required");
    return io::read_file(o.input);
}

bool is_node(const json& j) { return j.is_object() && j.contains("dims"); }

Fps series_of(const json& j, int degree) {
    if (is_node(j)) return expand(io::node_from_json(j), degree);
    return io::fps_from_json(j);
}

int q_of(const json& j) {
    if (is_node(j)) return static_cast<int>(io::mat_from_json(j.at("D")).cols());
    return io::fps_from_json(j).cols;
}

cplx parse_param(const std::string& s, cplx fallback) {
    if (s.empty()) return fallback;
    try {
        const auto comma = s.find(',');
        if (comma == std::string::npos) return {std::stod(s), 0.0};
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw UsageError("--param expects \"re\" or \"re,im\"");
    }
}

json nu_json(const StructuredHermitian& H) { return negative_squares(H); }

void require_case(const std::string& kase, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (kase == a) return;
    throw UsageError("unsupported --case \"" + kase + "\"");
}

Report cmd_expand(const Options& o) {
    Report r;
    r.result["series"] = io::to_json(expand(io::node_from_json(input_file(o)), o.degree));
    return r;
}

Report cmd_eval(const Options& o) {
    const json j = input_file(o);
    if (o.point.empty()) throw UsageError("--point is required");
    const json pj = io::read_file(o.point);
    const json& list = pj.is_object() ? pj.at("Z") : pj;
    if (!list.is_array()) throw UsageError("point file must hold a list of matrices");
    std::vector<Mat> Z;
    for (const auto& m : list) Z.push_back(io::mat_from_json(m));
    Report r;
    r.result["value"] = io::to_json(is_node(j) ? eval_closed(io::node_from_json(j), Z) : eval(io::fps_from_json(j), Z));
    return r;
}

Report cmd_minimize(const Options& o) {
    const Node a = io::node_from_json(input_file(o));
    const Reduction red = reduce_to_minimal(a, o.rank_tol);
    Report r;
    r.result["node"] = io::to_json(red.node);
    r.result["dims"] = red.node.dims;
    r.result["original_dims"] = a.dims;
    r.residuals["expansion"] = max_coeff_diff(expand(red.node, o.degree), expand(a, o.degree));
    return r;
}

Report cmd_check(const Options& o) {
    require_case(o.kase, {"line", "circle", "inner-line", "inner-disk", "sa-line", "sa-circle"});
    const json j = input_file(o);
    const Node a = io::node_from_json(j);
    Report r;
    if (o.kase == "line" || o.kase == "circle") {
        const Mat J = io::signature_from_json(j, a.q());
        const bool circle = o.kase == "circle";
        const Classification c = circle ? is_matrix_J_unitary_circle(a, J, o.tol()) : is_matrix_J_unitary_line(a, J, o.tol());
        r.result["j_unitary"] = c.holds;
        r.residuals = c.residuals;
        if (c.holds) {
            r.result["H"] = io::to_json(c.H);
            r.result["nu"] = nu_json(c.H);
            const SampleReport s = circle ? sample_check_circle(a, J, o.matrix_size, o.samples, o.seed)
                                          : sample_check_line(a, J, o.matrix_size, o.samples, o.seed);
            r.residuals["sampling"] = s.max_residual;
            r.result["samples_used"] = s.used;
        } else {
            r.result["reason"] = c.reason;
            r.exit = 1;
        }
    } else if (o.kase == "inner-line" || o.kase == "inner-disk") {
        const Mat J = io::signature_from_json(j, a.q());
        const InnerReport ir = o.kase == "inner-line" ? is_J_inner_line(a, J, o.tol()) : is_J_inner_disk(a, J, o.tol());
        r.result["j_unitary"] = ir.j_unitary;
        r.result["inner"] = ir.inner;
        r.residuals = ir.residuals;
        if (ir.j_unitary) {
            r.result["nu"] = ir.nu;
            r.result["H"] = io::to_json(ir.H);
            r.result["borderline"] = ir.borderline;
        }
        if (!ir.inner) {
            r.result["reason"] = ir.reason.empty() ? "associated H is not positive definite" : ir.reason;
            r.exit = 1;
        }
    } else {
        const bool circle = o.kase == "sa-circle";
        const Classification c = circle ? is_matrix_selfadjoint_circle(a, o.tol()) : is_matrix_selfadjoint_line(a, o.tol());
        r.result["selfadjoint"] = c.holds;
        r.residuals = c.residuals;
        if (c.holds) {
            r.result["H"] = io::to_json(c.H);
            r.result["nu"] = nu_json(c.H);
            const SampleReport s = sample_check_selfadjoint(a, circle, o.matrix_size, o.samples, o.seed);
            r.residuals["sampling"] = s.max_residual;
            r.result["samples_used"] = s.used;
        } else {
            r.result["reason"] = c.reason;
            r.exit = 1;
        }
    }
    return r;
}

Report cmd_assoc_h(const Options& o) {
    require_case(o.kase, {"line", "circle"});
    const json j = input_file(o);
    const Node a = io::node_from_json(j);
    const Mat J = io::signature_from_json(j, a.q());
    const HResult h = o.kase == "line" ? associated_H_line(a, J, o.tol()) : associated_H_circle(a, J, o.tol());
    Report r;
    r.result["H"] = io::to_json(h.H);
    r.result["nu"] = nu_json(h.H);
    if (o.kase == "circle") r.result["cayley_param"] = io::to_json(h.cayley_param);
    r.residuals = h.residuals;
    return r;
}

Report cmd_complete(const Options& o) {
    require_case(o.kase, {"line", "circle"});
    if (o.from != "ca" && o.from != "ab") throw UsageError("--from must be ca or ab");
    const json j = input_file(o);
    const json& dj = j.at("dims");
    std::vector<int> dims = dj.get<std::vector<int>>();
    int r_dim = 0;
    for (int d : dims) r_dim += d;
    const Mat A = io::mat_from_json(j.at("A"), r_dim, r_dim);
    const Mat X = io::mat_from_json(j.at(o.from == "ca" ? "C" : "B"));
    const int q = static_cast<int>(o.from == "ca" ? X.rows() : X.cols());
    const Mat J = io::signature_from_json(j, q);
    const cplx a = parse_param(o.param, -1.0);
    Node n;
    if (o.kase == "line")
        n = o.from == "ca" ? complete_from_CA(X, A, dims, J, o.tol()) : complete_from_AB(A, X, dims, J, o.tol());
    else
        n = o.from == "ca" ? complete_from_CA_circle(X, A, dims, J, a, o.tol())
                           : complete_from_AB_circle(A, X, dims, J, a, o.tol());
    Report r;
    r.result["node"] = io::to_json(n, J);
    const HResult h = o.kase == "line" ? associated_H_line(n, J, o.tol()) : associated_H_circle(n, J, o.tol());
    r.result["H"] = io::to_json(h.H);
    r.residuals = h.residuals;
    return r;
}

Report cmd_cayley(const Options& o) {
    const json j = input_file(o);
    const Node a = io::node_from_json(j);
    const cplx p = parse_param(o.param, 1.0);
    Report r;
    std::optional<Mat> J;
    if (j.contains("J")) J = io::signature_from_json(j, a.q());
    r.result["node"] = io::to_json(cayley(a, p), J);
    r.result["param"] = io::to_json(p);
    return r;
}

Report cmd_balance(const Options& o) {
    require_case(o.kase, {"line", "circle"});
    const json j = input_file(o);
    const Node a = io::node_from_json(j);
    const Mat J = io::signature_from_json(j, a.q());
    const bool circle = o.kase == "circle";
    const HResult h = circle ? associated_H_circle(a, J, o.tol()) : associated_H_line(a, J, o.tol());
    const BalanceResult b = balance(a, h.H, J, circle, o.tol());
    Report r;
    r.result["node"] = io::to_json(b.node, J);
    r.residuals = b.residuals;
    return r;
}

std::optional<std::pair<Mat, Mat>> split_of(const Options& o, int q) {
    if (o.split.empty()) return std::nullopt;
    const json s = io::read_file(o.split);
    return std::make_pair(io::mat_from_json(s.at("D1"), q, q), io::mat_from_json(s.at("D2"), q, q));
}

Report cmd_factorize(const Options& o) {
    require_case(o.kase, {"line", "circle"});
    if (o.search == !o.subspace.empty()) throw UsageError("give exactly one of --subspace and --search");
    const json j = input_file(o);
    const Node a = io::node_from_json(j);
    const Mat J = io::signature_from_json(j, a.q());
    const bool circle = o.kase == "circle";
    Report r;
    SubspaceFamily M;
    if (o.search) {
        const HResult h = circle ? associated_H_circle(a, J, o.tol()) : associated_H_line(a, J, o.tol());
        const auto cands = enumerate_invariant_families(a, h.H);
        json all = json::array();
        bool found = false;
        for (const auto& c : cands) {
            all.push_back({{"dims", c.M.dims()}, {"trivial", c.trivial}, {"nondegenerate", c.nondegenerate}});
            if (!found && !c.trivial && c.nondegenerate) {
                M = c.M;
                found = true;
            }
        }
        r.result["candidates"] = all;
        if (!found) {
            r.result["reason"] = "no nontrivial non-degenerate invariant family found";
            r.exit = 1;
            return r;
        }
    } else {
        M = io::family_from_json(io::read_file(o.subspace), a);
    }
    const Factorization f =
        circle ? minimal_junitary_factorize_circle(a, J, M, o.param.empty() ? std::nullopt : std::optional<cplx>(parse_param(o.param, 1.0)), o.tol())
               : minimal_junitary_factorize_line(a, J, M, split_of(o, a.q()), o.tol());
    r.result["subspace"] = io::to_json(M);
    r.result["first"] = io::to_json(f.first, J);
    r.result["second"] = io::to_json(f.second, J);
    r.result["H1"] = io::to_json(f.H1);
    r.result["H2"] = io::to_json(f.H2);
    r.result["nu1"] = nu_json(f.H1);
    r.result["nu2"] = nu_json(f.H2);
    r.residuals = f.residuals;
    return r;
}

Report cmd_decompose(const Options& o) {
    require_case(o.kase, {"sa-line", "sa-circle"});
    if (o.subspace.empty()) throw UsageError("--subspace is required");
    const Node a = io::node_from_json(input_file(o));
    const bool circle = o.kase == "sa-circle";
    const Classification c = circle ? is_matrix_selfadjoint_circle(a, o.tol()) : is_matrix_selfadjoint_line(a, o.tol());
    if (!c.holds) throw PropertyFailure("node is not matrix-selfadjoint: " + c.reason);
    const SubspaceFamily M = io::family_from_json(io::read_file(o.subspace), a);
    Decomposition d;
    if (circle) {
        std::optional<Mat> S;
        if (!o.shift_s.empty()) S = io::mat_from_json(io::read_file(o.shift_s).at("S"), a.q(), a.q());
        d = circle_selfadjoint_decompose(a, c.H, M, S, o.tol());
    } else {
        d = selfadjoint_decompose(a, c.H, M, split_of(o, a.q()), o.tol());
    }
    Report r;
    r.result["first"] = io::to_json(d.first);
    r.result["second"] = io::to_json(d.second);
    r.result["H1"] = io::to_json(d.H1);
    r.result["H2"] = io::to_json(d.H2);
    r.residuals = d.residuals;
    return r;
}

Report cmd_kernel(const Options& o) {
    if (o.route != "node" && o.route != "series" && o.route != "formal") throw UsageError("--route must be node, series or formal");
    const json j = input_file(o);
    const Mat J = io::signature_from_json(j, q_of(j));
    KernelTable K;
    if (o.route == "node") {
        if (!is_node(j)) throw UsageError("--route node needs a node file");
        const Node a = io::node_from_json(j);
        K = kernel_from_node(a, associated_H_line(a, J, o.tol()).H, o.k, o.degree);
    } else {
        const Fps f = series_of(j, 2 * o.degree + 1);
        K = o.route == "series" ? kernel_from_series(f, J, o.k, o.degree) : kernel_formal_derivative(f, J, o.k, o.degree);
    }
    Report r;
    r.result["table"] = io::to_json(K);
    r.result["negative_squares"] = kernel_gram_all(K).signature.neg;
    r.residuals["hermitian"] = K.hermitian_defect();
    return r;
}

Report cmd_model(const Options& o) {
    const json j = input_file(o);
    const Fps f = series_of(j, o.degree);
    const Mat J = io::signature_from_json(j, f.cols);
    const ModelRealization m = model_realization(f, J, o.tol());
    Report r;
    r.result["node"] = io::to_json(m.node, J);
    r.result["H"] = io::to_json(m.H);
    r.result["dims"] = m.node.dims;
    r.residuals = m.residuals;
    return r;
}

Report cmd_schur(const Options& o) {
    const json j = input_file(o);
    const SampleReport s = is_node(j) ? schur_agler_sample(io::node_from_json(j), o.matrix_size, o.samples, o.seed)
                                      : schur_agler_sample(io::fps_from_json(j), o.matrix_size, o.samples, o.seed);
    Report r;
    const bool ok = s.max_residual <= 1.0 + o.res_tol;
    r.result["max_norm"] = s.max_residual;
    r.result["contractive"] = ok;
    r.result["samples_used"] = s.used;
    r.exit = ok ? 0 : 1;
    return r;
}

Report cmd_hankel(const Options& o) {
    const json j = input_file(o);
    const Fps f = series_of(j, 2 * o.degree + 1);
    const Mat h = hankel(f, o.k, o.degree, o.degree);
    Report r;
    r.result["matrix"] = io::to_json(h);
    r.result["rank"] = rank(h, o.rank_tol);
    return r;
}

json scalar_of(const std::string& s) {
    json j = json::parse(s, nullptr, false);
    return j.is_number() ? j : json(s);
}

json inputs_of(const CLI::App& sub) {
    json in = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_single_name() == "help" || opt->count() == 0) continue;
        const auto& res = opt->results();
        if (opt->get_expected_min() == 0)
            in[opt->get_single_name()] = true;
        else
            in[opt->get_single_name()] = res.size() == 1 ? scalar_of(res[0]) : json(res);
    }
    return in;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Realizations of rational non-commutative formal power series"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--input", o.input, "node or series JSON file");
    app.add_option("--output", o.output, "write the report here instead of standard output");
    app.add_option("--degree", o.degree, "truncation degree")->check(CLI::NonNegativeNumber);
    app.add_option("--rank-tol", o.rank_tol, "rank tolerance (negative: automatic)");
    app.add_option("--res-tol", o.res_tol, "relative residual tolerance")->check(CLI::PositiveNumber);
    app.add_option("--samples", o.samples, "random samples")->check(CLI::PositiveNumber);
    app.add_option("--matrix-size", o.matrix_size, "matrix size of sampled tuples")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "random seed");

    std::map<std::string, std::function<Report(const Options&)>> handlers;
    auto sub = [&](const std::string& name, const std::string& help, std::function<Report(const Options&)> fn) {
        handlers[name] = std::move(fn);
        CLI::App* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };
    sub("expand", "expand a node into a truncated series", cmd_expand);
    sub("eval", "evaluate a node or series at a matrix tuple", cmd_eval)->add_option("--point", o.point, "JSON list of matrices")->required();
    sub("minimize", "reduce a node to a minimal one", cmd_minimize);
    sub("check", "classify a node", cmd_check)->add_option("--case", o.kase, "line|circle|inner-line|inner-disk|sa-line|sa-circle")->required();
    sub("assoc-h", "associated structured Hermitian matrix", cmd_assoc_h)->add_option("--case", o.kase, "line|circle")->required();
    {
        CLI::App* s = sub("complete", "complete (C, A) or (A, B) to a J-unitary node", cmd_complete);
        s->add_option("--from", o.from, "ca|ab")->required();
        s->add_option("--case", o.kase, "line|circle")->default_val("line");
        s->add_option("--param,--a", o.param, "unimodular parameter re[,im] (circle)");
    }
    sub("cayley", "Cayley transform of a node", cmd_cayley)->add_option("--param,--a", o.param, "unimodular parameter re[,im]");
    sub("balance", "similar node with H = I", cmd_balance)->add_option("--case", o.kase, "line|circle")->default_val("line");
    {
        CLI::App* s = sub("factorize", "minimal J-unitary factorization", cmd_factorize);
        s->add_option("--case", o.kase, "line|circle")->default_val("line");
        s->add_option("--subspace", o.subspace, "subspace family JSON");
        s->add_flag("--search", o.search, "search for an invariant family");
        s->add_option("--split", o.split, "JSON with D1 and D2 (line)");
        s->add_option("--param,--a", o.param, "unimodular parameter re[,im] (circle)");
    }
    {
        CLI::App* s = sub("decompose", "additive selfadjoint decomposition", cmd_decompose);
        s->add_option("--case", o.kase, "sa-line|sa-circle")->required();
        s->add_option("--subspace", o.subspace, "subspace family JSON")->required();
        s->add_option("--split", o.split, "JSON with D1 and D2 (line)");
        s->add_option("--shift", o.shift_s, "JSON with the Hermitian S (circle)");
    }
    {
        CLI::App* s = sub("kernel", "reproducing kernel coefficients", cmd_kernel);
        s->add_option("--route", o.route, "node|series|formal")->default_val("series");
        s->add_option("--k", o.k, "component")->default_val(1);
    }
    sub("model", "backward-shift model realization of a series (a node is expanded to --degree)", cmd_model);
    sub("schur-sample", "sample the norm on strict contractions", cmd_schur);
    sub("hankel", "Hankel matrix of a series", cmd_hankel)->add_option("--k", o.k, "component")->default_val(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    json report;
    report["command"] = chosen->get_name();
    json inputs = inputs_of(app);
    inputs.update(inputs_of(*chosen));
    report["inputs"] = inputs;
    report["seed"] = o.seed;
    int code = 0;
    try {
        Report r = handlers.at(chosen->get_name())(o);
        report["result"] = r.result;
        report["residuals"] = io::to_json(r.residuals);
        code = r.exit;
    } catch (const UsageError& e) {
        report["error"] = e.what();
        code = 2;
    } catch (const NumericalError& e) {
        report["error"] = e.what();
        code = 3;
    } catch (const PropertyFailure& e) {
        report["error"] = e.what();
        code = 1;
    } catch (const json::exception& e) {
        report["error"] = std::string("malformed input: ") + e.what();
        code = 2;
    }
    if (report.contains("error")) {
        report["result"] = json::object();
        report["residuals"] = json::object();
        std::cerr << "ncfps: " << report["error"].get<std::string>() << "\n";
    }
    const std::string text = io::dump(report);
    try {
        if (o.output.empty())
            std::cout << text;
        else
            io::write_file(o.output, text);
    } catch (const UsageError& e) {
        std::cerr << "ncfps: " << e.what() << "\n";
        return 2;
    }
    return code;
}
