#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "ncfps/factorization.hpp"
#include "ncfps/kernels.hpp"

namespace ncfps::io {

using json = nlohmann::json;

// Matrices are row-major nested arrays of [re, im] pairs. Plain numbers are accepted on input.
// Empty arrays take the shape hint when one is given.
json to_json(const Mat& m);
Mat mat_from_json(const json& j, int rows_hint = -1, int cols_hint = -1);
json to_json(cplx z);
cplx cplx_from_json(const json& j);

json to_json(const Node& a, const std::optional<Mat>& J = std::nullopt);
Node node_from_json(const json& j);
// "J" if present, otherwise the identity of size q.
Mat signature_from_json(const json& j, int q);

json to_json(const Fps& f);
Fps fps_from_json(const json& j);

json to_json(const SubspaceFamily& M);
SubspaceFamily family_from_json(const json& j, const Node& a);

json to_json(const KernelTable& K);
json to_json(const StructuredHermitian& H);
json to_json(const Residuals& r);

// Keys sorted, floats with 17 significant digits, two-space indentation.
std::string dump(const json& j);

json read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace ncfps::io
