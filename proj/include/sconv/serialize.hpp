#pragma once

#include <string>

#include <json.hpp>

#include "sconv/operator.hpp"

namespace sconv {

using Json = nlohmann::json;

// {dim, re, im}, row-major. "im" may be omitted for real matrices.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& field = "matrix");

Json operator_to_json(const HermitianOperator& op);
HermitianOperator operator_from_json(const Json& j, const std::string& field = "matrix");

// Typed field access that reports the offending path on failure.
double json_number(const Json& j, const std::string& key, const std::string& path);
int json_int(const Json& j, const std::string& key, const std::string& path);
const Json& json_member(const Json& j, const std::string& key, const std::string& path);
std::vector<double> json_numbers(const Json& j, const std::string& key, const std::string& path);

}  // namespace sconv
