#include "sconv/serialize.hpp"

#include <cmath>

#include "sconv/errors.hpp"

namespace sconv {

Json matrix_to_json(const Matrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  }
  return Json{{"dim", m.rows()}, {"re", re}, {"im", im}};
}

Matrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_object()) throw ValidationError("matrix must be an object {dim, re, im}", field);
  const int dim = json_int(j, "dim", field);
  if (dim <= 0) throw ValidationError("matrix dim must be positive", field + ".dim");
  const auto n = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
  const auto re = json_numbers(j, "re", field);
  if (re.size() != n) throw ValidationError("expected dim*dim real parts", field + ".re");
  std::vector<double> im(n, 0.0);
  if (j.contains("im")) {
    im = json_numbers(j, "im", field);
    if (im.size() != n) throw ValidationError("expected dim*dim imaginary parts", field + ".im");
  }
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      const auto k = static_cast<std::size_t>(r * dim + c);
      m(r, c) = Complex(re[k], im[k]);
    }
  return m;
}

Json operator_to_json(const HermitianOperator& op) { return matrix_to_json(op.matrix()); }

HermitianOperator operator_from_json(const Json& j, const std::string& field) {
  const Matrix m = matrix_from_json(j, field);
  try {
    return HermitianOperator(m);
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), field);
  }
}

const Json& json_member(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError("missing field '" + key + "'", path.empty() ? key : path + "." + key);
  }
  return j.at(key);
}

double json_number(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = json_member(j, key, path);
  if (!v.is_number()) throw ValidationError("expected a number", path.empty() ? key : path + "." + key);
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError("expected a finite number", path + "." + key);
  return x;
}

int json_int(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = json_member(j, key, path);
  if (!v.is_number_integer()) {
    throw ValidationError("expected an integer", path.empty() ? key : path + "." + key);
  }
  return v.get<int>();
}

std::vector<double> json_numbers(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = json_member(j, key, path);
  const std::string where = path.empty() ? key : path + "." + key;
  if (!v.is_array()) throw ValidationError("expected an array of numbers", where);
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw ValidationError("expected a number", where + "[" + std::to_string(i) + "]");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

}  // namespace sconv
