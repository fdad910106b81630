// SPDX-License-Identifier: Apache-2.0

#include "covert/io.hpp"

#include <fstream>

namespace covert {

namespace {

template <class T>
T field(const Json& doc, const char* key) {
  require(doc.contains(key), ErrorCode::invalid_input, std::string("missing key '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_input, std::string("bad value for '") + key + "': " + e.what());
  }
}

CMatrix matrix_field(const Json& doc, const char* key, Eigen::Index rows, Eigen::Index cols) {
  require(doc.contains(key) && doc.at(key).is_array(), ErrorCode::invalid_input,
          std::string("missing array '") + key + "'");
  const Json& flat = doc.at(key);
  require(flat.size() == static_cast<std::size_t>(rows * cols), ErrorCode::invalid_input,
          std::string("'") + key + "' has the wrong number of entries");
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& z = flat.at(static_cast<std::size_t>(r * cols + c));
      require(z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number(),
              ErrorCode::invalid_input, std::string("'") + key + "' entries must be [re, im]");
      m(r, c) = cdouble(z[0].get<double>(), z[1].get<double>());
    }
  }
  return m;
}

Json matrix_to_json(const CMatrix& m) {
  Json flat = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back({m(r, c).real(), m(r, c).imag()});
  return flat;
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::io, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

MimoScenario scenario_from_json(const Json& doc) {
  const auto n_a = field<std::int64_t>(doc, "n_a");
  const auto n_b = field<std::int64_t>(doc, "n_b");
  const auto n_w = field<std::int64_t>(doc, "n_w");
  require(n_a >= 1 && n_b >= 1 && n_w >= 1, ErrorCode::invalid_input,
          "antenna counts must be positive");
  MimoScenario s;
  s.h_b = matrix_field(doc, "h_b", n_b, n_a);
  s.h_w = matrix_field(doc, "h_w", n_w, n_a);
  s.sigma_b2 = field<double>(doc, "sigma_b2");
  s.sigma_w2 = field<double>(doc, "sigma_w2");
  s.power_budget = field<double>(doc, "power");
  s.validate();
  return s;
}

Json scenario_to_json(const MimoScenario& scenario) {
  Json doc;
  doc["n_a"] = scenario.n_a();
  doc["n_b"] = scenario.n_b();
  doc["n_w"] = scenario.n_w();
  doc["sigma_b2"] = scenario.sigma_b2;
  doc["sigma_w2"] = scenario.sigma_w2;
  doc["power"] = scenario.power_budget;
  doc["h_b"] = matrix_to_json(scenario.h_b);
  doc["h_w"] = matrix_to_json(scenario.h_w);
  return doc;
}

ArrayGeometry geometry_from_json(const Json& doc) {
  const auto n = field<std::int64_t>(doc, "num_antennas");
  if (doc.contains("array_length")) return ArrayGeometry::with_length(n, field<double>(doc, "array_length"));
  return ArrayGeometry(n, field<double>(doc, "antenna_separation"));
}

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::io, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    require(out.good(), ErrorCode::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorCode::io, "cannot move output into " + path.string());
  }
}

}  // namespace covert
