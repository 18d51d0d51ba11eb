#include "mcss/json_io.hpp"

#include <fstream>

#include <json.hpp>

namespace mcss {

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw InvalidMatrix(std::string(what) + ": expected a nonempty array of rows");
  }
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.at(0).size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto& row = j.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw InvalidMatrix(std::string(what) + ": ragged rows");
    }
    for (int k = 0; k < cols; ++k) m(i, k) = row.at(k).get<double>();
  }
  return m;
}

}  // namespace

nlohmann::json pool_to_json(const SensorPool& pool) {
  nlohmann::json sensors = nlohmann::json::array();
  for (const Sensor& s : pool.sensors) {
    nlohmann::json c = nlohmann::json::array();
    for (int k = 0; k < s.c.size(); ++k) c.push_back(s.c(k));
    sensors.push_back({{"c", std::move(c)}, {"sigma2", s.sigma2}});
  }
  return {{"d", pool.d}, {"sensors", std::move(sensors)}};
}

SensorPool pool_from_json(const nlohmann::json& j) {
  SensorPool pool;
  pool.d = j.at("d").get<int>();
  for (const auto& js : j.at("sensors")) {
    Sensor s;
    const auto& c = js.at("c");
    s.c = Vector(c.size());
    for (int k = 0; k < static_cast<int>(c.size()); ++k) s.c(k) = c.at(k).get<double>();
    s.sigma2 = js.at("sigma2").get<double>();
    pool.sensors.push_back(std::move(s));
  }
  validate(pool);
  return pool;
}

nlohmann::json system_to_json(const LtiSystem& sys) {
  return {{"A", matrix_to_json(sys.A)}, {"Q", matrix_to_json(sys.Q)}};
}

LtiSystem system_from_json(const nlohmann::json& j) {
  LtiSystem sys{matrix_from_json(j.at("A"), "system A"),
                matrix_from_json(j.at("Q"), "system Q")};
  validate(sys);
  return sys;
}

void save_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open for reading: " + path);
  return nlohmann::json::parse(in);
}

}  // namespace mcss
