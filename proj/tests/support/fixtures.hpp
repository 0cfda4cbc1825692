#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "opreg/cvxreg.hpp"
#include "opreg/opreg.hpp"

namespace fixtures {

struct OperatorCase {
  opreg::RegressionDataset data;
  double zeta = 0.0;
  double objective = 0.0;
};

struct ConvexCase {
  opreg::CvxRegDataset data;
  opreg::CurvatureBounds bounds;
  double objective = 0.0;
};

inline nlohmann::json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture file " + path);
  return nlohmann::json::parse(in);
}

/// Rows of `rows` become columns of the result.
inline opreg::Matrix columns(const nlohmann::json& rows) {
  const auto cols = static_cast<opreg::Index>(rows.size());
  const auto dim = static_cast<opreg::Index>(rows.at(0).size());
  opreg::Matrix m(dim, cols);
  for (opreg::Index c = 0; c < cols; ++c) {
    for (opreg::Index r = 0; r < dim; ++r) m(r, c) = rows[c][r].get<double>();
  }
  return m;
}

inline std::vector<OperatorCase> operator_cases(const std::string& path) {
  const auto doc = load(path);
  std::vector<OperatorCase> out;
  for (const auto& c : doc.at("operator")) {
    OperatorCase oc;
    oc.data.points = columns(c.at("points"));
    oc.data.evaluations = columns(c.at("evaluations"));
    oc.zeta = c.at("zeta").get<double>();
    oc.objective = c.at("objective").get<double>();
    out.push_back(std::move(oc));
  }
  return out;
}

inline std::vector<ConvexCase> convex_cases(const std::string& path) {
  const auto doc = load(path);
  std::vector<ConvexCase> out;
  for (const auto& c : doc.at("convex")) {
    ConvexCase cc;
    cc.data.points = columns(c.at("points"));
    cc.data.gradients = columns(c.at("gradients"));
    const auto& f = c.at("values");
    cc.data.values.resize(static_cast<opreg::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) cc.data.values[static_cast<opreg::Index>(i)] = f[i];
    cc.bounds = {c.at("mu").get<double>(), c.at("L").get<double>()};
    cc.objective = c.at("objective").get<double>();
    out.push_back(std::move(cc));
  }
  return out;
}

inline std::string regression_file() {
  return std::string(OPREG_FIXTURE_DIR) + "/regression_fixtures.json";
}

}  // namespace fixtures
