#include "weaknoise/serialization.hpp"

#include "weaknoise/error.hpp"

namespace weaknoise {

nlohmann::json matrix_to_json(const hilbert::Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

hilbert::Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) fail("hilbert", "matrix", "expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  hilbert::Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) fail("hilbert", "matrix", "rows must form a square matrix");
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& entry = row[static_cast<std::size_t>(c)];
      if (entry.is_number()) {
        m(r, c) = entry.get<double>();
      } else if (entry.is_array() && entry.size() == 2) {
        m(r, c) = {entry[0].get<double>(), entry[1].get<double>()};
      } else {
        fail("hilbert", "matrix", "entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

nlohmann::json operator_to_json(const hilbert::Operator& op) { return matrix_to_json(op.matrix()); }

hilbert::Operator operator_from_json(const nlohmann::json& j) { return hilbert::Operator(matrix_from_json(j)); }

}  // namespace weaknoise
