#include "marginopt/json_io.hpp"

#include <vector>

#include "marginopt/error.hpp"

namespace marginopt {
namespace {

Polynomial polynomial_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "coefficient list must be a non-empty array");
  }
  return Polynomial(j.get<std::vector<double>>());
}

}  // namespace

nlohmann::json to_json(const TransferFunction& tf) {
  return {{"num", tf.num().coeffs()}, {"den", tf.den().coeffs()}};
}

TransferFunction transfer_function_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("num") || !j.contains("den")) {
    throw Error(ErrorCode::kInvalidArgument,
                "transfer function needs \"num\" and \"den\"");
  }
  return TransferFunction(polynomial_from_json(j.at("num")),
                          polynomial_from_json(j.at("den")));
}

nlohmann::json to_json(const TransferMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

TransferMatrix transfer_matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "transfer matrix must be a non-empty nested array");
  }
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  std::vector<TransferFunction> entries;
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw Error(ErrorCode::kInvalidArgument, "ragged transfer matrix");
    }
    for (const auto& e : row) entries.push_back(transfer_function_from_json(e));
  }
  return TransferMatrix(rows, cols, std::move(entries));
}

nlohmann::json to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<size_t>(m.cols()));
    for (Eigen::Index k = 0; k < m.cols(); ++k) row[static_cast<size_t>(k)] = m(i, k);
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "matrix must be a nested array");
  }
  if (j.empty()) return Eigen::MatrixXd(0, 0);
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::kInvalidArgument, "ragged matrix");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = row[static_cast<size_t>(k)].get<double>();
    }
  }
  return m;
}

nlohmann::json to_json(const StateSpace& ss) {
  return {{"A", to_json(ss.A)},
          {"B", to_json(ss.B)},
          {"C", to_json(ss.C)},
          {"D", to_json(ss.D)}};
}

nlohmann::json to_json(Complex c) { return {c.real(), c.imag()}; }

Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw Error(ErrorCode::kInvalidArgument,
              "complex value must be a number or [re, im]");
}

}  // namespace marginopt
