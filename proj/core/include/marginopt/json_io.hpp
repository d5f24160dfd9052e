#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "marginopt/state_space.hpp"
#include "marginopt/transfer_matrix.hpp"

namespace marginopt {

// {"num": [...], "den": [...]}, ascending coefficients.
nlohmann::json to_json(const TransferFunction& tf);
TransferFunction transfer_function_from_json(const nlohmann::json& j);

// Nested row-major arrays of transfer-function objects.
nlohmann::json to_json(const TransferMatrix& m);
TransferMatrix transfer_matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StateSpace& ss);

// Complex numbers travel as [re, im]; a bare number is read as real.
nlohmann::json to_json(Complex c);
Complex complex_from_json(const nlohmann::json& j);

}  // namespace marginopt
