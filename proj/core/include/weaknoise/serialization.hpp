#pragma once

// JSON forms shared by the CLI and config files. Matrices are row-major
// arrays of rows, each entry a [re, im] pair.

#include <json.hpp>

#include "weaknoise/hilbert.hpp"

namespace weaknoise {

nlohmann::json matrix_to_json(const hilbert::Matrix& m);
hilbert::Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json operator_to_json(const hilbert::Operator& op);
hilbert::Operator operator_from_json(const nlohmann::json& j);

}  // namespace weaknoise
