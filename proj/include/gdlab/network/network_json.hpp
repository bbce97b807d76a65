#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>
#include "json.hpp"

#include "gdlab/network/network.hpp"

namespace gdlab::network {

/// Document form:
///   {"layers": [{"kind": "dense", "dims": [out, in], "activation": "relu"},
///               {"kind": "tied", "dims": [out, in], "activation": "identity",
///                "tie_pattern": [[0, 1], [1, 0]]},
///               {"kind": "attention", "dims": [model_dim, seq_len], "scale": 0.5}]}
/// "scale" is optional. Throws ValidationError on schema violations.
NetworkSpec network_from_json(const nlohmann::json& doc);
nlohmann::json network_to_json(const NetworkSpec& spec);
NetworkSpec load_network(const std::filesystem::path& path);

/// Parameter vectors are flat JSON arrays or a single CSV row of numbers.
Eigen::VectorXd params_from_json(const nlohmann::json& doc);
nlohmann::json params_to_json(const Eigen::VectorXd& theta);
Eigen::VectorXd params_from_csv_row(const std::string& row);

}  // namespace gdlab::network
