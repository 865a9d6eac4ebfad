#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "injectcheck/certificate.hpp"
#include "injectcheck/conv.hpp"
#include "injectcheck/network.hpp"
#include "injectcheck/stability.hpp"

namespace injectcheck {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

nlohmann::json certificate_to_json(const InjectivityCertificate& cert);
nlohmann::json stability_to_json(const StabilityReport& report);

// Layers: {"weight": [[...]] | "file.csv", "bias": [...], "activation":
// "relu" | "identity" | "leaky_relu", "alpha": slope}. CSV references
// resolve relative to base_dir.
nlohmann::json layer_to_json(const DenseLayer& layer);
DenseLayer layer_from_json(const nlohmann::json& j, const std::string& base_dir = ".");

// Networks: {"layers": [...], "final_linear": [[...]]} or a bare layer list.
nlohmann::json network_to_json(const ReluNetwork& net);
ReluNetwork network_from_json(const nlohmann::json& j, const std::string& base_dir = ".");

// Kernel banks: {"kernels": [{"shape": [...], "values": [...]}],
// "signal_shape": [...], "boundary": "zero_padded" | "periodic"}.
nlohmann::json conv_spec_to_json(const ConvSpec& spec);
ConvSpec conv_spec_from_json(const nlohmann::json& j);

}  // namespace injectcheck
