#pragma once

#include "usdr/models.hpp"

#include <json.hpp>

namespace usdr {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const FittedModel& model);
FittedModel fitted_model_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ModelConfig& config);
// `input_dim` resolves "hidden" width lists and named layer templates.
ModelConfig model_config_from_json(const nlohmann::json& doc, Eigen::Index input_dim = 0);

const char* reduction_name(ResidualReduction r) noexcept;
ResidualReduction parse_reduction(const std::string& name);

}  // namespace usdr
