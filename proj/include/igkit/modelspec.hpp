#pragma once

#include "igkit/markov.hpp"
#include "igkit/models.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace igkit {

/// A model (plus optional statistic / kernel blocks) loaded from a JSON
/// document. Unknown keys are rejected at every level.
struct ModelSpec {
    ParametrizedModel model;
    std::optional<Statistic> statistic;
    std::optional<MarkovKernel> kernel;
    std::uint64_t seed = 0;
    nlohmann::ordered_json resolved; ///< full normalized config, for reports
};

ModelSpec parse_model_spec(const nlohmann::ordered_json& doc);
ModelSpec load_model_spec(const std::string& path);

} // namespace igkit
