#pragma once

#include <string>

#include "fnd/pipeline.hpp"

namespace fnd {

// Versioned JSON model envelope:
//   {"format_version": 1, "model_kind": ..., "feature_mode": ...,
//    "feature_space": {...}, "parameters": {...}}
// Doubles survive a save/load round trip bit-exactly (shortest round-trip
// decimal encoding). Stacked models embed their base envelopes.
constexpr int kModelFormatVersion = 1;

std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& json_text);

void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace fnd
