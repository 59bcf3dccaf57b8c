#pragma once

#include "salescast/model.hpp"

#include <string>
#include <string_view>

namespace salescast {

/// Model JSON with full round-trip number precision. Deserializing the
/// output reproduces predictions bit-exactly.
std::string model_to_json(const AdditiveModel& model);
AdditiveModel model_from_json(std::string_view text);

void save_model(const AdditiveModel& model, const std::string& path);
AdditiveModel load_model(const std::string& path);

} // namespace salescast
