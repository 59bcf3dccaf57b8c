#pragma once

#include "salescast/fitting.hpp"
#include "salescast/pipeline.hpp"
#include "salescast/transfer.hpp"

#include <string>
#include <string_view>

namespace salescast {

// JSON round-trips for the config types; missing fields keep their defaults.

std::string to_json(const FitConfig& cfg);
FitConfig fit_config_from_json(std::string_view text);

std::string to_json(const AdaptConfig& cfg);
AdaptConfig adapt_config_from_json(std::string_view text);

std::string to_json(const CleaningConfig& cfg);
CleaningConfig cleaning_config_from_json(std::string_view text);

std::string to_json(const CleaningReport& report);

std::string to_json(const FitDiagnostics& diagnostics);

/// Reads a whole file; FormatError when unreadable.
std::string read_text_file(const std::string& path);

} // namespace salescast
