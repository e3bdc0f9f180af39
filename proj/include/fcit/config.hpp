#pragma once

#include <filesystem>
#include <string>

#include "fcit/pipelines.hpp"

namespace fcit {

// Applies one "key = value" entry onto a config. Unknown keys and
// out-of-range values raise UsageError.
void apply_config_entry(TaskConfig& config, const std::string& key, const std::string& value);

// Line-oriented "key = value" file; '#' starts a comment. Values land on
// top of the given defaults.
void load_config_file(TaskConfig& config, const std::filesystem::path& path);

std::set<std::string> parse_taps(const std::string& csv);

}  // namespace fcit
