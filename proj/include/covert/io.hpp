// SPDX-License-Identifier: Apache-2.0
//
// JSON ingestion and emission for scenarios and array geometries.

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "covert/channel.hpp"

namespace covert {

using Json = nlohmann::ordered_json;

/// Parses a JSON file; ErrorCode::io on read or syntax failures.
Json read_json_file(const std::filesystem::path& path);

/// Keys: n_a, n_b, n_w, sigma_b2, sigma_w2, power, and h_b / h_w as
/// row-major arrays of [re, im] pairs.
MimoScenario scenario_from_json(const Json& doc);
Json scenario_to_json(const MimoScenario& scenario);

/// Keys: num_antennas with either antenna_separation or array_length.
ArrayGeometry geometry_from_json(const Json& doc);

/// Writes `contents` next to `path` and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

}  // namespace covert
