#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace kgm {

using Json = nlohmann::ordered_json;

/// Serializes with two-space indentation, keys in insertion order and every
/// floating-point number as %.17g. Non-finite numbers become null.
std::string dump_json(const Json &value);

/// Shortest round-trip decimal form.
std::string format_shortest(double x);

/// Header line plus one row per index of the (equal-length) columns.
std::string make_csv(const std::vector<std::string> &header,
                     const std::vector<std::vector<double>> &columns);

/// Writes text to path, creating parent directories. Throws Error on failure.
void write_file(const std::string &path, const std::string &text);

} // namespace kgm
