#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhgs/field.hpp"
#include "bhgs/groundstate.hpp"

namespace bhgs {

/// Field snapshot: one line of JSON {"d", "n", "half_width", "count"} terminated by '\n',
/// then count little-endian IEEE-754 doubles in row-major order.
void write_field(const std::filesystem::path& path, const Field& u);
/// Throws std::runtime_error on malformed files.
Field read_field(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Columns iter, energy, grad_residual, step_size.
void write_iteration_log(const std::filesystem::path& path, const std::vector<IterationRecord>& log);

/// Simple CSV writer: header plus rows of numbers or strings already formatted.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace bhgs
