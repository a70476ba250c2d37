#pragma once
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace jointcq::jsonl {

using json = nlohmann::json;

// Parses with an error message that names the source on failure.
json parse_json(const std::string& text, const std::string& context);

// One JSON object per non-blank line.
std::vector<json> read_file(const std::string& path);

// Writes rows as compact JSON lines, newline-terminated, atomically.
void write_file(const std::string& path, const std::vector<json>& rows);

std::string to_lines(const std::vector<json>& rows);

} // namespace jointcq::jsonl
