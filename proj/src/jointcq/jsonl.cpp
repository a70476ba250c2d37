#include "jointcq/jsonl.hpp"

#include "jointcq/errors.hpp"
#include "jointcq/util.hpp"

namespace jointcq::jsonl {

json parse_json(const std::string& text, const std::string& context) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw IoError("invalid JSON in " + context);
    }
    return j;
}

std::vector<json> read_file(const std::string& path) {
    std::vector<json> rows;
    std::string content = util::read_file(path);
    std::size_t line_no = 0;
    for (const std::string& line : util::split_lines(content)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        rows.push_back(parse_json(line, path + ":" + std::to_string(line_no)));
    }
    return rows;
}

std::string to_lines(const std::vector<json>& rows) {
    std::string out;
    for (const json& row : rows) {
        out += row.dump();
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::vector<json>& rows) {
    util::atomic_write_file(path, to_lines(rows));
}

} // namespace jointcq::jsonl
