#include "vithsd/core/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include "vithsd/core/csv.hpp"
#include "vithsd/core/errors.hpp"

namespace vithsd {

namespace {

std::string normalize_header(std::string_view h) {
    while (!h.empty() && std::isspace(static_cast<unsigned char>(h.front()))) h.remove_prefix(1);
    while (!h.empty() && std::isspace(static_cast<unsigned char>(h.back()))) h.remove_suffix(1);
    std::string out(h);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header, const std::string& name) {
    const std::string key = normalize_header(name);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (normalize_header(header[i]) == key) return i;
    }
    return std::nullopt;
}

int parse_code(std::string_view field, std::size_t row, std::size_t line, std::string_view column) {
    std::string_view s = field;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.size() > 2 && s.substr(s.size() - 2) == ".0") s.remove_suffix(2);
    int value = -1;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || value < 0 || value > 3) {
        raise(ErrorCode::InvalidLevel, "row " + std::to_string(row) + " (line " + std::to_string(line) + "), column '" + std::string(column) +
                                           "': label value '" + std::string(field) + "' is outside {0,1,2,3}");
    }
    return value;
}

}  // namespace

ColumnMap detect_columns(const std::vector<std::string>& header) {
    ColumnMap map;
    static const std::vector<std::string> text_names = {"text", "content", "comment", "free_text", "comments"};
    for (const auto& name : text_names) {
        if (auto idx = find_column(header, name)) {
            map.text_column = header[*idx];
            break;
        }
    }
    if (map.text_column.empty()) raise(ErrorCode::SchemaError, "no text column found in header");
    for (const std::string name : {"id", "comment_id"}) {
        if (auto idx = find_column(header, name)) {
            map.id_column = header[*idx];
            break;
        }
    }
    std::array<bool, kNumTargets> found{};
    for (const auto& h : header) {
        if (auto t = resolve_target(normalize_header(h)); t && !found[index_of(*t)]) {
            found[index_of(*t)] = true;
            map.label_columns[index_of(*t)] = h;
        }
    }
    for (Target t : kAllTargets) {
        if (!found[index_of(t)]) {
            raise(ErrorCode::SchemaError, "no label column for target '" + std::string(slug(t)) + "'");
        }
    }
    return map;
}

std::vector<LabeledComment> load_dataset(const std::filesystem::path& path,
                                         const std::optional<ColumnMap>& columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    csv::Reader reader(in);
    const auto header = reader.next();
    if (!header) raise(ErrorCode::SchemaError, "'" + path.string() + "' has no header row");

    const ColumnMap map = columns ? *columns : detect_columns(*header);
    auto require = [&](const std::string& name) {
        auto idx = find_column(*header, name);
        if (!idx) raise(ErrorCode::SchemaError, "missing column '" + name + "' in '" + path.string() + "'");
        return *idx;
    };
    const std::size_t text_idx = require(map.text_column);
    std::optional<std::size_t> id_idx;
    if (map.id_column) id_idx = require(*map.id_column);
    std::array<std::size_t, kNumTargets> label_idx{};
    for (std::size_t t = 0; t < kNumTargets; ++t) label_idx[t] = require(map.label_columns[t]);

    std::vector<LabeledComment> rows;
    std::size_t row_index = 0;
    while (auto row = reader.next()) {
        if (row->size() == 1 && row->front().empty()) continue;  // blank line
        if (row->size() < header->size()) {
            raise(ErrorCode::SchemaError, "row " + std::to_string(row_index) + " (line " +
                                              std::to_string(reader.line()) + ") has " +
                                              std::to_string(row->size()) + " fields, expected " +
                                              std::to_string(header->size()));
        }
        LabeledComment lc;
        lc.comment.id = id_idx ? (*row)[*id_idx] : std::to_string(row_index);
        lc.comment.text = (*row)[text_idx];
        std::array<int, kNumTargets> codes{};
        for (std::size_t t = 0; t < kNumTargets; ++t) {
            codes[t] = parse_code((*row)[label_idx[t]], row_index, reader.line(), map.label_columns[t]);
        }
        lc.labels = LabelVector::from_codes(codes);
        validate_comment(lc.comment);
        rows.push_back(std::move(lc));
        ++row_index;
    }
    return rows;
}

void write_dataset(const std::filesystem::path& path, const std::vector<LabeledComment>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    csv::Row header = {"id", "text"};
    for (Target t : kAllTargets) header.emplace_back(slug(t));
    out << csv::format_row(header) << '\n';
    for (const auto& r : rows) {
        csv::Row fields = {r.comment.id, r.comment.text};
        for (int c : r.labels.codes()) fields.push_back(std::to_string(c));
        out << csv::format_row(fields) << '\n';
    }
    if (!out) raise(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace vithsd
