#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vithsd/core/types.hpp"

namespace vithsd {

/// Names the CSV columns that hold each field. Header matching is exact
/// after ASCII lowercasing and trimming.
struct ColumnMap {
    std::string text_column;
    std::optional<std::string> id_column;
    std::array<std::string, kNumTargets> label_columns;
};

/// Guesses a column map from a header row: the text column is the first of
/// {text, content, comment, free_text, comments}; the id column the first of
/// {id, comment_id}; label columns are the headers that resolve to a target
/// through the alias table. Throws SchemaError if anything is missing.
ColumnMap detect_columns(const std::vector<std::string>& header);

/// Loads a labeled CSV split. Rows without an id column get their 0-based
/// data-row index as id. Errors: IoError, SchemaError, InvalidLevel (naming
/// the row), InvalidComment.
std::vector<LabeledComment> load_dataset(const std::filesystem::path& path,
                                         const std::optional<ColumnMap>& columns = std::nullopt);

/// Writes `id,text,<five canonical slugs>`; load_dataset reads it back.
void write_dataset(const std::filesystem::path& path, const std::vector<LabeledComment>& rows);

}  // namespace vithsd
