#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vithsd::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
/// A leading UTF-8 byte-order mark is skipped.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Next record, or nullopt at end of input. Throws ParseError on an
    /// unterminated quoted field.
    std::optional<Row> next();

    /// 1-based physical line on which the last returned record started.
    std::size_t line() const noexcept { return record_line_; }

private:
    std::istream& in_;
    std::size_t current_line_ = 1;
    std::size_t record_line_ = 0;
    bool bom_checked_ = false;
};

std::string escape_field(std::string_view field);
std::string format_row(const Row& row);

}  // namespace vithsd::csv
