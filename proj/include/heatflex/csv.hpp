#pragma once

// Minimal RFC 4180 style reader/writer plus locale-independent number I/O.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace heatflex::csv {

using Row = std::vector<std::string>;

class Reader {
public:
    explicit Reader(std::istream& in, char delimiter = ',');

    /// Reads the next record. Returns false at end of input. Blank lines are skipped.
    bool next(Row& row);

    /// Physical line number of the last record returned (1-based).
    std::size_t line() const noexcept { return line_; }

private:
    std::istream& in_;
    char delimiter_;
    std::size_t line_ = 0;
    std::size_t next_line_ = 1;
};

void write_row(std::ostream& out, const Row& row, char delimiter = ',');

/// Header-name to column-index lookup.
class Header {
public:
    explicit Header(Row names);

    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t size() const noexcept { return names_.size(); }
    const Row& names() const noexcept { return names_; }

private:
    Row names_;
};

std::optional<double> parse_double(std::string_view text);
std::optional<std::uint64_t> parse_uint(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

/// Shortest representation that round-trips exactly.
std::string format_double(double value);

std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);

}  // namespace heatflex::csv
