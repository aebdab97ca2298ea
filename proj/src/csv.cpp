#include "heatflex/csv.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace heatflex::csv {

Reader::Reader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

bool Reader::next(Row& row) {
    row.clear();
    std::string line;
    while (true) {
        if (!std::getline(in_, line)) {
            return false;
        }
        line_ = next_line_++;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_ == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        if (!trim(line).empty()) {
            break;
        }
    }

    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
        if (i == line.size()) {
            if (!quoted) {
                break;
            }
            // Quoted field spanning a line break.
            std::string more;
            if (!std::getline(in_, more)) {
                throw std::runtime_error("line " + std::to_string(line_) +
                                         ": unterminated quoted field");
            }
            ++next_line_;
            if (!more.empty() && more.back() == '\r') {
                more.pop_back();
            }
            field.push_back('\n');
            line = std::move(more);
            i = 0;
            continue;
        }
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter_) {
            row.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
        ++i;
    }
    row.push_back(std::move(field));
    return true;
}

void write_row(std::ostream& out, const Row& row, char delimiter) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i != 0) {
            out << delimiter;
        }
        const std::string& f = row[i];
        const bool needs_quotes = f.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
                                  std::string::npos;
        if (!needs_quotes) {
            out << f;
            continue;
        }
        out << '"';
        for (char c : f) {
            if (c == '"') {
                out << '"';
            }
            out << c;
        }
        out << '"';
    }
    out << '\n';
}

Header::Header(Row names) : names_(std::move(names)) {
    for (auto& n : names_) {
        n = std::string(trim(n));
    }
}

std::optional<std::size_t> Header::find(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - names_.begin());
}

std::string_view trim(std::string_view text) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!text.empty() && is_space(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && is_space(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    return text;
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    if (text.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<std::uint64_t> parse_uint(std::string_view text) {
    text = trim(text);
    if (text.empty()) {
        return std::nullopt;
    }
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

std::optional<std::int64_t> parse_int(std::string_view text) {
    text = trim(text);
    if (text.empty()) {
        return std::nullopt;
    }
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

std::string format_double(double value) {
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0) {
        return "0";  // folds -0
    }
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf.data(), ptr);
}

}  // namespace heatflex::csv
