#pragma once

// Helpers for the comma-separated line formats shared by traces, frame logs
// and event logs.

#include <charconv>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "lime/errors.hpp"

namespace lime::detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

inline bool parse_double(std::string_view text, double& out) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

inline double parse_double_or_throw(std::string_view text, std::size_t line_no) {
    double value = 0.0;
    if (!parse_double(text, value)) {
        throw ParseError("line " + std::to_string(line_no) + ": not a number: '" + std::string(text) + "'");
    }
    return value;
}

/// Calls `fn(fields, line_no)` for each data line. Blank lines and `#`
/// comments are skipped, as is a first non-comment line whose leading field
/// is not numeric (a header row).
template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    bool seen_first = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        auto fields = split_fields(view);
        if (!seen_first) {
            seen_first = true;
            double ignored = 0.0;
            if (!parse_double(fields.front(), ignored)) continue;
        }
        fn(fields, line_no);
    }
}

}  // namespace lime::detail
