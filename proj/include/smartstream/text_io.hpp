#pragma once

// Line-oriented helpers shared by the histogram, trace and config loaders.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"

namespace smartstream::text {

inline std::string_view trim(std::string_view s) {
    auto const ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

// Drops a trailing `#` comment and surrounding whitespace.
inline std::string_view strip_comment(std::string_view s) {
    if (auto pos = s.find('#'); pos != std::string_view::npos) s = s.substr(0, pos);
    return trim(s);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> to_double(std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
    std::int64_t v = 0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

struct numbered_line {
    std::size_t number;
    std::string text; // comment-stripped, trimmed, non-empty
};

// Reads every non-blank, non-comment line of a file.
inline std::vector<numbered_line> read_lines(std::string const& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open '" + path + "'");
    std::vector<numbered_line> out;
    std::string raw;
    std::size_t n = 0;
    while (std::getline(in, raw)) {
        ++n;
        auto body = strip_comment(raw);
        if (!body.empty()) out.push_back({n, std::string(body)});
    }
    return out;
}

} // namespace smartstream::text
