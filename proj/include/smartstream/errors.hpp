#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smartstream {

// Argument or data that violates a documented invariant.
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Text input that cannot be parsed. Carries the 1-based line number.
struct parse_error : std::runtime_error {
    parse_error(std::string const& source, std::size_t line, std::string const& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line(line) {}

    std::size_t line;
};

} // namespace smartstream
