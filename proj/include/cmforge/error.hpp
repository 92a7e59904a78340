#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmforge {

/// Raised for bad user input: malformed files, invalid parameters, missing
/// resources. The CLI maps it to exit status 1.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input error tied to a line of a text file.
class parse_error : public input_error {
public:
    parse_error(std::size_t line, const std::string& what)
        : input_error("line " + std::to_string(line) + ": " + what), line_(line)
    {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace cmforge
