#pragma once

#include <stdexcept>
#include <string>

namespace cst {

// Exception families map one-to-one onto CLI exit codes (see cli.hpp).

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : IoError {
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : IoError(file + ":" + std::to_string(line) + ": " + what), line_number(line) {}
    std::size_t line_number;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cst
