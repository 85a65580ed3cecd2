#ifndef CHIRPLET_ERRORS_HPP
#define CHIRPLET_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chirplet {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller handed us arguments that violate a precondition (length mismatch,
// out-of-range index, non-finite samples, signal too short for a dictionary).
struct InvalidInputError : Error {
    explicit InvalidInputError(const std::string& msg) : Error(msg) {}
};

// The computation itself is undefined for this input (zero-energy signal,
// time spread at or below the sampling floor, degenerate residual,
// undefined robustness index or rank statistic).
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// File system / stream failure.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Malformed file contents; carries the byte offset where parsing gave up.
struct ParseError : IoError {
    ParseError(const std::string& msg, std::size_t offset)
        : IoError(msg + " (byte offset " + std::to_string(offset) + ")"),
          byte_offset(offset) {}
    std::size_t byte_offset;
};

// Recognized file, unsupported or inconsistent contents (encoding we do not
// handle, format version mismatch, violated header invariants).
struct FormatError : IoError {
    explicit FormatError(const std::string& msg) : IoError(msg) {}
};

}  // namespace chirplet

#endif  // CHIRPLET_ERRORS_HPP
