#pragma once

#include <stdexcept>
#include <string>

namespace regrid_uq {

// Exit-code taxonomy: 0 success, 2 validation, 3 numeric, 4 I/O.
enum class ExitCode : int { ok = 0, validation = 2, numeric = 3, io = 4 };

// Bad inputs, malformed configs, contract violations detected before any
// heavy computation. Maps to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Factorization failures, ill-conditioned covariances, singular designs.
// Maps to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// File system and parse failures. Maps to exit code 4.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace regrid_uq
