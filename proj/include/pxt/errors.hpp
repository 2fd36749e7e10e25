#pragma once

#include <stdexcept>
#include <string>

namespace pxt {

// Error taxonomy mirrors the CLI exit codes: data (1), numeric (2), config (3).
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public Error {
  public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

class NumericError : public Error {
  public:
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace pxt
