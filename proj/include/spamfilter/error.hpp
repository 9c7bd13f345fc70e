#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spamfilter {

/// Base class for every error raised by the library. `kind()` is a short
/// machine-readable category used by the command-line tool.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
  virtual const char* kind() const noexcept { return "error"; }
};

class LoadError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "load"; }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const char* kind() const noexcept override { return "parse"; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }
  const char* kind() const noexcept override { return "config"; }

 private:
  std::string key_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "argument"; }
};

class TrainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "train"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

}  // namespace spamfilter
