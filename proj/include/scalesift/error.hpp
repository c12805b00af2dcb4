#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scalesift {

// Base of every error the library throws. kind() is the machine-readable tag
// the CLI puts in its error JSON.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

// Invalid spec, table, or argument. The message names the offending field.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

// Unknown concept or location id.
class NotFoundError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "not_found"; }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const char* kind() const noexcept override { return "parse"; }

  // Same error with "<context>: " in front, e.g. the file name.
  ParseError with_context(const std::string& context) const {
    return ParseError(context + ": " + what(), line_, 0);
  }

 private:
  ParseError(const std::string& full, std::size_t line, int) : Error(full), line_(line) {}
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, long epoch) : Error(what), epoch_(epoch) {}
  long epoch() const noexcept { return epoch_; }
  const char* kind() const noexcept override { return "training"; }

 private:
  long epoch_;
};

// The LLM answered something other than "lr"/"hr" after normalization.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, std::string raw_response)
      : Error(what), raw_(std::move(raw_response)) {}
  const std::string& raw_response() const noexcept { return raw_; }
  const char* kind() const noexcept override { return "protocol"; }

 private:
  std::string raw_;
};

class TransportError : public Error {
 public:
  TransportError(const std::string& what, int retries) : Error(what), retries_(retries) {}
  int retries() const noexcept { return retries_; }
  const char* kind() const noexcept override { return "transport"; }

 private:
  int retries_;
};

// A metric whose value is undefined for every input (e.g. no concept has positives).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "undefined_metric"; }
};

// A stage artifact another stage depends on does not exist yet.
class MissingArtifactError : public Error {
 public:
  MissingArtifactError(const std::string& what, std::string path)
      : Error(what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }
  const char* kind() const noexcept override { return "missing_artifact"; }

 private:
  std::string path_;
};

}  // namespace scalesift
