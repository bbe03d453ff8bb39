#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace respdisp {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller's data (empty input, ragged matrix, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input file could not be parsed. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// HTTP or transport failure that survived all retries. `status()` is the
/// last HTTP status seen, or 0 for a transport-level failure.
class RequestError : public Error {
 public:
  RequestError(const std::string& what, int status, int attempts)
      : Error(what), status_(status), attempts_(attempts) {}
  int status() const noexcept { return status_; }
  int attempts() const noexcept { return attempts_; }

 private:
  int status_;
  int attempts_;
};

/// Provider answered 2xx but the body did not have the expected shape.
class DecodeError : public Error {
 public:
  using Error::Error;
};

/// Provider broke its own contract (e.g. embedding rows of unequal length).
class ProviderError : public Error {
 public:
  using Error::Error;
};

/// Every request of a collection campaign failed, or too few succeeded.
class CampaignError : public Error {
 public:
  using Error::Error;
};

/// The grading model replied with something other than Yes/No.
class JudgeProtocolError : public Error {
 public:
  explicit JudgeProtocolError(std::string raw_reply)
      : Error("judge reply is not Yes/No: \"" + raw_reply + "\""), raw_reply_(std::move(raw_reply)) {}
  const std::string& raw_reply() const noexcept { return raw_reply_; }

 private:
  std::string raw_reply_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace respdisp
