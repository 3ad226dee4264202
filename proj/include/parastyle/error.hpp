#pragma once

#include <stdexcept>
#include <string>

namespace parastyle {

enum class ErrorKind {
  InvalidArgument,
  Precondition,
  Parse,
  Config,
  Transport,
  Timeout,
  NoSpeech,
  Unavailable,
  TooShort,
  NoLoudness,
  Undefined,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Config: return "config";
    case ErrorKind::Transport: return "transport";
    case ErrorKind::Timeout: return "timeout";
    case ErrorKind::NoSpeech: return "no_speech";
    case ErrorKind::Unavailable: return "unavailable";
    case ErrorKind::TooShort: return "too_short";
    case ErrorKind::NoLoudness: return "no_loudness";
    case ErrorKind::Undefined: return "undefined";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library. `kind` lets callers route errors
/// (retry on Transport, mark a judgment unavailable on Unavailable, ...)
/// without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A failure inside one stage of a multi-stage pipeline (cascade, simulator).
class StageError : public Error {
 public:
  StageError(std::string stage, ErrorKind kind, const std::string& what)
      : Error(kind, stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace parastyle
