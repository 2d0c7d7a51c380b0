#pragma once

#include <stdexcept>
#include <string>

namespace fpsynth {

// Error categories surfaced through the C API and the CLI. Names are part of
// the user-facing contract (the CLI prints them verbatim on failure).
enum class Errc {
  IoFailure = 1,
  MalformedHeader,
  UnsupportedFormat,
  DimensionMismatch,
  InvalidSchedule,
  InvalidArchitecture,
  NonFiniteLoss,
  EmptyFingerprint,
  FlatImage,
  InsufficientSamples,
  NotPsd,
  ParseError,
  UnknownKey,
  GroupTooSmall,
  InvalidArgument,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& detail) { throw Error(code, detail); }

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::IoFailure: return "IoFailure";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidSchedule: return "InvalidSchedule";
    case Errc::InvalidArchitecture: return "InvalidArchitecture";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::EmptyFingerprint: return "EmptyFingerprint";
    case Errc::FlatImage: return "FlatImage";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::NotPsd: return "NotPsd";
    case Errc::ParseError: return "ParseError";
    case Errc::UnknownKey: return "UnknownKey";
    case Errc::GroupTooSmall: return "GroupTooSmall";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace fpsynth
