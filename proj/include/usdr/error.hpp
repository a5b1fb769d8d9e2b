#pragma once

#include <stdexcept>
#include <string>

namespace usdr {

// Broad failure class; maps one-to-one onto CLI exit codes.
enum class ErrorKind {
  Config = 1,
  Data = 2,
  Numeric = 3,
};

enum class Errc {
  InvalidArgument,
  Io,
  Parse,
  RaggedRow,
  InvalidLabel,
  InvalidHealth,
  NonFinite,
  DimensionMismatch,
  IndexOutOfRange,
  NonDivisible,
  DegeneratePlan,
  WindowTooLarge,
  NoCleanSubset,
  NoCleanSpec,
  NoPositives,
  NoNegatives,
  NoGroundTruth,
};

ErrorKind kind_of(Errc code) noexcept;
const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }
  int exit_code() const noexcept { return static_cast<int>(kind()); }

 private:
  Errc code_;
};

inline ErrorKind kind_of(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::Io:
    case Errc::NonDivisible:
    case Errc::DegeneratePlan:
    case Errc::WindowTooLarge:
    case Errc::NoCleanSpec:
      return ErrorKind::Config;
    case Errc::NonFinite:
      return ErrorKind::Numeric;
    default:
      return ErrorKind::Data;
  }
}

inline const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    case Errc::Parse: return "Parse";
    case Errc::RaggedRow: return "RaggedRow";
    case Errc::InvalidLabel: return "InvalidLabel";
    case Errc::InvalidHealth: return "InvalidHealth";
    case Errc::NonFinite: return "NonFinite";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NonDivisible: return "NonDivisible";
    case Errc::DegeneratePlan: return "DegeneratePlan";
    case Errc::WindowTooLarge: return "WindowTooLarge";
    case Errc::NoCleanSubset: return "NoCleanSubset";
    case Errc::NoCleanSpec: return "NoCleanSpec";
    case Errc::NoPositives: return "NoPositives";
    case Errc::NoNegatives: return "NoNegatives";
    case Errc::NoGroundTruth: return "NoGroundTruth";
  }
  return "Unknown";
}

}  // namespace usdr
