#pragma once

#include <stdexcept>
#include <string>

namespace bpm {

// Error taxonomy mirrors the CLI exit codes: config -> 2, capacity/certification -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Exact arithmetic or enumeration requested beyond the configured cap.
struct CapacityError : Error {
  using Error::Error;
};

// A truncated object cannot certify the requested radius. Carries a suggested
// extension of the exploration window so the caller can resume.
struct CertificationError : Error {
  CertificationError(const std::string& what, long suggested)
      : Error(what), suggested_extension(suggested) {}
  long suggested_extension = 0;
};

struct StructuralError : Error {
  using Error::Error;
};

// Operation requested in the wrong weight regime (e.g. star map when kappa = 1).
struct PhaseError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

}  // namespace bpm
