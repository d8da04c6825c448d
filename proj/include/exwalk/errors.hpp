#pragma once

#include <stdexcept>
#include <string>

namespace exwalk {

// Base for every failure raised by the library. The CLI maps UsageError to
// exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

#define EXWALK_DEFINE_ERROR(Name, tag)                 \
  class Name : public Error {                          \
   public:                                             \
    using Error::Error;                                \
    const char* kind() const noexcept override {       \
      return tag;                                      \
    }                                                  \
  };

EXWALK_DEFINE_ERROR(UsageError, "usage")
EXWALK_DEFINE_ERROR(CoordinateOverflow, "coordinate-overflow")
EXWALK_DEFINE_ERROR(DimensionMismatch, "dimension-mismatch")
EXWALK_DEFINE_ERROR(UnrevealedEdge, "unrevealed-edge")
EXWALK_DEFINE_ERROR(NeverUnrevealedViolation, "never-unrevealed-violation")
EXWALK_DEFINE_ERROR(RangeError, "range")
EXWALK_DEFINE_ERROR(DomainError, "domain")
EXWALK_DEFINE_ERROR(MissingTau, "missing-tau")
EXWALK_DEFINE_ERROR(InconsistentTranscript, "inconsistent-transcript")
EXWALK_DEFINE_ERROR(DisconnectedPair, "disconnected-pair")
EXWALK_DEFINE_ERROR(InsufficientPoints, "insufficient-points")
EXWALK_DEFINE_ERROR(CapExceeded, "cap-exceeded")
EXWALK_DEFINE_ERROR(FormatError, "format")
EXWALK_DEFINE_ERROR(IoError, "io")

#undef EXWALK_DEFINE_ERROR

}  // namespace exwalk
