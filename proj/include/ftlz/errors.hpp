#pragma once

#include <stdexcept>
#include <string>

namespace ftlz {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FTLZ_DEFINE_ERROR(Name)          \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  };

FTLZ_DEFINE_ERROR(InvalidGeometry)
FTLZ_DEFINE_ERROR(DegenerateBound)
FTLZ_DEFINE_ERROR(ShapeMismatch)
FTLZ_DEFINE_ERROR(BlockTooLarge)
FTLZ_DEFINE_ERROR(InvalidArgument)
FTLZ_DEFINE_ERROR(InvalidRegion)
FTLZ_DEFINE_ERROR(InvalidInjection)
FTLZ_DEFINE_ERROR(UnsupportedCodec)
FTLZ_DEFINE_ERROR(CorruptStream)
FTLZ_DEFINE_ERROR(InternalInvariantViolation)
FTLZ_DEFINE_ERROR(IoError)

// A block held more corruption than the checksum pair can repair.
FTLZ_DEFINE_ERROR(UncorrectableCorruption)

#undef FTLZ_DEFINE_ERROR

}  // namespace ftlz
