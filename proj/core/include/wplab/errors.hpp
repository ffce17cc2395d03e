#pragma once

#include <stdexcept>
#include <string>

namespace wplab {

/// Base of every error raised by the library. `kind()` is the stable,
/// machine-readable name reported by the CLI failure list.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define WPLAB_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                         \
   public:                                                            \
    using Error::Error;                                               \
    const char* kind() const noexcept override { return #Name; }      \
  }

WPLAB_DEFINE_ERROR(GapViolation);
WPLAB_DEFINE_ERROR(StepFailure);
WPLAB_DEFINE_ERROR(DegenerateFit);
WPLAB_DEFINE_ERROR(FitError);
WPLAB_DEFINE_ERROR(BoundaryLeak);
WPLAB_DEFINE_ERROR(BoundaryError);
WPLAB_DEFINE_ERROR(ResolutionError);
WPLAB_DEFINE_ERROR(InterpolationError);
WPLAB_DEFINE_ERROR(MassDriftError);
WPLAB_DEFINE_ERROR(GammaError);
WPLAB_DEFINE_ERROR(ConfigError);
WPLAB_DEFINE_ERROR(FormatError);

#undef WPLAB_DEFINE_ERROR

}  // namespace wplab
