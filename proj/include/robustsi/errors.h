#pragma once

#include <stdexcept>
#include <string>

namespace robustsi {

// Base of the error taxonomy. `name()` is the stable identifier printed on
// stderr by the CLI; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define ROBUSTSI_DEFINE_ERROR(E)                                  \
  struct E : Error {                                              \
    explicit E(const std::string& w) : Error(#E, w) {}            \
  }

ROBUSTSI_DEFINE_ERROR(DimensionMismatch);
ROBUSTSI_DEFINE_ERROR(ZeroMassRegion);
ROBUSTSI_DEFINE_ERROR(OutOfWindow);
ROBUSTSI_DEFINE_ERROR(WindowTooSmall);
ROBUSTSI_DEFINE_ERROR(Unbounded);
ROBUSTSI_DEFINE_ERROR(NumericalFailure);
ROBUSTSI_DEFINE_ERROR(CycleDetected);
ROBUSTSI_DEFINE_ERROR(TieAtBoundary);
ROBUSTSI_DEFINE_ERROR(EmptyRegion);
ROBUSTSI_DEFINE_ERROR(CallbackInconsistent);
ROBUSTSI_DEFINE_ERROR(DegenerateDirection);
ROBUSTSI_DEFINE_ERROR(NonMonotonePivot);
ROBUSTSI_DEFINE_ERROR(MaxIterations);
ROBUSTSI_DEFINE_ERROR(NonUniqueActiveBlock);
ROBUSTSI_DEFINE_ERROR(DetectionStarvation);
ROBUSTSI_DEFINE_ERROR(ParseError);
ROBUSTSI_DEFINE_ERROR(MissingColumn);
ROBUSTSI_DEFINE_ERROR(NoOutliersDetected);

#undef ROBUSTSI_DEFINE_ERROR

}  // namespace robustsi
