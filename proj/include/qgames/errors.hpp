#pragma once

#include <stdexcept>
#include <string>

namespace qgames {

// Base of every error thrown by the library. `kind()` is a stable
// machine-readable tag used by the CLI error field.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define QGAMES_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

QGAMES_DEFINE_ERROR(ShapeError);
QGAMES_DEFINE_ERROR(SizeCapExceeded);
QGAMES_DEFINE_ERROR(InvalidState);
QGAMES_DEFINE_ERROR(InvalidArity);
QGAMES_DEFINE_ERROR(IndexError);
QGAMES_DEFINE_ERROR(NotTracePreserving);
QGAMES_DEFINE_ERROR(IncompletePovm);
QGAMES_DEFINE_ERROR(NonConvergence);
QGAMES_DEFINE_ERROR(NotAGroup);
QGAMES_DEFINE_ERROR(CovarianceViolation);

#undef QGAMES_DEFINE_ERROR

}  // namespace qgames
