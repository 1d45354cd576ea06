#pragma once

#include <stdexcept>
#include <string>

namespace oddac {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ODDAC_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

ODDAC_DEFINE_ERROR(DimensionError);
ODDAC_DEFINE_ERROR(KeyframeError);
ODDAC_DEFINE_ERROR(HorizonError);
ODDAC_DEFINE_ERROR(CapacityError);
ODDAC_DEFINE_ERROR(IncompleteWindowError);
ODDAC_DEFINE_ERROR(ParameterError);
ODDAC_DEFINE_ERROR(MatrixError);
ODDAC_DEFINE_ERROR(ProgramError);
ODDAC_DEFINE_ERROR(ConfigError);
ODDAC_DEFINE_ERROR(ScenarioError);

#undef ODDAC_DEFINE_ERROR

}  // namespace oddac
