#pragma once

#include <stdexcept>
#include <string>

namespace sbt {

/// Broad failure class; the command-line front end maps it to an exit code.
enum class ErrorClass {
  argument,    // bad parameters supplied by the caller
  domain,      // mathematically out of range (singularity, tangent pole, ...)
  divergence,  // a simulation blew up
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

#define SBT_DEFINE_ERROR(Name, Class)                                                   \
  class Name : public Error {                                                           \
   public:                                                                              \
    explicit Name(const std::string& what) : Error(ErrorClass::Class, #Name ": " + what) {} \
  };

SBT_DEFINE_ERROR(ParamError, argument)
SBT_DEFINE_ERROR(DomainMismatch, argument)
SBT_DEFINE_ERROR(DegreeError, argument)
SBT_DEFINE_ERROR(EmptyInput, argument)
SBT_DEFINE_ERROR(WindowError, argument)
SBT_DEFINE_ERROR(PoleHit, domain)
SBT_DEFINE_ERROR(MapSingularity, domain)
SBT_DEFINE_ERROR(DomainError, domain)
SBT_DEFINE_ERROR(OriginError, domain)
SBT_DEFINE_ERROR(NormalizationError, domain)
SBT_DEFINE_ERROR(NotSettled, domain)
SBT_DEFINE_ERROR(ConsistencyError, domain)
SBT_DEFINE_ERROR(NumericOverflow, divergence)

#undef SBT_DEFINE_ERROR

}  // namespace sbt
