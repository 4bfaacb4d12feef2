#pragma once

#include <stdexcept>
#include <string>

namespace retrobell {

// Base of every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define RETROBELL_DEFINE_ERROR(Name)                 \
    class Name : public Error {                      \
    public:                                          \
        explicit Name(const std::string& what)       \
            : Error(std::string(#Name ": ") + what) {} \
    }

RETROBELL_DEFINE_ERROR(ZeroVector);
RETROBELL_DEFINE_ERROR(AntipodalSingularity);
RETROBELL_DEFINE_ERROR(DegenerateCombination);
RETROBELL_DEFINE_ERROR(RegimeViolation);
RETROBELL_DEFINE_ERROR(EmptySet);
RETROBELL_DEFINE_ERROR(DomainError);
RETROBELL_DEFINE_ERROR(OutOfRange);
RETROBELL_DEFINE_ERROR(NoConvergence);
RETROBELL_DEFINE_ERROR(SeedInconsistent);
RETROBELL_DEFINE_ERROR(DegenerateBasis);
RETROBELL_DEFINE_ERROR(EmptyBin);
RETROBELL_DEFINE_ERROR(InvalidConfig);

#undef RETROBELL_DEFINE_ERROR

}  // namespace retrobell
