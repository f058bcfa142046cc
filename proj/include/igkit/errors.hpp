#pragma once

#include <stdexcept>
#include <string>

namespace igkit {

/// Base class for all igkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define IGKIT_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
    }

IGKIT_DEFINE_ERROR(DivergentIntegral);
IGKIT_DEFINE_ERROR(ZeroDenominator);
IGKIT_DEFINE_ERROR(PartitionMismatch);
IGKIT_DEFINE_ERROR(UnknownIdentifier);
IGKIT_DEFINE_ERROR(ArityError);
IGKIT_DEFINE_ERROR(DomainError);
IGKIT_DEFINE_ERROR(NonFinite);
IGKIT_DEFINE_ERROR(OutOfDomain);
IGKIT_DEFINE_ERROR(NonPositiveDensity);
IGKIT_DEFINE_ERROR(SpaceMismatch);
IGKIT_DEFINE_ERROR(SupportViolation);
IGKIT_DEFINE_ERROR(ZeroRow);
IGKIT_DEFINE_ERROR(ZeroMarginal);
IGKIT_DEFINE_ERROR(NotSufficient);
IGKIT_DEFINE_ERROR(IllConditioned);
IGKIT_DEFINE_ERROR(NotInOrliczSpace);
IGKIT_DEFINE_ERROR(NotProbability);
IGKIT_DEFINE_ERROR(SingularMetric);
IGKIT_DEFINE_ERROR(LeftDomain);
IGKIT_DEFINE_ERROR(InvalidSpec);

#undef IGKIT_DEFINE_ERROR

/// Parse error carrying the byte offset of the offending token.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, std::size_t offset)
        : Error("SyntaxError at byte " + std::to_string(offset) + ": " + msg),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

} // namespace igkit
