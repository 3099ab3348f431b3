#pragma once

#include <stdexcept>
#include <string>

namespace heis {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct InvalidIsometry : Error { using Error::Error; };
struct DegenerateQuadric : Error { using Error::Error; };
struct CharacteristicPointError : Error { using Error::Error; };
struct NotAGraph : Error { using Error::Error; };
struct AxisError : Error { using Error::Error; };
struct IntegrationError : Error { using Error::Error; };
struct SupportError : Error { using Error::Error; };
struct DegenerateOmega : Error { using Error::Error; };
struct DegenerateScan : Error { using Error::Error; };
struct FitError : Error { using Error::Error; };

}  // namespace heis
