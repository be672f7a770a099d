#pragma once

#include <stdexcept>
#include <string>

namespace baltrunc {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct BadDimension : Error {
    using Error::Error;
};
struct BadInput : Error {
    using Error::Error;
};
struct SingularMatrix : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct NotSymmetric : Error {
    using Error::Error;
};
struct NotPositiveDefinite : Error {
    using Error::Error;
};
struct NotStable : Error {
    using Error::Error;
};
struct NotMinimal : Error {
    using Error::Error;
};
struct ComplexEigenvalue : Error {
    using Error::Error;
};
struct RepeatedHsv : Error {
    using Error::Error;
};
struct SplitsMultiplicityGroup : Error {
    using Error::Error;
};
struct SingularA11 : Error {
    using Error::Error;
};
struct SingularA22 : Error {
    using Error::Error;
};
struct SingularShift : Error {
    using Error::Error;
};
struct PoleHit : Error {
    using Error::Error;
};
struct HypothesisViolated : Error {
    using Error::Error;
};
struct ComplexZeros : Error {
    using Error::Error;
};
struct RepeatedZeros : Error {
    using Error::Error;
};
struct NotCoprime : Error {
    using Error::Error;
};
struct DegreeMismatch : Error {
    using Error::Error;
};
struct BadConfig : Error {
    using Error::Error;
};

}  // namespace baltrunc
