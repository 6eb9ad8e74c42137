#ifndef REPLIQ_ERRORS_HPP
#define REPLIQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace repliq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Moment generating function is infinite at the requested point. For heavy
// tails (Pareto, Weibull shape < 1) the caller should fit a hyperexponential
// approximation first.
struct MgfDiverges : Error {
    using Error::Error;
};

struct WrongVariant : Error {
    using Error::Error;
};

struct FitFailed : Error {
    using Error::Error;
};

struct DivergentMean : Error {
    using Error::Error;
};

struct AllUnstable : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct UnstableBound : Error {
    using Error::Error;
};

struct EmptySample : Error {
    using Error::Error;
};

} // namespace repliq

#endif
