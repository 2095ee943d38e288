#pragma once

#include <stdexcept>
#include <string>

namespace oe {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The weight function does not satisfy omega(n)/n -> 0.
struct NotSublinearError : Error {
    using Error::Error;
};

// A search or enumeration exceeded its configured cap.
struct CapExceededError : Error {
    using Error::Error;
};

// The planner ran out of primes to grow a parity class with: the target
// supernatural number has all-finite exponents and they are fully consumed.
struct NoFillerPrimeError : Error {
    using Error::Error;
};

// omega evaluated outside the double range.
struct OmegaOverflowError : Error {
    using Error::Error;
};

}  // namespace oe
