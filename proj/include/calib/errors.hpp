#pragma once

#include <stdexcept>
#include <string>

namespace calib {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// LP outcomes
struct LpInfeasible : Error {
    using Error::Error;
};
struct LpUnbounded : Error {
    using Error::Error;
};

// geometry
struct DomainEmpty : Error {
    using Error::Error;
};

// game / strategy construction
struct UnknownGame : Error {
    using Error::Error;
};
struct ModeMismatch : Error {
    using Error::Error;
};
struct UnsupportedDimension : Error {
    using Error::Error;
};

// CLI and file-format validation; maps to exit code 2
struct ValidationError : Error {
    using Error::Error;
};

}  // namespace calib
