#pragma once

#include <stdexcept>
#include <string>

namespace gridrl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input data could not be ingested (bad schema, bad row, broken timeline).
struct LoadError : Error {
    using Error::Error;
};

/// A caller violated a documented precondition (out-of-bound raw value etc).
struct ContractViolation : Error {
    using Error::Error;
};

/// Stepping past the last record of the driving time series.
struct SeriesExhausted : Error {
    using Error::Error;
};

/// LP solver failed numerically. Never silent suboptimality.
struct SolverError : Error {
    using Error::Error;
};

}  // namespace gridrl
