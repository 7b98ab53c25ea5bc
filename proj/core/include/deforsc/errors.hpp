// Error taxonomy shared by every module. All library failures are thrown as one
// of these; the CLI maps them onto exit codes (pre-flight/validation problems
// exit 2, runtime/numeric problems exit 1).
#pragma once

#include <stdexcept>
#include <string>

namespace deforsc {

// Root of the library's exception hierarchy.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input files: missing columns, unparseable cells, bad config keys.
struct SchemaError : Error {
    using Error::Error;
};

// Structurally valid input that violates panel integrity (year gaps, negative
// outcomes, duplicate unit/year rows, zero areas, ...).
struct IntegrityError : Error {
    using Error::Error;
};

// Well-formed data that a method cannot operate on (no donors, too few
// pre-treatment years, rank larger than the panel, ...).
struct DomainError : Error {
    using Error::Error;
};

// Numerical failure inside a solver (non-convergence, singular systems that
// survived the fallbacks).
struct NumericError : Error {
    using Error::Error;
};

// Donor screening widened its tolerance to the cap and still found no usable
// donor pool.
struct ScreeningExhaustedError : DomainError {
    using DomainError::DomainError;
};

}  // namespace deforsc
