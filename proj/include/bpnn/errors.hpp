#pragma once

#include <stdexcept>
#include <string>

namespace bpnn {

// Base class for all library errors. The CLI maps each concrete type to a
// distinct exit code (see tools/bpnn_cli.cpp).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct InvalidArchitecture : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

struct EmptyDataset : Error {
    using Error::Error;
};

struct EmptyMatrix : Error {
    using Error::Error;
};

struct IndexOutOfRange : Error {
    using Error::Error;
};

struct MissingHeader : Error {
    using Error::Error;
};

struct MalformedCsv : Error {
    using Error::Error;
};

struct SchemaMismatch : Error {
    using Error::Error;
};

struct InsufficientClassSamples : Error {
    using Error::Error;
};

// Thrown when a parameter update would produce NaN/Inf weights.
struct NonFiniteUpdate : Error {
    using Error::Error;
};

// Thrown when a ForwardTrace does not match the network it is used with.
struct StaleTrace : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace bpnn
