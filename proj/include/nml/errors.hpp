#ifndef NML_ERRORS_HPP
#define NML_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nml {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or inconsistent input data (bad dates, empty series, shape mismatch).
class DataError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: rank deficiency, divergence, zero variance.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Malformed or incomplete pipeline configuration. CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A pipeline stage was requested before its prerequisites ran. CLI exit code 3.
class DependencyError : public Error {
public:
    using Error::Error;
};

/// A pipeline stage failed while running. CLI exit code 4.
class StageError : public Error {
public:
    using Error::Error;
};

} // namespace nml

#endif
