#pragma once

#include <stdexcept>
#include <string>

namespace gcce {

// Root of all library errors. The CLI maps the three families below onto
// process exit codes (config 2, numerical 3, verification 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class VerificationError : public Error {
public:
    using Error::Error;
};

class InvalidSpinError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ShapeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ContractViolation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, int line)
        : ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class UnknownSpeciesError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class SingularityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class LevelIdentificationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ClusterTooLargeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EnumerationOverflowError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotPureDephasingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InsufficientDecayError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class FitError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace gcce
