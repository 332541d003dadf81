#pragma once

#include <stdexcept>
#include <string>

namespace lps {

/// Base class for all errors raised by the solver library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid user input (bad parameter value, malformed config, bad grid spec).
class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

/// Numerical failure (non-convergence, singular matrix, overflow).
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

/// Failure of a named solve stage; keeps the stage identity for diagnostics.
class StageError : public NumericalError {
public:
    StageError(const std::string& stage, const std::string& msg)
        : NumericalError(stage + ": " + msg), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace lps
