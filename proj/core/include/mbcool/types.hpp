#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mbcool {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Charge state of the Cooper-pair box, |-> = |n> and |+> = |n+1>.
enum class Charge { Minus, Plus };

inline int sign(Charge c) { return c == Charge::Minus ? -1 : +1; }
inline char label(Charge c) { return c == Charge::Minus ? '-' : '+'; }

// Error hierarchy. ConfigError and IoError map to CLI exit code 1, everything
// that derives from NumericalError maps to exit code 2.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    ConfigError(int line, const std::string& what)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class InvalidDimension : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class TruncationError : public NumericalError {
public:
    TruncationError(const std::string& what, int min_dim)
        : NumericalError(what), min_dim_(min_dim) {}
    /// Smallest dimension that would have satisfied the request, or 0 if unknown.
    int min_dim() const { return min_dim_; }

private:
    int min_dim_;
};

class PaddingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConsistencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateBranch : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StepSizeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace mbcool
