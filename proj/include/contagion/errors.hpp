#pragma once

#include <stdexcept>
#include <string>

namespace contagion {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Target concentration cannot be produced by the power kernel on this topology.
class Unreachable : public Error {
public:
    using Error::Error;
};

/// A bank would need negative deposits to balance its sheet.
class InfeasibleSheet : public Error {
public:
    InfeasibleSheet(std::size_t bank, double deposits)
        : Error("infeasible balance sheet: bank " + std::to_string(bank) + " has deposits " +
                std::to_string(deposits)),
          bank_(bank) {}
    std::size_t bank() const { return bank_; }

private:
    std::size_t bank_;
};

class NoEligibleSeller : public Error {
public:
    using Error::Error;
};

class CalibrationDiverged : public Error {
public:
    using Error::Error;
};

class NonInvertible : public Error {
public:
    using Error::Error;
};

class SampleExhausted : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace contagion
