#pragma once

#include <stdexcept>
#include <string>

namespace latsnf {

// Error taxonomy.  Callers distinguish these; the CLI maps them all to exit
// code 1 with a machine-readable reason code.
struct Error : std::runtime_error {
    std::string code;
    Error(std::string c, const std::string& msg)
        : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

// Input violates a documented precondition (wrong shape, rank, range...).
struct ContractError : Error {
    explicit ContractError(const std::string& msg) : Error("contract", msg) {}
};

// A search or enumeration exceeded its instance-size budget.
struct BudgetError : Error {
    explicit BudgetError(const std::string& msg) : Error("budget", msg) {}
};

// Floating-point precision was insufficient to certify a result.
struct PrecisionError : Error {
    explicit PrecisionError(const std::string& msg) : Error("precision", msg) {}
};

// Modular inverse requested for a non-invertible element.
struct NoInverseError : Error {
    explicit NoInverseError(const std::string& msg) : Error("no-inverse", msg) {}
};

// Matrix has systematic-normal-form shape but a composite corner entry.
struct CompositeModulusError : Error {
    explicit CompositeModulusError(const std::string& msg)
        : Error("composite-modulus", msg) {}
};

// Matrix does not have systematic-normal-form shape.
struct SnfShapeError : Error {
    explicit SnfShapeError(const std::string& msg) : Error("snf-shape", msg) {}
};

// Text input could not be parsed; carries a 1-based line number.
struct ParseError : Error {
    long line;
    ParseError(long line_, const std::string& msg)
        : Error("parse", "line " + std::to_string(line_) + ": " + msg),
          line(line_) {}
};

}  // namespace latsnf
