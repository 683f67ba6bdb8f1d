// error.hpp: Exception hierarchy shared by all giantatom modules

#pragma once

#include <stdexcept>
#include <string>

namespace giantatom {

// Input that violates a documented precondition. The CLI maps these to exit code 2.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class OutOfBand : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class EmptyShell : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class DegenerateCoupling : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

// A computation ran but could not meet its accuracy contract. Exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Amplitude reached the lattice boundary during an evolution.
class LatticeTooSmall : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotConverged : public NumericalError {
public:
    NotConverged(const std::string& what, double final_fidelity)
        : NumericalError(what), final_fidelity_(final_fidelity) {}
    double final_fidelity() const noexcept { return final_fidelity_; }

private:
    double final_fidelity_;
};

} // namespace giantatom
