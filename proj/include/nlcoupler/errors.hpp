#ifndef NLCOUPLER_ERRORS_HPP
#define NLCOUPLER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nlcoupler {

// Base class for all library-specific failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Symplectic residual of the analytic coefficients exceeded tolerance,
// signalling an inconsistent complex branch; callers may fall back to
// ode_coefficients.
class BranchAmbiguity : public Error {
public:
    BranchAmbiguity(const std::string& msg, double residual)
        : Error(msg), residual(residual) {}
    double residual;
};

// Mean photon number too small for a normalized correlation function.
class ZeroIntensity : public Error {
public:
    using Error::Error;
};

// Glauber P-function does not exist as an ordinary function for the
// requested state/time (nonclassicality witness).
class PNotRepresentable : public Error {
public:
    using Error::Error;
};

// No closed form is available for the requested family/ordering.
class UnsupportedClosedForm : public Error {
public:
    using Error::Error;
};

// Characteristic function has not decayed at the integration boundary, so
// the numerical transform would be truncated.
class TruncatedTransform : public Error {
public:
    using Error::Error;
};

// Operation is not defined for this input-state family.
class UnsupportedState : public Error {
public:
    using Error::Error;
};

// Truncated Fock basis can no longer represent the state reliably.
class CutoffExceeded : public Error {
public:
    CutoffExceeded(const std::string& msg, double tail_mass)
        : Error(msg), tail_mass(tail_mass) {}
    double tail_mass;
};

// Adaptive integrator step size underflowed.
class IntegratorFailure : public Error {
public:
    using Error::Error;
};

// Malformed run configuration; message carries line/field diagnostics.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace nlcoupler

#endif
