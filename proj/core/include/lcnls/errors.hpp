#pragma once

#include <stdexcept>
#include <string>

namespace lcnls {

/// Base class for all error conditions raised by this library.
/// Every failure mode that callers are expected to handle gets its own
/// subclass so call sites can discriminate without string matching.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- linear algebra ---

/// A pivot fell below the configured relative threshold during banded
/// elimination; the linear system is singular or numerically so.
class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// Right-hand side length does not match the factored matrix order.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// --- envelope generation ---

/// Carrier frequency and phase speed violate n + c^2/4 < 0, so no decaying
/// localized envelope exists.
class UnboundState : public Error {
public:
    using Error::Error;
};

/// Newton iteration on the envelope boundary-value problem did not reach the
/// update tolerance within the iteration cap.
class NewtonDiverged : public Error {
public:
    using Error::Error;
};

/// Newton converged but to a near-zero profile; the zero solution always
/// coexists with the localized branches and must be rejected.
class TrivialBranch : public Error {
public:
    using Error::Error;
};

// --- initial data assembly ---

/// A shifted envelope does not decay below tolerance inside the grid.
class ShiftOutOfDomain : public Error {
public:
    using Error::Error;
};

/// Two solitary waves overlap too strongly for a linear superposition to be
/// a valid initial condition.
class OverlapTooLarge : public Error {
public:
    using Error::Error;
};

// --- time stepping ---

/// The internal iteration of the implicit step exceeded its cap; the usual
/// cause is a time step too large for the field amplitude.
class InnerIterationDiverged : public Error {
public:
    using Error::Error;
};

// --- diagnostics ---

/// Both component maxima inside a polarization window are below threshold.
class DegenerateWindow : public Error {
public:
    using Error::Error;
};

/// Windowed density mass dropped below threshold; the tracked solitary wave
/// left its window.
class TrackLost : public Error {
public:
    using Error::Error;
};

/// A component-mass series has no detectable oscillation.
class NoOscillation : public Error {
public:
    using Error::Error;
};

// --- scenarios ---

/// Scenario configuration failed validation; the message names the field.
class ConfigInvalid : public Error {
public:
    using Error::Error;
};

/// The requested refinement study has no closed-form reference solution.
class OracleUnavailable : public Error {
public:
    using Error::Error;
};

} // namespace lcnls
