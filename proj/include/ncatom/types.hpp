#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ncatom {

/// Principal and orbital quantum numbers (n, l) labeling one bound state.
struct QuantumNumbers {
    int n{1};
    int l{0};

    bool is_valid() const { return n >= 1 && l >= 0 && l <= n - 1; }
    bool operator==(const QuantumNumbers&) const = default;
};

inline void validate(const QuantumNumbers& qn) {
    if (!qn.is_valid())
        throw std::invalid_argument("quantum numbers require n >= 1 and 0 <= l <= n-1, got n=" +
                                    std::to_string(qn.n) + " l=" + std::to_string(qn.l));
}

/// Dimensionless interaction constant alphaZ of the hydrogenlike problem.
struct Coupling {
    double alphaZ{0.0};

    bool is_valid() const { return alphaZ > 0.0 && std::isfinite(alphaZ); }
};

inline void validate(const Coupling& c) {
    if (!c.is_valid())
        throw std::invalid_argument("coupling alphaZ must be positive and finite");
}

/// Two particle masses in any consistent unit; M = m1+m2, mu = m1 m2 / M.
struct MassPair {
    double m1{1.0};
    double m2{1.0};

    double total() const { return m1 + m2; }
    double reduced() const { return m1 * m2 / (m1 + m2); }
};

inline void validate(const MassPair& m) {
    if (!(m.m1 > 0.0) || !(m.m2 > 0.0))
        throw std::invalid_argument("masses must be strictly positive");
}

// Solver error taxonomy. All derive from std::runtime_error except
// argument-shaped contract violations, which use std::invalid_argument.

/// Quadrature subdivision budget exhausted before reaching the tolerance.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Predicate has the same value at both bracket ends.
struct InvalidBracket : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// First argument of the confluent hypergeometric polynomial is positive.
struct InvalidDegree : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The self-consistency equation has no root: the state does not exist.
struct NoBoundState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A density handed in for averaging does not integrate to one.
struct NotNormalized : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Klein-Gordon level requested above its critical coupling.
struct BeyondCriticalCoupling : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shooting eigensolver could not isolate the requested level.
struct EigenvalueNotBracketed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Radial grid cannot represent the state (box too small or too coarse).
struct GridTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Self-consistent iteration left its contract (budget or oscillation).
struct IterationDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Angular-momentum coefficients are singular in the strongly bound limit.
struct DegenerateEpsilon : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace ncatom
