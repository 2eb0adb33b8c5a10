// Exception types raised by the simulator.

#pragma once

#include <stdexcept>
#include <string>

namespace hiernm {

// |G| exceeded one: the propagator cannot describe a physical qubit channel.
class UnphysicalPropagator : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The Laplace denominator has a triple root; partial fractions are not supported there.
class UnsupportedDegeneracy : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A numerical self-check failed (imaginary residue in G, norm leakage, order test).
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The bisection bracket for the threshold does not straddle the transition.
class BracketError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace hiernm
