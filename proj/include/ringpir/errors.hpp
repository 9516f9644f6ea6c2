#pragma once

#include <stdexcept>
#include <string>

namespace ringpir {

// Modulus is not of the required shape m = prod p_i^{e_i} with every e_i >= 2.
struct NotComposite : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// gcd(m, n) != 1; the quotient ring would not be a principal ideal ring.
struct GcdViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ShapeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IndexOutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct InvalidIndex : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Vector handed to a non-free-part query is not a codeword at all.
struct NotInCode : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Non-free-part sampler asked to draw from a free code.
struct EmptyNonFreePart : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rejection sampling hit its attempt cap.
struct SamplerExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Candidate polynomial does not divide x^n - 1 in the stated ring.
struct NotADivisor : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Internal consistency failure while building a generating set in standard
// form.  Indicates a bug, not bad input.
struct ChainViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// z_i = [u]_m * H_in^T vanished; the annihilator scan has no target.
struct ZeroZ : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace ringpir
