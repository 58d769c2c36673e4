#pragma once

#include <stdexcept>
#include <string>

namespace zerocell {

// Input within tolerance of a degenerate configuration; stochastic callers
// resample, deterministic callers should treat it as a hard error.
struct DegenerateInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A sampler exceeded its hyperplane budget before the stopping rule fired.
struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter outside the range where a formula is stated.
struct UnsupportedRange : std::domain_error {
    using std::domain_error::domain_error;
};

} // namespace zerocell
