#pragma once

#include <stdexcept>
#include <string>

namespace dispectral {

// Bad arguments or malformed inputs. The CLI maps this to exit code 2.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed (non-convergence, collapse, ...).
// The CLI maps this to exit code 3.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Eigenvalues too close for the requested computation to be well posed.
class degeneracy_error : public numerical_error {
public:
    using numerical_error::numerical_error;
};

} // namespace dispectral
