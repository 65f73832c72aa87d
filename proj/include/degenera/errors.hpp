#pragma once

#include <stdexcept>
#include <string>

namespace degenera {

// Field or coefficient evaluation hit a singular point (or produced a
// non-finite value) where a finite number was required.
class SingularEvaluationError : public std::runtime_error {
public:
    explicit SingularEvaluationError(const std::string& what)
        : std::runtime_error(what) {}
};

// A precondition stated as a pointwise hypothesis failed; the message names
// the condition that broke.
class HypothesisError : public std::runtime_error {
public:
    explicit HypothesisError(const std::string& what)
        : std::runtime_error(what) {}
};

// An iterative solver exhausted its budget without reaching tolerance.
class NonConvergenceError : public std::runtime_error {
public:
    explicit NonConvergenceError(const std::string& what)
        : std::runtime_error(what) {}
};

// A quadrature refinement probe kept growing: the integral is treated as
// infinite (the norm-infinite signal).
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what)
        : std::runtime_error(what) {}
};

} // namespace degenera
