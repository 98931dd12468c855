#pragma once

#include <stdexcept>
#include <string>

namespace moranlab {

// Bad user input: malformed model files, parameters outside documented
// domains, mismatched cardinalities. CLI maps this to exit code 2.
struct validation_error : std::invalid_argument {
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

// A requested root does not exist in the admissible range (e.g. the
// contraction-sum equation has no solution for a single-map system).
// CLI maps this to exit code 3.
struct no_solution_error : std::runtime_error {
    explicit no_solution_error(const std::string& what) : std::runtime_error(what) {}
};

// A series required by the computation diverges for every admissible
// exponent, so no finite answer exists. CLI maps this to exit code 3.
struct divergence_error : std::runtime_error {
    explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

// An iteration or enumeration budget was exhausted before the requested
// tolerance was met. `partial` carries whatever quantity the caller can
// use to judge how close the run got (e.g. retained mass). CLI maps this
// to exit code 4.
struct budget_error : std::runtime_error {
    double partial;
    explicit budget_error(const std::string& what, double partial_ = 0.0)
        : std::runtime_error(what), partial(partial_) {}
};

} // namespace moranlab
