#pragma once

#include <stdexcept>
#include <string>

namespace soficlab {

// Invalid input: bad probability vector, non-reversible chain, mismatched
// radii, unsupported parameter range. The CLI maps this to exit code 3.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An exact enumeration would exceed the configured budget. Carries the
// number of labelings the request would need. CLI exit code 4.
class BudgetError : public std::runtime_error {
public:
    BudgetError(const std::string& what, double required_labelings)
        : std::runtime_error(what), required(required_labelings) {}

    double required;
};

} // namespace soficlab
