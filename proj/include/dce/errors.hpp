#pragma once

#include <stdexcept>
#include <string>

namespace dce {

// Base class for everything thrown by the library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad argument values (wrong enum, order out of range, invalid config).
class parameter_error : public error {
public:
    explicit parameter_error(const std::string& msg) : error(msg) {}
};

// Query outside the domain of a phase function or profile.
class domain_error : public error {
public:
    explicit domain_error(const std::string& msg) : error(msg) {}
};

// Root finding or phase construction failed to converge.
class solver_error : public error {
public:
    explicit solver_error(const std::string& msg) : error(msg) {}
};

// Quadrature failed to reach the requested tolerance, divergent integral.
class numerical_error : public error {
public:
    explicit numerical_error(const std::string& msg) : error(msg) {}
};

// A phase function stopped being strictly increasing where it must not.
class monotonicity_error : public error {
public:
    explicit monotonicity_error(const std::string& msg) : error(msg) {}
};

} // namespace dce
