#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace ag {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CatalogError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Quadrature or sampled evaluator asked for a point outside its budget.
struct CappedEvaluation : std::runtime_error {
    double max_valid_xi;
    CappedEvaluation(const std::string& msg, double max_xi)
        : std::runtime_error(msg), max_valid_xi(max_xi) {}
};

struct SingularSymbol : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OrderOverflow : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace ag
