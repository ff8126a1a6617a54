#pragma once

#include "hft/operator_core.hpp"

#include <functional>
#include <limits>
#include <span>
#include <string>

namespace hft {

// A differentiable map lambda -> H(lambda) with an analytic derivative
// channel H'(lambda). The basis is fixed (lambda-independent) by
// construction; both channels must return dim x dim Hermitian operators on
// the declared domain.
struct OperatorFamily {
    Eigen::Index dim = 0;
    std::function<HermitianOperator(double)> hamiltonian_at;
    std::function<HermitianOperator(double)> derivative_at;
    std::string label;
    double domain_lo = -std::numeric_limits<double>::infinity();
    double domain_hi = std::numeric_limits<double>::infinity();
};

// (H(lambda+h) - H(lambda-h)) / (2h); the finite-difference oracle for the
// analytic derivative channel. h = 0 selects fd::default_step(lambda).
HermitianOperator fd_family_derivative(const OperatorFamily& fam, double lambda, double h = 0.0);

// Checks that both channels return Hermitian operators of the declared
// dimension and that derivative_at matches fd_family_derivative within
// rel_tol at each sampled lambda. Throws on violation.
void validate_family(const OperatorFamily& fam, std::span<const double> lambdas,
                     double rel_tol = 1e-6);

// Samples 5 points across [lo, hi] and validates there.
void validate_family_on(const OperatorFamily& fam, double lo, double hi, double rel_tol = 1e-6);

} // namespace hft
