#include "hft/family.hpp"

#include "hft/finite_diff.hpp"
#include "hft/kernels.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hft {

namespace fd {

double default_step(double x) {
    static const double croot = std::cbrt(std::numeric_limits<double>::epsilon());
    return croot * std::max(1.0, std::abs(x));
}

double derivative(const std::function<double(double)>& g, double x, double h) {
    if (h == 0.0) {
        h = default_step(x);
    }
    const double d1 = (g(x + h) - g(x - h)) / (2.0 * h);
    const double d2 = (g(x + 0.5 * h) - g(x - 0.5 * h)) / h;
    const double scale = std::max({std::abs(d1), std::abs(d2), 1e-300});
    if (std::abs(d1 - d2) > 1e-7 * scale) {
        return (4.0 * d2 - d1) / 3.0;
    }
    return d1;
}

} // namespace fd

HermitianOperator fd_family_derivative(const OperatorFamily& fam, double lambda, double h) {
    if (h == 0.0) {
        h = fd::default_step(lambda);
    }
    if (!(h > 0.0)) {
        throw std::invalid_argument("fd_family_derivative: step must be positive");
    }
    const Matrix plus = fam.hamiltonian_at(lambda + h).matrix();
    const Matrix minus = fam.hamiltonian_at(lambda - h).matrix();
    // the 1/(2h) quotient amplifies ulp-level product asymmetry past the
    // constructor gate; the anti-Hermitian residue is pure noise, drop it
    const Matrix quotient = (plus - minus) / (2.0 * h);
    return HermitianOperator(0.5 * (quotient + quotient.adjoint()));
}

void validate_family(const OperatorFamily& fam, std::span<const double> lambdas, double rel_tol) {
    if (!fam.hamiltonian_at || !fam.derivative_at) {
        throw std::invalid_argument("validate_family: missing evaluation channel");
    }
    for (double lambda : lambdas) {
        const HermitianOperator h = fam.hamiltonian_at(lambda);
        const HermitianOperator hp = fam.derivative_at(lambda);
        if (h.dim() != fam.dim || hp.dim() != fam.dim) {
            throw std::invalid_argument("validate_family: dimension differs from declaration");
        }
        const HermitianOperator fd = fd_family_derivative(fam, lambda);
        const double err = kernels::max_abs(hp.matrix() - fd.matrix());
        const double scale = std::max(1.0, kernels::max_abs(fd.matrix()));
        if (!(err <= rel_tol * scale)) {
            std::ostringstream msg;
            msg << "validate_family: derivative channel of '" << fam.label
                << "' disagrees with finite difference at lambda=" << lambda << " (error " << err
                << ")";
            throw std::runtime_error(msg.str());
        }
    }
}

void validate_family_on(const OperatorFamily& fam, double lo, double hi, double rel_tol) {
    std::vector<double> samples;
    for (int k = 0; k < 5; ++k) {
        samples.push_back(lo + (hi - lo) * (0.1 + 0.2 * k));
    }
    validate_family(fam, samples, rel_tol);
}

} // namespace hft
