#include "hft/operator_core.hpp"

#include "hft/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace hft {

double hermiticity_error(const Matrix& A) {
    double err = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            err = std::max(err, std::abs(A(i, j) - std::conj(A(j, i))));
        }
    }
    return err;
}

HermitianOperator::HermitianOperator(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
        throw std::invalid_argument("HermitianOperator: matrix must be square with dim >= 1");
    }
    if (!entries_.allFinite()) {
        // max-based norms drop NaN entries, so test entrywise
        throw std::invalid_argument("HermitianOperator: non-finite entries");
    }
    const double scale = kernels::max_abs(entries_);
    const double err = hermiticity_error(entries_);
    if (!(err <= kHermiticityTol * scale)) {
        std::ostringstream msg;
        msg << "HermitianOperator: max asymmetry " << err << " exceeds tolerance "
            << kHermiticityTol * scale;
        throw std::invalid_argument(msg.str());
    }
}

SpectralDecomposition spectral_decompose(const HermitianOperator& H) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(H.matrix());
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("spectral_decompose: eigensolver did not converge");
    }
    return SpectralDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

HermitianOperator apply_scalar_function(const SpectralDecomposition& dec, const ScalarFunction& f) {
    RealVector fe(dec.dim());
    for (Eigen::Index i = 0; i < dec.dim(); ++i) {
        fe(i) = f.value(dec.eigenvalues(i));
        if (!std::isfinite(fe(i))) {
            std::ostringstream msg;
            msg << "apply_scalar_function: f(" << dec.eigenvalues(i) << ") is not finite";
            throw std::domain_error(msg.str());
        }
    }
    return HermitianOperator(kernels::congruence(dec.eigenvectors, fe));
}

Complex trace(const Matrix& A) {
    if (A.rows() != A.cols()) {
        throw std::invalid_argument("trace: matrix must be square");
    }
    Complex s{0.0, 0.0};
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        s += A(i, i);
    }
    return s;
}

double real_part_checked(Complex z, const char* what) {
    if (!(std::abs(z.imag()) <= kImagResidueTol * std::max(1.0, std::abs(z.real())))) {
        std::ostringstream msg;
        msg << what << ": imaginary residue " << z.imag() << " too large for a real quantity (re="
            << z.real() << ")";
        throw std::runtime_error(msg.str());
    }
    return z.real();
}

double real_trace_product(const Matrix& A, const Matrix& B, const char* what) {
    return real_part_checked(kernels::trace_product(A, B), what);
}

FrechetResult frechet_exp(const Matrix& X, const Matrix& E) {
    if (X.rows() != X.cols() || E.rows() != E.cols() || X.rows() != E.rows()) {
        throw std::invalid_argument("frechet_exp: X and E must be square with equal dimension");
    }
    const Eigen::Index n = X.rows();
    Matrix block = Matrix::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = X;
    block.topRightCorner(n, n) = E;
    block.bottomRightCorner(n, n) = X;
    const Matrix eb = kernels::expm(block);
    return FrechetResult{eb.topLeftCorner(n, n), eb.topRightCorner(n, n)};
}

namespace {

// (e^a - e^b) / (a - b), confluent branch per the stated threshold
double exp_divided_difference(double a, double b) {
    if (std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a))) {
        return std::exp(a);
    }
    const double d = 0.5 * (a - b);
    return std::exp(0.5 * (a + b)) * (std::sinh(d) / d);
}

} // namespace

Matrix frechet_exp_spectral(const SpectralDecomposition& dec, const Matrix& E) {
    if (E.rows() != dec.dim() || E.cols() != dec.dim()) {
        throw std::invalid_argument("frechet_exp_spectral: direction dimension mismatch");
    }
    const Matrix& V = dec.eigenvectors;
    const Matrix Et = kernels::multiply(kernels::multiply(V.adjoint(), E), V);
    Matrix L(dec.dim(), dec.dim());
    for (Eigen::Index j = 0; j < dec.dim(); ++j) {
        for (Eigen::Index i = 0; i < dec.dim(); ++i) {
            L(i, j) = Et(i, j) * exp_divided_difference(dec.eigenvalues(i), dec.eigenvalues(j));
        }
    }
    return kernels::unitary_conjugate(V, L);
}

double commutator_norm(const HermitianOperator& A, const HermitianOperator& B) {
    if (A.dim() != B.dim()) {
        throw std::invalid_argument("commutator_norm: dimension mismatch");
    }
    const Matrix AB = kernels::multiply(A.matrix(), B.matrix());
    const Matrix BA = kernels::multiply(B.matrix(), A.matrix());
    return kernels::max_abs(AB - BA);
}

// ------------------------------ ScalarFunction ------------------------------

ScalarFunction ScalarFunction::identity() {
    return {[](double x) { return x; }, [](double) { return 1.0; }, "x"};
}

ScalarFunction ScalarFunction::exponential() {
    return {[](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }, "exp(x)"};
}

ScalarFunction ScalarFunction::boltzmann(double beta) {
    return {[beta](double x) { return std::exp(-beta * x); },
            [beta](double x) { return -beta * std::exp(-beta * x); },
            "exp(-beta x)"};
}

ScalarFunction ScalarFunction::x_boltzmann(double beta) {
    return {[beta](double x) { return x * std::exp(-beta * x); },
            [beta](double x) { return (1.0 - beta * x) * std::exp(-beta * x); },
            "x exp(-beta x)"};
}

ScalarFunction ScalarFunction::polynomial(std::vector<double> coefficients) {
    auto horner = [](const std::vector<double>& c, double x) {
        double v = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) {
            v = v * x + *it;
        }
        return v;
    };
    std::vector<double> dcoeff;
    for (std::size_t k = 1; k < coefficients.size(); ++k) {
        dcoeff.push_back(static_cast<double>(k) * coefficients[k]);
    }
    return {[c = coefficients, horner](double x) { return horner(c, x); },
            [d = std::move(dcoeff), horner](double x) { return horner(d, x); },
            "polynomial"};
}

} // namespace hft
