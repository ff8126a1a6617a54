#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace hft {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Per-entry hermiticity tolerance, relative to the largest entry magnitude.
inline constexpr double kHermiticityTol = 1e-12;

// Physically real traces may carry an imaginary residue up to
// 1e-10 * max(1, |Re|); anything larger is an error.
inline constexpr double kImagResidueTol = 1e-10;

// max over entries of |A_ij - conj(A_ji)|
double hermiticity_error(const Matrix& A);

// ------------------------------ HermitianOperator ---------------------------

// Dense square complex matrix, validated Hermitian on construction
// (dimensionless energy units, hbar = k_B = 1).
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix entries);

    Eigen::Index dim() const { return entries_.rows(); }
    const Matrix& matrix() const { return entries_; }

private:
    Matrix entries_;
};

// --------------------------- SpectralDecomposition --------------------------

// Eigenvalues ascending, eigenvector columns unitary. Used strictly as a
// numerical device inside matrix functions; no identity statement depends
// on individual eigenstates.
struct SpectralDecomposition {
    RealVector eigenvalues;
    Matrix eigenvectors;

    Eigen::Index dim() const { return eigenvalues.size(); }
};

// ------------------------------ ScalarFunction ------------------------------

// A real function together with its analytic derivative. The derivative
// channel must agree with a central finite difference of the value channel
// on the spectral range it is used on (checked by the test suite).
struct ScalarFunction {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::string label;

    static ScalarFunction identity();
    static ScalarFunction exponential();                       // e^x
    static ScalarFunction boltzmann(double beta);              // e^{-beta x}
    static ScalarFunction x_boltzmann(double beta);            // x e^{-beta x}
    static ScalarFunction polynomial(std::vector<double> coefficients); // sum c_k x^k
};

// ------------------------------ FrechetResult -------------------------------

struct FrechetResult {
    Matrix exponential; // e^X
    Matrix directional; // L(X, E) = d/ds e^{X + sE} at s = 0
};

// ------------------------------- operations ---------------------------------

// Rejects non-Hermitian input (reports the max asymmetry) and dim = 0.
// Deterministic for fixed input.
SpectralDecomposition spectral_decompose(const HermitianOperator& H);

// V diag(f(e)) V^dagger. Rejects f values that are not finite at an
// eigenvalue, naming the eigenvalue.
HermitianOperator apply_scalar_function(const SpectralDecomposition& dec, const ScalarFunction& f);

// Sum of diagonal entries; rejects non-square input.
Complex trace(const Matrix& A);

// Real part of a physically real complex value; rejects imaginary residue
// beyond kImagResidueTol * max(1, |Re|).
double real_part_checked(Complex z, const char* what);

// tr(A B) stripped to its real part after the residue check.
double real_trace_product(const Matrix& A, const Matrix& B, const char* what);

// Derivative of the matrix exponential in direction E via the 2n x 2n block
// method: exponentiate [[X, E], [0, X]]; e^X is the top-left block, L(X, E)
// the top-right one.
FrechetResult frechet_exp(const Matrix& X, const Matrix& E);

// Cross-validation path for Hermitian X (dec = spectral_decompose of X):
// in the eigenbasis L_ij = E_ij (e^{x_i} - e^{x_j}) / (x_i - x_j), with the
// confluent limit e^{x_i} when |x_i - x_j| <= 1e-8 max(1, |x_i|).
Matrix frechet_exp_spectral(const SpectralDecomposition& dec, const Matrix& E);

// || A B - B A ||_max
double commutator_norm(const HermitianOperator& A, const HermitianOperator& B);

} // namespace hft
