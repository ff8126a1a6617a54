#pragma once

#include <Eigen/Dense>

#include <complex>

namespace hft::kernels {

using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Complex = std::complex<double>;

// ------------------------------ norms ---------------------------------------

// max over entries of |A_ij|
double max_abs(const Matrix& A);

// induced 1-norm (max column absolute sum); drives expm scaling
double one_norm(const Matrix& A);

// ---------------------------- products --------------------------------------
//
// multiply() is the OpenMP entry point used throughout the library; the
// *_serial variants are reference implementations kept for testing and for
// the kernel benchmark. Parallelisation is over output columns, each column
// computed by exactly one thread in a fixed order, so serial and parallel
// results are bit-identical and independent of the thread count.

Matrix multiply(const Matrix& A, const Matrix& B);
Matrix multiply_serial(const Matrix& A, const Matrix& B);

// V * diag(d) * V^dagger for real d
Matrix congruence(const Matrix& V, const RealVector& d);
Matrix congruence_serial(const Matrix& V, const RealVector& d);

// V * G * V^dagger for a full (not necessarily diagonal) core matrix G
Matrix unitary_conjugate(const Matrix& V, const Matrix& G);

// tr(A * B) without materialising the product (fixed summation order)
Complex trace_product(const Matrix& A, const Matrix& B);

// -------------------------- matrix exponential ------------------------------
//
// Scaling-and-squaring with the degree-13 Pade approximant. Deterministic
// for fixed input; the serial variant routes every product through
// multiply_serial.

Matrix expm(const Matrix& X);
Matrix expm_serial(const Matrix& X);

} // namespace hft::kernels
