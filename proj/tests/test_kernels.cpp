#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hft/kernels.hpp"
#include "hft/rng.hpp"

#include <complex>

using hft::SplitMix64;
using namespace hft::kernels;

namespace {

// deterministic dense complex matrix, entries uniform in [-1,1)^2
Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Matrix A(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double re = rng.symmetric();
            const double im = rng.symmetric();
            A(i, j) = Complex(re, im);
        }
    return A;
}

Matrix pauli_x() {
    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}

} // namespace

TEST_CASE("multiply matches the library product") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const Matrix A = random_matrix(7, 5, seed);
        const Matrix B = random_matrix(5, 9, seed + 50);
        const Matrix reference = A * B;
        CHECK(max_abs(multiply(A, B) - reference) <= 1e-13 * max_abs(reference));
    }
}

TEST_CASE("multiply rejects mismatched inner dimensions") {
    const Matrix A = random_matrix(3, 4, 1);
    const Matrix B = random_matrix(3, 4, 2);
    CHECK_THROWS_AS(multiply(A, B), std::invalid_argument);
}

TEST_CASE("parallel and serial products are bit-identical") {
    // column-parallel with a fixed per-column order: same bits, any thread count
    for (Eigen::Index n : {1, 2, 3, 8, 17, 33}) {
        const Matrix A = random_matrix(n, n, 11 + static_cast<std::uint64_t>(n));
        const Matrix B = random_matrix(n, n, 91 + static_cast<std::uint64_t>(n));
        CHECK(max_abs(multiply(A, B) - multiply_serial(A, B)) == 0.0);
    }
}

TEST_CASE("congruence builds V diag(d) V-dagger") {
    const Matrix V = random_matrix(6, 6, 5);
    RealVector d(6);
    d << -2.0, -0.5, 0.0, 0.25, 1.0, 3.5;
    const Matrix reference = V * d.asDiagonal() * V.adjoint();
    CHECK(max_abs(congruence(V, d) - reference) <= 1e-13 * max_abs(reference));
    CHECK(max_abs(congruence(V, d) - congruence_serial(V, d)) == 0.0);
}

TEST_CASE("congruence rejects a diagonal of the wrong length") {
    const Matrix V = random_matrix(4, 4, 6);
    RealVector d(3);
    d.setOnes();
    CHECK_THROWS_AS(congruence(V, d), std::invalid_argument);
}

TEST_CASE("unitary_conjugate matches the explicit triple product") {
    const Matrix V = random_matrix(5, 5, 7);
    const Matrix G = random_matrix(5, 5, 8);
    const Matrix reference = V * G * V.adjoint();
    CHECK(max_abs(unitary_conjugate(V, G) - reference) <= 1e-13 * max_abs(reference));
}

TEST_CASE("trace_product equals the trace of the product") {
    const Matrix A = random_matrix(8, 8, 21);
    const Matrix B = random_matrix(8, 8, 22);
    const Complex direct = (A * B).trace();
    const double scale = std::max(1.0, std::abs(direct));
    CHECK(std::abs(trace_product(A, B) - direct) <= 1e-12 * scale);
}

TEST_CASE("trace_product is cyclic") {
    // tr(AB) = tr(BA) regardless of commutation
    for (std::uint64_t seed : {31, 32, 33, 34}) {
        const Matrix A = random_matrix(6, 6, seed);
        const Matrix B = random_matrix(6, 6, seed + 500);
        const Complex ab = trace_product(A, B);
        const Complex ba = trace_product(B, A);
        CHECK(std::abs(ab - ba) <= 1e-12 * std::max(1.0, std::abs(ab)));
    }
}

TEST_CASE("trace_product rejects shapes that do not close a trace") {
    CHECK_THROWS_AS(trace_product(random_matrix(3, 4, 1), random_matrix(3, 4, 2)),
                    std::invalid_argument);
}

TEST_CASE("max_abs and one_norm on a hand-built matrix") {
    Matrix A(2, 2);
    A << Complex(1, 0), Complex(-3, 0), Complex(0, 2), Complex(0.5, 0);
    CHECK(max_abs(A) == doctest::Approx(3.0).epsilon(1e-15));
    // columns sum to |1|+|2i| = 3 and |-3|+|0.5| = 3.5
    CHECK(one_norm(A) == doctest::Approx(3.5).epsilon(1e-15));
}

TEST_CASE("expm of the zero matrix is the identity") {
    const Matrix E = expm(Matrix::Zero(5, 5));
    CHECK(max_abs(E - Matrix::Identity(5, 5)) <= 1e-15);
}

TEST_CASE("expm exponentiates a diagonal matrix entrywise") {
    Matrix X = Matrix::Zero(3, 3);
    X(0, 0) = 0.3;
    X(1, 1) = -1.2;
    X(2, 2) = Complex(0.0, M_PI); // e^{i pi} = -1
    const Matrix E = expm(X);
    CHECK(std::abs(E(0, 0) - std::exp(0.3)) <= 1e-14);
    CHECK(std::abs(E(1, 1) - std::exp(-1.2)) <= 1e-14);
    CHECK(std::abs(E(2, 2) - Complex(-1.0, 0.0)) <= 1e-14);
    CHECK(std::abs(E(0, 1)) <= 1e-15);
}

TEST_CASE("expm of a nilpotent matrix terminates the series") {
    Matrix X = Matrix::Zero(2, 2);
    X(0, 1) = 1.0;
    const Matrix E = expm(X); // exactly I + X
    CHECK(max_abs(E - (Matrix::Identity(2, 2) + X)) <= 1e-15);
}

TEST_CASE("expm reproduces the Pauli-x closed form") {
    // e^{t sx} = cosh(t) I + sinh(t) sx
    const double t = 0.7;
    const Matrix E = expm(t * pauli_x());
    const Matrix reference =
        std::cosh(t) * Matrix::Identity(2, 2) + std::sinh(t) * pauli_x();
    CHECK(max_abs(E - reference) <= 1e-14);
}

TEST_CASE("expm(X) expm(-X) is the identity") {
    const Matrix X = 0.6 * random_matrix(6, 6, 40);
    const Matrix P = multiply(expm(X), expm(-X));
    CHECK(max_abs(P - Matrix::Identity(6, 6)) <= 1e-12);
}

TEST_CASE("expm of a Hermitian matrix agrees with its spectral form") {
    Matrix raw = random_matrix(9, 9, 55);
    const Matrix H = 0.5 * (raw + raw.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const Matrix reference =
        congruence(es.eigenvectors(), es.eigenvalues().array().exp().matrix());
    CHECK(max_abs(expm(H) - reference) <= 1e-12 * max_abs(reference));
}

TEST_CASE("expm forces one scaling pass on a large-norm input") {
    // 40 * sx has one_norm 40, well past the Pade-13 threshold
    const Matrix X = 40.0 * pauli_x();
    const Matrix reference =
        std::cosh(40.0) * Matrix::Identity(2, 2) + std::sinh(40.0) * pauli_x();
    CHECK(max_abs(expm(X) - reference) <= 1e-12 * max_abs(reference));
}

TEST_CASE("expm parallel and serial paths are bit-identical") {
    for (Eigen::Index n : {2, 9, 24}) {
        const Matrix X = 0.8 * random_matrix(n, n, 70 + static_cast<std::uint64_t>(n));
        CHECK(max_abs(expm(X) - expm_serial(X)) == 0.0);
    }
}

TEST_CASE("expm rejects non-square and non-finite input") {
    CHECK_THROWS_AS(expm(random_matrix(3, 4, 1)), std::invalid_argument);
    Matrix X = Matrix::Zero(2, 2);
    X(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(expm(X), std::invalid_argument);
}

TEST_CASE("kernels are deterministic across repeated calls") {
    const Matrix A = random_matrix(12, 12, 99);
    const Matrix B = random_matrix(12, 12, 100);
    CHECK(max_abs(multiply(A, B) - multiply(A, B)) == 0.0);
    CHECK(max_abs(expm(0.3 * A) - expm(0.3 * A)) == 0.0);
}
