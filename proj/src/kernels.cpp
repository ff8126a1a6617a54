#include "hft/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace hft::kernels {

namespace {

void require_product_shapes(const Matrix& A, const Matrix& B) {
    if (A.cols() != B.rows()) {
        throw std::invalid_argument("kernels::multiply: inner dimensions differ");
    }
}

} // namespace

double max_abs(const Matrix& A) {
    double m = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            m = std::max(m, std::abs(A(i, j)));
        }
    }
    return m;
}

double one_norm(const Matrix& A) {
    double m = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        m = std::max(m, A.col(j).cwiseAbs().sum());
    }
    return m;
}

Matrix multiply(const Matrix& A, const Matrix& B) {
    require_product_shapes(A, B);
    Matrix C(A.rows(), B.cols());
    const Eigen::Index nc = B.cols();
#pragma omp parallel for schedule(static) if (A.rows() * nc > 64 * 64)
    for (Eigen::Index j = 0; j < nc; ++j) {
        C.col(j).noalias() = A * B.col(j);
    }
    return C;
}

Matrix multiply_serial(const Matrix& A, const Matrix& B) {
    require_product_shapes(A, B);
    Matrix C(A.rows(), B.cols());
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
        C.col(j).noalias() = A * B.col(j);
    }
    return C;
}

namespace {

Matrix scale_columns(const Matrix& V, const RealVector& d) {
    if (V.cols() != d.size()) {
        throw std::invalid_argument("kernels::congruence: diagonal length differs from dimension");
    }
    Matrix W = V;
    for (Eigen::Index k = 0; k < W.cols(); ++k) {
        W.col(k) *= d(k);
    }
    return W;
}

} // namespace

Matrix congruence(const Matrix& V, const RealVector& d) {
    return multiply(scale_columns(V, d), V.adjoint());
}

Matrix congruence_serial(const Matrix& V, const RealVector& d) {
    return multiply_serial(scale_columns(V, d), V.adjoint());
}

Matrix unitary_conjugate(const Matrix& V, const Matrix& G) {
    return multiply(multiply(V, G), V.adjoint());
}

Complex trace_product(const Matrix& A, const Matrix& B) {
    if (A.cols() != B.rows() || A.rows() != B.cols()) {
        throw std::invalid_argument("kernels::trace_product: shapes do not close a trace");
    }
    Complex s{0.0, 0.0};
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            s += A(i, j) * B(j, i);
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// expm: Pade-13 scaling and squaring (coefficients from the standard
// degree-13 diagonal approximant; theta_13 is its backward-error bound).
// ---------------------------------------------------------------------------

namespace {

constexpr double kPade13Theta = 5.371920351148152;

constexpr double kPadeB[14] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

using MulFn = Matrix (*)(const Matrix&, const Matrix&);

Matrix expm_impl(const Matrix& X, MulFn mul) {
    if (X.rows() != X.cols()) {
        throw std::invalid_argument("kernels::expm: matrix must be square");
    }
    const Eigen::Index n = X.rows();
    if (!X.allFinite()) {
        // one_norm's max-accumulation would silently drop NaN columns
        throw std::invalid_argument("kernels::expm: non-finite entries");
    }
    const double norm = one_norm(X);

    int s = 0;
    if (norm > kPade13Theta) {
        s = static_cast<int>(std::ceil(std::log2(norm / kPade13Theta)));
    }
    const Matrix A = X * std::ldexp(1.0, -s);

    const Matrix A2 = mul(A, A);
    const Matrix A4 = mul(A2, A2);
    const Matrix A6 = mul(A2, A4);

    Matrix W = kPadeB[13] * A6 + kPadeB[11] * A4 + kPadeB[9] * A2;
    W = mul(A6, W);
    W += kPadeB[7] * A6 + kPadeB[5] * A4 + kPadeB[3] * A2;
    W += kPadeB[1] * Matrix::Identity(n, n);
    const Matrix U = mul(A, W);

    Matrix V = kPadeB[12] * A6 + kPadeB[10] * A4 + kPadeB[8] * A2;
    V = mul(A6, V);
    V += kPadeB[6] * A6 + kPadeB[4] * A4 + kPadeB[2] * A2;
    V += kPadeB[0] * Matrix::Identity(n, n);

    Matrix R = (V - U).partialPivLu().solve(V + U);
    for (int k = 0; k < s; ++k) {
        R = mul(R, R);
    }
    return R;
}

} // namespace

Matrix expm(const Matrix& X) { return expm_impl(X, &multiply); }

Matrix expm_serial(const Matrix& X) { return expm_impl(X, &multiply_serial); }

} // namespace hft::kernels
