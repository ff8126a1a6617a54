#include "hft/ensemble_grand.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hft {

namespace {

constexpr Eigen::Index kMaxFockDim = 4096;

} // namespace

FockSpace build_boson_fock(int modes, int cutoff) {
    if (modes < 1) {
        throw std::invalid_argument("build_boson_fock: modes must be >= 1");
    }
    if (cutoff < 1) {
        throw std::invalid_argument("build_boson_fock: cutoff must be >= 1");
    }
    const int states_per_mode = cutoff + 1;
    Eigen::Index dim = 1;
    for (int m = 0; m < modes; ++m) {
        dim *= states_per_mode;
        if (dim > kMaxFockDim) {
            // keep multiplying in exact integers would overflow eventually;
            // report the full product instead
            double full = std::pow(static_cast<double>(states_per_mode), modes);
            std::ostringstream msg;
            msg << "build_boson_fock: dim = (cutoff+1)^modes = " << full << " exceeds cap "
                << kMaxFockDim;
            throw std::invalid_argument(msg.str());
        }
    }

    FockSpace space;
    space.modes = modes;
    space.cutoff = cutoff;
    space.dim = dim;

    // index -> occupation tuple: base-(cutoff+1) digits, mode 0 most
    // significant, so tuple order is lexicographic
    space.basis.resize(static_cast<std::size_t>(dim));
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
        std::vector<int> occ(static_cast<std::size_t>(modes));
        Eigen::Index rem = idx;
        for (int m = modes - 1; m >= 0; --m) {
            occ[static_cast<std::size_t>(m)] = static_cast<int>(rem % states_per_mode);
            rem /= states_per_mode;
        }
        space.basis[static_cast<std::size_t>(idx)] = std::move(occ);
    }

    // stride of mode m in the mixed-radix index
    std::vector<Eigen::Index> stride(static_cast<std::size_t>(modes), 1);
    for (int m = modes - 2; m >= 0; --m) {
        stride[static_cast<std::size_t>(m)] =
            stride[static_cast<std::size_t>(m + 1)] * states_per_mode;
    }

    space.annihilation.reserve(static_cast<std::size_t>(modes));
    space.creation.reserve(static_cast<std::size_t>(modes));
    for (int m = 0; m < modes; ++m) {
        Matrix a = Matrix::Zero(dim, dim);
        for (Eigen::Index col = 0; col < dim; ++col) {
            const int n = space.basis[static_cast<std::size_t>(col)][static_cast<std::size_t>(m)];
            if (n >= 1) {
                // a |.., n, ..> = sqrt(n) |.., n-1, ..>
                const Eigen::Index row = col - stride[static_cast<std::size_t>(m)];
                a(row, col) = std::sqrt(static_cast<double>(n));
            }
        }
        space.annihilation.push_back(a);
        space.creation.push_back(a.adjoint());
    }

    // N from the tuple sums directly: exact integers, no sqrt roundoff
    space.number = Matrix::Zero(dim, dim);
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
        int total = 0;
        for (int v : space.basis[static_cast<std::size_t>(idx)]) {
            total += v;
        }
        space.number(idx, idx) = static_cast<double>(total);
    }
    return space;
}

OperatorFamily grand_hamiltonian_family(const OperatorFamily& fam, const HermitianOperator& number,
                                        double mu) {
    if (number.dim() != fam.dim) {
        throw std::invalid_argument("grand_hamiltonian_family: number operator dimension mismatch");
    }
    OperatorFamily K;
    K.dim = fam.dim;
    K.label = fam.label + "-mu*N";
    K.domain_lo = fam.domain_lo;
    K.domain_hi = fam.domain_hi;
    const Matrix muN = mu * number.matrix();
    K.hamiltonian_at = [ham = fam.hamiltonian_at, muN](double lambda) {
        return HermitianOperator(ham(lambda).matrix() - muN);
    };
    K.derivative_at = fam.derivative_at; // N is lambda-independent
    return K;
}

GrandContext make_grand_context(const OperatorFamily& fam, const HermitianOperator& number,
                                double mu, double lambda, double beta) {
    const OperatorFamily K = grand_hamiltonian_family(fam, number, mu);
    return GrandContext{mu, number, make_context(K, lambda, beta)};
}

double grand_average(const GrandContext& gctx, const HermitianOperator& A) {
    return thermal_average(gctx.inner, A);
}

double dHG_dlambda_hft(const OperatorFamily& fam, const HermitianOperator& number, double mu,
                       double lambda, double beta) {
    const double comm = commutator_norm(fam.hamiltonian_at(lambda), number);
    if (!(comm <= 1e-10)) {
        std::ostringstream msg;
        msg << "dHG_dlambda_hft: ||[H, N]|| = " << comm
            << " exceeds 1e-10; the model is not number-conserving";
        throw std::invalid_argument(msg.str());
    }
    // [K, H] = -mu [N, H] = 0, so H is a commuting observable of the
    // K-ensemble and the canonical commuting-observable law applies verbatim
    const OperatorFamily K = grand_hamiltonian_family(fam, number, mu);
    return dA_dlambda_commuting(K, fam, lambda, beta);
}

} // namespace hft
