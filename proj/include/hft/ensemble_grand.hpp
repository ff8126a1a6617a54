#pragma once

#include "hft/ensemble_canonical.hpp"
#include "hft/family.hpp"
#include "hft/operator_core.hpp"

#include <vector>

namespace hft {

// ------------------------------- FockSpace -----------------------------------

// Bosonic Fock space with a hard per-mode occupation cutoff. The basis is
// the lexicographically ordered list of occupation tuples (first mode most
// significant), fixed so serialized operators are byte-stable. On the
// truncated space [a_i, a†_i] = I except the highest-occupation diagonal
// entry of mode i, which is -cutoff (truncation artifact).
struct FockSpace {
    int modes = 0;
    int cutoff = 0;                      // max occupation, same for every mode
    Eigen::Index dim = 0;                // (cutoff + 1)^modes
    std::vector<std::vector<int>> basis; // occupation tuples, lexicographic
    std::vector<Matrix> creation;        // a†_i per mode
    std::vector<Matrix> annihilation;    // a_i per mode
    Matrix number;                       // N = sum_i a†_i a_i, exact tuple sums
};

// Rejects dim = (cutoff+1)^modes > 4096, reporting the computed dim.
FockSpace build_boson_fock(int modes, int cutoff);

// ------------------------------ GrandContext ---------------------------------

// Grand-canonical state: a canonical context built on K = H - mu N. All
// grand averages [A]_G = tr(rho_G A) reduce to canonical averages under K.
struct GrandContext {
    double mu = 0.0;
    HermitianOperator number;
    EnsembleContext inner; // canonical context on K

    Eigen::Index dim() const { return inner.dim(); }
};

// K(lambda) = H(lambda) - mu N with K' = H' (N is lambda-independent).
OperatorFamily grand_hamiltonian_family(const OperatorFamily& fam, const HermitianOperator& number,
                                        double mu);

GrandContext make_grand_context(const OperatorFamily& fam, const HermitianOperator& number,
                                double mu, double lambda, double beta);

// [A]_G = tr(rho_G A)
double grand_average(const GrandContext& gctx, const HermitianOperator& A);

// d[H]_G/dlambda = [H']_G + beta([H]_G [H']_G - [H H']_G). Requires the
// number-conserving hypothesis ||[H(lambda), N]|| <= 1e-10; then [K, H] = 0
// and the commuting-observable law applies with K in the role of the
// Hamiltonian and H in the role of the observable (K' = H').
double dHG_dlambda_hft(const OperatorFamily& fam, const HermitianOperator& number, double mu,
                       double lambda, double beta);

} // namespace hft
