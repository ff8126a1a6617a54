#pragma once

#include "hft/ensemble_grand.hpp"
#include "hft/family.hpp"
#include "hft/operator_core.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hft {

// --------------------------- oscillator (exact) ------------------------------
//
// Harmonic oscillator with a lambda-coupled quadratic perturbation,
// H(lambda) = H0 + lambda x^2 / 2, represented in the lambda-independent
// number basis of H0 (a fixed basis is what makes the derivative identities
// non-trivial). Exact spectrum omega (n + 1/2) with omega = sqrt(1 + lambda).

// diag(n + 1/2), n = 0..M-1
Matrix oscillator_h0(Eigen::Index M);

// x^2 in the number basis: diagonal (2n+1)/2, off-diagonal (n, n+2) and
// (n+2, n) equal sqrt((n+1)(n+2))/2; real symmetric pentadiagonal
Matrix oscillator_xsq(Eigen::Index M);

// H(lambda) = H0 + lambda Xsq/2, H'(lambda) = Xsq/2, domain lambda > -1
OperatorFamily oscillator_family(Eigen::Index M);

// Closed forms in the M -> infinity limit, omega = sqrt(1 + lambda):
double oscillator_closed_form_partition(double lambda, double beta); // 1/(2 sinh(beta omega/2))
double oscillator_closed_form_H(double lambda, double beta);         // (omega/2) coth(beta omega/2)
double oscillator_closed_form_Hprime(double lambda, double beta);    // coth(beta omega/2)/(4 omega)
double oscillator_closed_form_dH_dlambda(double lambda, double beta);
double oscillator_closed_form_dHprime_dbeta(double lambda, double beta);
double oscillator_closed_form_dZ_dlambda(double lambda, double beta);

// ----------------------------- generic families ------------------------------

// H(lambda) = A + lambda B with A, B seeded random Hermitian (entries from
// SplitMix64, real/imag uniform in [-1, 1), Hermitized as (M + M†)/2);
// H' = B. Same seed, same matrices, bit for bit.
OperatorFamily random_hermitian_family(Eigen::Index dim, std::uint64_t seed);

// H(lambda) = U diag(e(lambda)) U† with a fixed seeded unitary U and one
// eigenvalue function e_k(lambda) = c_k + lambda d_k per block, repeated
// per multiplicity: exactly degenerate at every lambda.
OperatorFamily degenerate_family(Eigen::Index dim, std::span<const int> multiplicities,
                                 std::uint64_t seed);

// Simultaneously diagonalizable pair sharing one seeded unitary:
// [H(lambda), A(lambda)] = 0 for all lambda. Multiplicities as in
// degenerate_family; all-ones multiplicities give a generic spectrum.
struct CommutingPair {
    OperatorFamily hamiltonian;
    OperatorFamily observable;
};
CommutingPair commuting_pair(Eigen::Index dim, std::span<const int> multiplicities,
                             std::uint64_t seed);

// cycle 3, 2, 1, 3, 2, ... clipped to sum to dim (used by the registry)
std::vector<int> default_multiplicities(Eigen::Index dim);

// lambda-independent observable family: A(lambda) = A, A' = 0
OperatorFamily constant_observable(Matrix A, std::string label);

// H(lambda) + c I with the derivative channel unchanged (gauge shift)
OperatorFamily shifted_family(const OperatorFamily& fam, double c);

// Deliberately corrupted fixture: the declared derivative channel is
// B + 0.1 C, not the true derivative B. Identity checks must catch it.
OperatorFamily broken_derivative_family(Eigen::Index dim, std::uint64_t seed);

// -------------------------- boson hopping (2 modes) --------------------------

// H(lambda) = omega1 n1 + omega2 n2 + lambda (a†1 a2 + a†2 a1) on the
// 2-mode Fock space; H' is the hopping term. Number-conserving:
// [H(lambda), N] = 0 exactly on the truncated space.
struct BosonHoppingModel {
    FockSpace space;
    OperatorFamily family;
    HermitianOperator number;
};
BosonHoppingModel boson_hopping_family(int cutoff, double omega1, double omega2);

// -------------------------------- registry -----------------------------------

// Closed-form references in the family's exact (untruncated) limit, as
// functions of (lambda, beta); registered only where an analytic solution
// exists (the oscillator).
struct ClosedForms {
    std::function<double(double, double)> partition;
    std::function<double(double, double)> mean_H;
    std::function<double(double, double)> mean_Hprime;
    std::function<double(double, double)> dH_dlambda;
};

struct ModelInstance {
    std::string name;
    OperatorFamily family;
    std::optional<OperatorFamily> observable; // A-channel for observable laws
    std::optional<HermitianOperator> number;  // N for the grand ensemble
    std::optional<ClosedForms> closed;
    std::map<std::string, double> parameters; // effective, echoed into reports
};

// Registered names in catalog order.
std::vector<std::string> model_names();

// One line per model: name, parameter defaults, capabilities.
std::string model_catalog();

// Builds a registered model. params override per-model defaults; an unknown
// model or parameter key is rejected naming the valid choices. Every family
// except the broken fixture is validated against the finite-difference
// derivative oracle before it is returned.
ModelInstance make_model(const std::string& name, const std::map<std::string, double>& params,
                         std::uint64_t seed);

} // namespace hft
