#pragma once

#include "hft/family.hpp"
#include "hft/operator_core.hpp"

#include <optional>
#include <string>

namespace hft {

// Default pass band for identity checks: absolute or relative.
struct TolerancePolicy {
    double abs = 1e-8;
    double rel = 1e-6;
};

// ------------------------------ EnsembleContext -----------------------------

// Immutable snapshot of one canonical state. All Boltzmann weights are
// computed as e^{-beta (e_i - e_0)} with e_0 the lowest eigenvalue; the
// partition function is carried as log_Z = -beta e_0 + log sum_i w_i, so no
// intermediate overflows for desk-scale spectra.
struct EnsembleContext {
    double lambda = 0.0;
    double beta = 0.0;
    SpectralDecomposition decomposition;
    double log_Z = 0.0;
    RealVector probabilities; // w_i / sum w, sums to 1
    Matrix rho;               // density matrix e^{-beta H} / Z
    Matrix hamiltonian;       // H(lambda)

    Eigen::Index dim() const { return decomposition.dim(); }
};

EnsembleContext make_context(const OperatorFamily& fam, double lambda, double beta);

// Z = e^{log_Z}
double partition_function(const EnsembleContext& ctx);

// tr(rho A); the imaginary residue is checked then stripped.
double thermal_average(const EnsembleContext& ctx, const HermitianOperator& A);

// ------------------------- derivative identities ----------------------------
//
// All left-hand derivatives have finite-difference companions in the test
// suite; the functions below return the trace-formula side.

// dZ/dlambda = -beta tr(H' e^{-beta H}), evaluated as -beta Z <H'>.
double dZ_dlambda(const OperatorFamily& fam, double lambda, double beta);

// d<H>/dlambda = <H'> + beta (<H><H'> - <H H'>)
double dH_dlambda_hft(const OperatorFamily& fam, double lambda, double beta);

// d<H'>/dbeta = <H><H'> - <H H'>
double dHprime_dbeta(const OperatorFamily& fam, double lambda, double beta);

// d<H>/dlambda = <H'> + beta d<H'>/dbeta (same averages recomposed; agrees
// with dH_dlambda_hft up to floating-point reassociation)
double dH_dlambda_beta_form(const OperatorFamily& fam, double lambda, double beta);

// d<A>/dlambda = <A'> + beta (<A><H'> - <A H'>) for [H, A] = 0. The
// commutator is checked first; a violation is a rejection reporting the
// norm, signalling that the general form must be used instead.
double dA_dlambda_commuting(const OperatorFamily& fam, const OperatorFamily& obs, double lambda,
                            double beta);

// F from d/dlambda e^{beta H} = F e^{beta H}, computed as
// L(beta H, beta H') e^{-beta H}. Rejects beta * spectral_radius > 300,
// where e^{beta H} is not representable in double precision; shift the
// spectrum before calling in that case.
Matrix F_operator(const OperatorFamily& fam, double lambda, double beta);

// max-norm residual of the defining relation, ||L - F e^{beta H}||, and the
// scale ||e^{beta H}|| it is measured against
struct FOperatorDiagnostics {
    Matrix F;
    double defining_residual = 0.0;
    double exp_scale = 0.0;
    double mean_F = 0.0;       // <F>, equals beta <H'> analytically
    double beta_mean_Hp = 0.0; // beta <H'>
};
FOperatorDiagnostics F_operator_diagnostics(const OperatorFamily& fam, double lambda, double beta);

// d<A>/dlambda = <A'> + beta <A><H'> - <F A>, no commutation requirement.
// <F A> is contracted in the eigenbasis from divided differences of the
// Boltzmann weights, so the e^{+beta H} scale of F itself never appears and
// no spectral-radius restriction applies.
double dA_dlambda_general(const OperatorFamily& fam, const OperatorFamily& obs, double lambda,
                          double beta);

// ------------------------------ IdentityReport ------------------------------

struct ReportParameters {
    double lambda = 0.0;
    double beta = 0.0;
    std::optional<double> mu;
    Eigen::Index dim = 0;
    std::string model;
    std::uint64_t seed = 0;
};

// Record of one identity check. By convention lhs is the derivative side
// (estimated independently), rhs the trace-formula side, and oracle the
// independent estimate backing lhs.
struct IdentityReport {
    std::string identity_name;
    double lhs = 0.0;
    double rhs = 0.0;
    double oracle = 0.0;
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    double tol_abs = 0.0;
    double tol_rel = 0.0;
    bool passed = false;
    ReportParameters parameters;
};

IdentityReport make_report(std::string name, double lhs, double rhs, double oracle,
                           TolerancePolicy tol, ReportParameters params);

// d/dlambda tr f(H) = tr[H' f'(H)]: lhs is the central finite difference of
// tr f(H(lambda)) over lambda, rhs the trace formula. Passes when
// |lhs - rhs| <= max(1e-8, 1e-6 |rhs|).
IdentityReport verify_main_identity(const OperatorFamily& fam, const ScalarFunction& f,
                                    double lambda, double beta);

} // namespace hft
