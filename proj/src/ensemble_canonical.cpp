#include "hft/ensemble_canonical.hpp"

#include "hft/finite_diff.hpp"
#include "hft/kernels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace hft {

namespace {

void require_beta(double beta) {
    if (!(beta > 0.0)) {
        std::ostringstream msg;
        msg << "ensemble: beta must satisfy beta > 0, got " << beta;
        throw std::domain_error(msg.str());
    }
}

// <H>, <H'> and <H H'> share one context. <H H'> is evaluated as
// tr(H' (H rho)) with H rho formed spectrally, so [rho, H] = 0 holds exactly.
struct MixedAverages {
    double mean_H = 0.0;
    double mean_Hp = 0.0;
    double mean_HHp = 0.0;
};

MixedAverages mixed_averages(const EnsembleContext& ctx, const HermitianOperator& Hp) {
    if (Hp.dim() != ctx.dim()) {
        throw std::invalid_argument("mixed_averages: dimension mismatch");
    }
    MixedAverages out;
    for (Eigen::Index i = 0; i < ctx.dim(); ++i) {
        out.mean_H += ctx.probabilities(i) * ctx.decomposition.eigenvalues(i);
    }
    out.mean_Hp = real_trace_product(ctx.rho, Hp.matrix(), "<H'>");
    const RealVector ep =
        ctx.decomposition.eigenvalues.cwiseProduct(ctx.probabilities);
    const Matrix Hrho = kernels::congruence(ctx.decomposition.eigenvectors, ep);
    out.mean_HHp = real_trace_product(Hrho, Hp.matrix(), "<H H'>");
    return out;
}

} // namespace

EnsembleContext make_context(const OperatorFamily& fam, double lambda, double beta) {
    require_beta(beta);
    const HermitianOperator H = fam.hamiltonian_at(lambda);
    if (!H.matrix().allFinite()) {
        throw std::domain_error("make_context: hamiltonian has non-finite entries");
    }

    EnsembleContext ctx;
    ctx.lambda = lambda;
    ctx.beta = beta;
    ctx.hamiltonian = H.matrix();
    ctx.decomposition = spectral_decompose(H);

    const RealVector& e = ctx.decomposition.eigenvalues;
    const double e0 = e(0); // ascending
    RealVector w(e.size());
    double sum = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        w(i) = std::exp(-beta * (e(i) - e0));
        sum += w(i);
    }
    ctx.log_Z = -beta * e0 + std::log(sum);
    if (!std::isfinite(ctx.log_Z)) {
        throw std::domain_error("make_context: log partition function is not finite");
    }
    ctx.probabilities = w / sum;
    ctx.rho = kernels::congruence(ctx.decomposition.eigenvectors, ctx.probabilities);
    return ctx;
}

double partition_function(const EnsembleContext& ctx) { return std::exp(ctx.log_Z); }

double thermal_average(const EnsembleContext& ctx, const HermitianOperator& A) {
    if (A.dim() != ctx.dim()) {
        throw std::invalid_argument("thermal_average: dimension mismatch");
    }
    return real_trace_product(ctx.rho, A.matrix(), "thermal_average");
}

double dZ_dlambda(const OperatorFamily& fam, double lambda, double beta) {
    const EnsembleContext ctx = make_context(fam, lambda, beta);
    const double mean_Hp =
        real_trace_product(ctx.rho, fam.derivative_at(lambda).matrix(), "<H'>");
    return -beta * partition_function(ctx) * mean_Hp;
}

double dH_dlambda_hft(const OperatorFamily& fam, double lambda, double beta) {
    const EnsembleContext ctx = make_context(fam, lambda, beta);
    const MixedAverages av = mixed_averages(ctx, fam.derivative_at(lambda));
    return av.mean_Hp + beta * (av.mean_H * av.mean_Hp - av.mean_HHp);
}

double dHprime_dbeta(const OperatorFamily& fam, double lambda, double beta) {
    const EnsembleContext ctx = make_context(fam, lambda, beta);
    const MixedAverages av = mixed_averages(ctx, fam.derivative_at(lambda));
    return av.mean_H * av.mean_Hp - av.mean_HHp;
}

double dH_dlambda_beta_form(const OperatorFamily& fam, double lambda, double beta) {
    const EnsembleContext ctx = make_context(fam, lambda, beta);
    const double mean_Hp =
        real_trace_product(ctx.rho, fam.derivative_at(lambda).matrix(), "<H'>");
    return mean_Hp + beta * dHprime_dbeta(fam, lambda, beta);
}

double dA_dlambda_commuting(const OperatorFamily& fam, const OperatorFamily& obs, double lambda,
                            double beta) {
    const HermitianOperator H = fam.hamiltonian_at(lambda);
    const HermitianOperator A = obs.hamiltonian_at(lambda);
    const double comm = commutator_norm(H, A);
    const double scale =
        std::max(1.0, kernels::max_abs(H.matrix()) * kernels::max_abs(A.matrix()));
    if (!(comm <= 1e-10 * scale)) {
        std::ostringstream msg;
        msg << "dA_dlambda_commuting: [H, A] norm " << comm << " exceeds " << 1e-10 * scale
            << "; use dA_dlambda_general";
        throw std::invalid_argument(msg.str());
    }

    const EnsembleContext ctx = make_context(fam, lambda, beta);
    const double mean_A = thermal_average(ctx, A);
    const double mean_Ap =
        real_trace_product(ctx.rho, obs.derivative_at(lambda).matrix(), "<A'>");
    const Matrix Hp = fam.derivative_at(lambda).matrix();
    const double mean_Hp = real_trace_product(ctx.rho, Hp, "<H'>");
    const Matrix rhoA = kernels::multiply(ctx.rho, A.matrix());
    const double mean_AHp = real_trace_product(rhoA, Hp, "<A H'>");
    return mean_Ap + beta * (mean_A * mean_Hp - mean_AHp);
}

namespace {

constexpr double kMaxBetaSpectralRadius = 300.0;

void require_representable_exponential(const EnsembleContext& ctx) {
    const RealVector& e = ctx.decomposition.eigenvalues;
    const double radius = std::max(std::abs(e(0)), std::abs(e(e.size() - 1)));
    if (ctx.beta * radius > kMaxBetaSpectralRadius) {
        std::ostringstream msg;
        msg << "F_operator: beta * spectral_radius = " << ctx.beta * radius << " exceeds "
            << kMaxBetaSpectralRadius
            << "; e^{beta H} is not representable, shift the spectrum first";
        throw std::domain_error(msg.str());
    }
}

// (rho F)~_ij = beta Hp~_ij G_ij in the eigenbasis of H, where G collapses
// the product of the Boltzmann weight w_i/Z and the exp divided difference
// of F into terms of the normalized probabilities alone:
//   G_ij = sqrt(p_i p_j) sinh(d)/d,      d = beta (e_j - e_i)/2, |d| <= 1/2
//   G_ij = (p_i - p_j) / (2 d)           otherwise (no cancellation risk)
// Every entry is bounded by beta max(p) |Hp~_ij|, so the e^{+beta spread}
// scale of F itself never materializes.
Matrix weighted_F_eigenbasis(const EnsembleContext& ctx, const Matrix& Hp_eig) {
    const RealVector& e = ctx.decomposition.eigenvalues;
    const RealVector& p = ctx.probabilities;
    const Eigen::Index n = e.size();
    Matrix out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = 0.5 * ctx.beta * (e(j) - e(i));
            double g;
            if (std::abs(d) <= 0.5) {
                g = std::sqrt(p(i) * p(j)) * (d == 0.0 ? 1.0 : std::sinh(d) / d);
            } else {
                g = (p(i) - p(j)) / (2.0 * d);
            }
            out(i, j) = ctx.beta * g * Hp_eig(i, j);
        }
    }
    return out;
}

} // namespace

FOperatorDiagnostics F_operator_diagnostics(const OperatorFamily& fam, double lambda,
                                            double beta) {
    const EnsembleContext ctx = make_context(fam, lambda, beta);
    require_representable_exponential(ctx);

    const Matrix Hp = fam.derivative_at(lambda).matrix();
    const FrechetResult fr = frechet_exp(beta * ctx.hamiltonian, beta * Hp);

    const RealVector& e = ctx.decomposition.eigenvalues;
    RealVector exp_neg(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        exp_neg(i) = std::exp(-beta * e(i));
    }
    const Matrix exp_minus = kernels::congruence(ctx.decomposition.eigenvectors, exp_neg);

    FOperatorDiagnostics out;
    out.F = kernels::multiply(fr.directional, exp_minus);
    out.defining_residual =
        kernels::max_abs(fr.directional - kernels::multiply(out.F, fr.exponential));
    out.exp_scale = kernels::max_abs(fr.exponential);
    out.mean_F = real_part_checked(kernels::trace_product(ctx.rho, out.F), "<F>");
    out.beta_mean_Hp = beta * real_trace_product(ctx.rho, Hp, "<H'>");
    return out;
}

Matrix F_operator(const OperatorFamily& fam, double lambda, double beta) {
    return F_operator_diagnostics(fam, lambda, beta).F;
}

double dA_dlambda_general(const OperatorFamily& fam, const OperatorFamily& obs, double lambda,
                          double beta) {
    if (obs.dim != fam.dim) {
        throw std::invalid_argument("dA_dlambda_general: observable dimension mismatch");
    }
    const EnsembleContext ctx = make_context(fam, lambda, beta);
    const HermitianOperator A = obs.hamiltonian_at(lambda);
    const double mean_A = thermal_average(ctx, A);
    const double mean_Ap =
        real_trace_product(ctx.rho, obs.derivative_at(lambda).matrix(), "<A'>");
    const double mean_Hp =
        real_trace_product(ctx.rho, fam.derivative_at(lambda).matrix(), "<H'>");
    // <F A> = tr((rho F) A) with rho F assembled from bounded weight divided
    // differences; forming F alone would carry the e^{+beta spread} scale
    const Matrix V_adj = ctx.decomposition.eigenvectors.adjoint();
    const Matrix Hp_eig = kernels::multiply(
        V_adj, kernels::multiply(fam.derivative_at(lambda).matrix(),
                                 ctx.decomposition.eigenvectors));
    const Matrix A_eig = kernels::multiply(
        V_adj, kernels::multiply(A.matrix(), ctx.decomposition.eigenvectors));
    const Matrix rho_F = weighted_F_eigenbasis(ctx, Hp_eig);
    const double mean_FA = real_part_checked(kernels::trace_product(rho_F, A_eig), "<F A>");
    return mean_Ap + beta * mean_A * mean_Hp - mean_FA;
}

IdentityReport make_report(std::string name, double lhs, double rhs, double oracle,
                           TolerancePolicy tol, ReportParameters params) {
    IdentityReport r;
    r.identity_name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.oracle = oracle;
    r.abs_residual = std::abs(lhs - rhs);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    r.rel_residual = scale > 0.0 ? r.abs_residual / scale : 0.0;
    r.tol_abs = tol.abs;
    r.tol_rel = tol.rel;
    r.passed = r.abs_residual <= tol.abs || r.rel_residual <= tol.rel;
    r.parameters = std::move(params);
    return r;
}

IdentityReport verify_main_identity(const OperatorFamily& fam, const ScalarFunction& f,
                                    double lambda, double beta) {
    require_beta(beta);
    auto trace_f = [&](double l) {
        const SpectralDecomposition dec = spectral_decompose(fam.hamiltonian_at(l));
        double s = 0.0;
        for (Eigen::Index i = 0; i < dec.dim(); ++i) {
            const double v = f.value(dec.eigenvalues(i));
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "verify_main_identity: f(" << dec.eigenvalues(i) << ") is not finite";
                throw std::domain_error(msg.str());
            }
            s += v;
        }
        return s;
    };
    const double lhs = fd::derivative(trace_f, lambda);

    const SpectralDecomposition dec = spectral_decompose(fam.hamiltonian_at(lambda));
    const ScalarFunction df{f.derivative, nullptr, f.label + "'"};
    const HermitianOperator Df = apply_scalar_function(dec, df);
    const double rhs = real_trace_product(fam.derivative_at(lambda).matrix(), Df.matrix(),
                                          "tr(H' f'(H))");

    ReportParameters params;
    params.lambda = lambda;
    params.beta = beta;
    params.dim = fam.dim;
    params.model = fam.label;
    IdentityReport r = make_report("main_trace_identity[" + f.label + "]", lhs, rhs, lhs,
                                   TolerancePolicy{}, std::move(params));
    r.passed = r.abs_residual <= std::max(r.tol_abs, r.tol_rel * std::abs(rhs));
    return r;
}

} // namespace hft
