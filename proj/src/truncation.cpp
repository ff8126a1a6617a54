#include "hft/truncation.hpp"

#include "hft/ensemble_canonical.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hft {

OperatorFamily truncate(const OperatorFamily& fam, Eigen::Index M) {
    if (M < 1 || M > fam.dim) {
        std::ostringstream msg;
        msg << "truncate: M = " << M << " out of range [1, " << fam.dim << "]";
        throw std::invalid_argument(msg.str());
    }
    OperatorFamily out;
    out.dim = M;
    out.label = fam.label;
    out.domain_lo = fam.domain_lo;
    out.domain_hi = fam.domain_hi;
    out.hamiltonian_at = [inner = fam.hamiltonian_at, M](double lambda) {
        return HermitianOperator(inner(lambda).matrix().topLeftCorner(M, M));
    };
    out.derivative_at = [inner = fam.derivative_at, M](double lambda) {
        return HermitianOperator(inner(lambda).matrix().topLeftCorner(M, M));
    };
    return out;
}

SweepQuantity parse_quantity(const std::string& name) {
    if (name == "Z") {
        return SweepQuantity::partition;
    }
    if (name == "avg_H") {
        return SweepQuantity::mean_energy;
    }
    if (name == "dH_dlambda") {
        return SweepQuantity::mean_energy_derivative;
    }
    if (name == "trace_f") {
        return SweepQuantity::trace_function;
    }
    throw std::invalid_argument("unknown quantity '" + name +
                                "'; valid: Z, avg_H, dH_dlambda, trace_f");
}

std::string quantity_name(SweepQuantity q) {
    switch (q) {
    case SweepQuantity::partition:
        return "Z";
    case SweepQuantity::mean_energy:
        return "avg_H";
    case SweepQuantity::mean_energy_derivative:
        return "dH_dlambda";
    case SweepQuantity::trace_function:
        return "trace_f";
    }
    throw std::logic_error("quantity_name: unhandled quantity");
}

namespace {

double evaluate_quantity(const OperatorFamily& fam, SweepQuantity q, double lambda, double beta,
                         const ScalarFunction* f) {
    switch (q) {
    case SweepQuantity::partition: {
        return partition_function(make_context(fam, lambda, beta));
    }
    case SweepQuantity::mean_energy: {
        const EnsembleContext ctx = make_context(fam, lambda, beta);
        double mean = 0.0;
        for (Eigen::Index i = 0; i < ctx.dim(); ++i) {
            mean += ctx.probabilities(i) * ctx.decomposition.eigenvalues(i);
        }
        return mean;
    }
    case SweepQuantity::mean_energy_derivative: {
        return dH_dlambda_hft(fam, lambda, beta);
    }
    case SweepQuantity::trace_function: {
        if (f == nullptr) {
            throw std::invalid_argument("convergence_sweep: quantity trace_f requires f");
        }
        const SpectralDecomposition dec = spectral_decompose(fam.hamiltonian_at(lambda));
        double sum = 0.0;
        for (Eigen::Index i = 0; i < dec.dim(); ++i) {
            const double v = f->value(dec.eigenvalues(i));
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "convergence_sweep: f(" << dec.eigenvalues(i) << ") is not finite";
                throw std::domain_error(msg.str());
            }
            sum += v;
        }
        return sum;
    }
    }
    throw std::logic_error("evaluate_quantity: unhandled quantity");
}

} // namespace

ConvergenceResult convergence_sweep(const OperatorFamily& fam, SweepQuantity q, double lambda,
                                    double beta, std::span<const Eigen::Index> Ms,
                                    std::optional<double> closed_form_reference,
                                    const ScalarFunction* f) {
    if (Ms.empty()) {
        throw std::invalid_argument("convergence_sweep: Ms must be non-empty");
    }
    for (std::size_t k = 0; k < Ms.size(); ++k) {
        if (Ms[k] < 1 || Ms[k] > fam.dim) {
            std::ostringstream msg;
            msg << "convergence_sweep: M = " << Ms[k] << " out of range [1, " << fam.dim << "]";
            throw std::invalid_argument(msg.str());
        }
        if (k > 0 && Ms[k] <= Ms[k - 1]) {
            throw std::invalid_argument("convergence_sweep: Ms must be strictly ascending");
        }
    }

    ConvergenceResult result;
    result.rows.reserve(Ms.size());
    for (Eigen::Index M : Ms) {
        const OperatorFamily view = truncate(fam, M);
        result.rows.push_back({M, evaluate_quantity(view, q, lambda, beta, f), 0.0});
    }

    if (closed_form_reference.has_value()) {
        result.reference = *closed_form_reference;
        result.reference_policy = "closed_form";
    } else {
        result.reference = result.rows.back().value;
        std::ostringstream policy;
        policy << "self-reference[M=" << Ms.back() << "]";
        result.reference_policy = policy.str();
    }
    for (ConvergenceRow& row : result.rows) {
        row.error_vs_reference = std::abs(row.value - result.reference);
    }
    return result;
}

} // namespace hft
