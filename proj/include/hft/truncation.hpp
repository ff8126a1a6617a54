#pragma once

#include "hft/family.hpp"
#include "hft/operator_core.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hft {

// Restriction of a family to the leading M x M principal submatrix in the
// fixed basis ordering. Truncation commutes with the derivative channel:
// (H')_M = (H_M)' exactly, both submatrices of the same parent evaluation.
OperatorFamily truncate(const OperatorFamily& fam, Eigen::Index M);

// Quantities a convergence sweep can track as the basis grows.
enum class SweepQuantity {
    partition,              // Z = tr e^{-beta H_M}
    mean_energy,            // <H_M>
    mean_energy_derivative, // d<H_M>/dlambda via the trace formula
    trace_function,         // tr f(H_M) for a supplied f
};

// Accepted names: "Z", "avg_H", "dH_dlambda", "trace_f". Anything else is
// rejected listing the valid names.
SweepQuantity parse_quantity(const std::string& name);
std::string quantity_name(SweepQuantity q);

struct ConvergenceRow {
    Eigen::Index M = 0;
    double value = 0.0;
    double error_vs_reference = 0.0; // |value - reference|
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows; // ascending M
    double reference = 0.0;
    std::string reference_policy; // "closed_form" or "self-reference[M=...]"
};

// Evaluates the quantity on truncate(fam, M) for each M. Ms must be
// ascending and within [1, fam.dim]. The reference is the supplied closed
// form when given, otherwise the value at the largest M; the policy in use
// is recorded in the result. trace_function requires f.
ConvergenceResult convergence_sweep(const OperatorFamily& fam, SweepQuantity q, double lambda,
                                    double beta, std::span<const Eigen::Index> Ms,
                                    std::optional<double> closed_form_reference = std::nullopt,
                                    const ScalarFunction* f = nullptr);

} // namespace hft
