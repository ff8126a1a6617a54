#include "hft/model_zoo.hpp"

#include "hft/kernels.hpp"
#include "hft/rng.hpp"

#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace hft {

// ------------------------------- oscillator ----------------------------------

Matrix oscillator_h0(Eigen::Index M) {
    if (M < 2) {
        throw std::invalid_argument("oscillator: basis size M must be >= 2");
    }
    Matrix H0 = Matrix::Zero(M, M);
    for (Eigen::Index n = 0; n < M; ++n) {
        H0(n, n) = static_cast<double>(n) + 0.5;
    }
    return H0;
}

Matrix oscillator_xsq(Eigen::Index M) {
    if (M < 2) {
        throw std::invalid_argument("oscillator: basis size M must be >= 2");
    }
    // x^2 = (a^2 + a†^2 + 2 a†a + 1)/2 in the number basis
    Matrix X = Matrix::Zero(M, M);
    for (Eigen::Index n = 0; n < M; ++n) {
        X(n, n) = (2.0 * static_cast<double>(n) + 1.0) / 2.0;
        if (n + 2 < M) {
            const double v =
                std::sqrt((static_cast<double>(n) + 1.0) * (static_cast<double>(n) + 2.0)) / 2.0;
            X(n, n + 2) = v;
            X(n + 2, n) = v;
        }
    }
    return X;
}

OperatorFamily oscillator_family(Eigen::Index M) {
    auto H0 = std::make_shared<const Matrix>(oscillator_h0(M));
    auto Xsq = std::make_shared<const Matrix>(oscillator_xsq(M));
    OperatorFamily fam;
    fam.dim = M;
    fam.label = "oscillator";
    fam.domain_lo = -1.0;
    fam.hamiltonian_at = [H0, Xsq](double lambda) {
        return HermitianOperator(*H0 + (lambda / 2.0) * *Xsq);
    };
    fam.derivative_at = [Xsq](double) { return HermitianOperator(*Xsq / 2.0); };
    return fam;
}

namespace {

void require_oscillator_domain(double lambda, double beta) {
    if (!(lambda > -1.0)) {
        std::ostringstream msg;
        msg << "oscillator closed form: lambda must satisfy lambda > -1, got " << lambda;
        throw std::domain_error(msg.str());
    }
    if (!(beta > 0.0)) {
        std::ostringstream msg;
        msg << "oscillator closed form: beta must satisfy beta > 0, got " << beta;
        throw std::domain_error(msg.str());
    }
}

} // namespace

double oscillator_closed_form_partition(double lambda, double beta) {
    require_oscillator_domain(lambda, beta);
    const double w = std::sqrt(1.0 + lambda);
    return 1.0 / (2.0 * std::sinh(beta * w / 2.0));
}

double oscillator_closed_form_H(double lambda, double beta) {
    require_oscillator_domain(lambda, beta);
    const double w = std::sqrt(1.0 + lambda);
    return w / (2.0 * std::tanh(beta * w / 2.0));
}

double oscillator_closed_form_Hprime(double lambda, double beta) {
    require_oscillator_domain(lambda, beta);
    const double w = std::sqrt(1.0 + lambda);
    return 1.0 / (4.0 * w * std::tanh(beta * w / 2.0));
}

double oscillator_closed_form_dH_dlambda(double lambda, double beta) {
    require_oscillator_domain(lambda, beta);
    const double w = std::sqrt(1.0 + lambda);
    const double s = std::sinh(beta * w / 2.0);
    return 1.0 / (4.0 * w * std::tanh(beta * w / 2.0)) - beta / (8.0 * s * s);
}

double oscillator_closed_form_dHprime_dbeta(double lambda, double beta) {
    require_oscillator_domain(lambda, beta);
    const double w = std::sqrt(1.0 + lambda);
    const double s = std::sinh(beta * w / 2.0);
    return -1.0 / (8.0 * s * s);
}

double oscillator_closed_form_dZ_dlambda(double lambda, double beta) {
    require_oscillator_domain(lambda, beta);
    const double w = std::sqrt(1.0 + lambda);
    const double s = std::sinh(beta * w / 2.0);
    return -beta * std::cosh(beta * w / 2.0) / (8.0 * w * s * s);
}

// ---------------------------- generic families --------------------------------

namespace {

// entries row-major, real part then imaginary part, from one stream
Matrix random_complex(Eigen::Index dim, SplitMix64& rng) {
    Matrix raw(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double re = rng.symmetric();
            const double im = rng.symmetric();
            raw(i, j) = Complex(re, im);
        }
    }
    return raw;
}

Matrix random_hermitian(Eigen::Index dim, SplitMix64& rng) {
    const Matrix raw = random_complex(dim, rng);
    return (raw + raw.adjoint()) / 2.0;
}

Matrix random_unitary(Eigen::Index dim, SplitMix64& rng) {
    const Matrix raw = random_complex(dim, rng);
    Eigen::HouseholderQR<Matrix> qr(raw);
    Matrix U = qr.householderQ();
    return U;
}

void require_dim(Eigen::Index dim) {
    if (dim < 2) {
        throw std::invalid_argument("family: dim must be >= 2");
    }
}

} // namespace

OperatorFamily random_hermitian_family(Eigen::Index dim, std::uint64_t seed) {
    require_dim(dim);
    SplitMix64 rng(seed);
    auto A = std::make_shared<const Matrix>(random_hermitian(dim, rng));
    auto B = std::make_shared<const Matrix>(random_hermitian(dim, rng));
    OperatorFamily fam;
    fam.dim = dim;
    fam.label = "random";
    fam.hamiltonian_at = [A, B](double lambda) { return HermitianOperator(*A + lambda * *B); };
    fam.derivative_at = [B](double) { return HermitianOperator(*B); };
    return fam;
}

namespace {

void require_multiplicities(Eigen::Index dim, std::span<const int> multiplicities) {
    Eigen::Index sum = 0;
    for (int m : multiplicities) {
        if (m < 1) {
            throw std::invalid_argument("multiplicities must be positive");
        }
        sum += m;
    }
    if (sum != dim) {
        std::ostringstream msg;
        msg << "multiplicities sum to " << sum << ", expected dim = " << dim;
        throw std::invalid_argument(msg.str());
    }
}

// family U diag(e(lambda)) U† with per-block linear eigenvalue functions
// e_k(lambda) = c_k + lambda d_k, each repeated multiplicity-many times
OperatorFamily block_spectrum_family(std::shared_ptr<const Matrix> U,
                                     std::vector<int> multiplicities, std::vector<double> c,
                                     std::vector<double> d, std::string label) {
    const Eigen::Index dim = U->rows();
    auto eigenvalues_at = [multiplicities, c, d](double lambda) {
        RealVector e(std::accumulate(multiplicities.begin(), multiplicities.end(), 0));
        Eigen::Index pos = 0;
        for (std::size_t k = 0; k < multiplicities.size(); ++k) {
            const double value = c[k] + lambda * d[k];
            for (int r = 0; r < multiplicities[k]; ++r) {
                e(pos++) = value;
            }
        }
        return e;
    };
    OperatorFamily fam;
    fam.dim = dim;
    fam.label = std::move(label);
    fam.hamiltonian_at = [U, eigenvalues_at](double lambda) {
        return HermitianOperator(kernels::congruence(*U, eigenvalues_at(lambda)));
    };
    // derivative: same blocks with e'_k = d_k
    auto slopes_at = [multiplicities, d](double) {
        RealVector e(std::accumulate(multiplicities.begin(), multiplicities.end(), 0));
        Eigen::Index pos = 0;
        for (std::size_t k = 0; k < multiplicities.size(); ++k) {
            for (int r = 0; r < multiplicities[k]; ++r) {
                e(pos++) = d[k];
            }
        }
        return e;
    };
    fam.derivative_at = [U, slopes_at](double lambda) {
        return HermitianOperator(kernels::congruence(*U, slopes_at(lambda)));
    };
    return fam;
}

} // namespace

CommutingPair commuting_pair(Eigen::Index dim, std::span<const int> multiplicities,
                             std::uint64_t seed) {
    require_dim(dim);
    require_multiplicities(dim, multiplicities);
    SplitMix64 rng(seed);
    auto U = std::make_shared<const Matrix>(random_unitary(dim, rng));
    const std::size_t blocks = multiplicities.size();
    std::vector<double> c(blocks), d(blocks), a(blocks), b(blocks);
    for (std::size_t k = 0; k < blocks; ++k) {
        c[k] = 2.0 * rng.symmetric();
        d[k] = rng.symmetric();
    }
    for (std::size_t k = 0; k < blocks; ++k) {
        a[k] = 2.0 * rng.symmetric();
        b[k] = rng.symmetric();
    }
    std::vector<int> mult(multiplicities.begin(), multiplicities.end());
    CommutingPair pair;
    pair.hamiltonian = block_spectrum_family(U, mult, c, d, "commuting");
    pair.observable = block_spectrum_family(U, mult, a, b, "commuting-observable");
    return pair;
}

OperatorFamily degenerate_family(Eigen::Index dim, std::span<const int> multiplicities,
                                 std::uint64_t seed) {
    OperatorFamily fam = commuting_pair(dim, multiplicities, seed).hamiltonian;
    fam.label = "degenerate";
    return fam;
}

std::vector<int> default_multiplicities(Eigen::Index dim) {
    static const int cycle[3] = {3, 2, 1};
    std::vector<int> mult;
    Eigen::Index remaining = dim;
    int k = 0;
    while (remaining > 0) {
        const int m = static_cast<int>(std::min<Eigen::Index>(cycle[k % 3], remaining));
        mult.push_back(m);
        remaining -= m;
        ++k;
    }
    return mult;
}

OperatorFamily constant_observable(Matrix A, std::string label) {
    auto held = std::make_shared<const Matrix>(std::move(A));
    const Eigen::Index dim = held->rows();
    OperatorFamily fam;
    fam.dim = dim;
    fam.label = std::move(label);
    fam.hamiltonian_at = [held](double) { return HermitianOperator(*held); };
    fam.derivative_at = [dim](double) { return HermitianOperator(Matrix::Zero(dim, dim)); };
    return fam;
}

OperatorFamily shifted_family(const OperatorFamily& fam, double c) {
    OperatorFamily out = fam;
    out.label = fam.label + "+shift";
    const Eigen::Index dim = fam.dim;
    out.hamiltonian_at = [inner = fam.hamiltonian_at, c, dim](double lambda) {
        return HermitianOperator(inner(lambda).matrix() +
                                 c * Matrix::Identity(dim, dim));
    };
    return out;
}

OperatorFamily broken_derivative_family(Eigen::Index dim, std::uint64_t seed) {
    require_dim(dim);
    SplitMix64 rng(seed);
    auto A = std::make_shared<const Matrix>(random_hermitian(dim, rng));
    auto B = std::make_shared<const Matrix>(random_hermitian(dim, rng));
    auto C = std::make_shared<const Matrix>(random_hermitian(dim, rng));
    OperatorFamily fam;
    fam.dim = dim;
    fam.label = "broken_derivative";
    fam.hamiltonian_at = [A, B](double lambda) { return HermitianOperator(*A + lambda * *B); };
    // wrong on purpose: the true derivative is B
    fam.derivative_at = [B, C](double) { return HermitianOperator(*B + 0.1 * *C); };
    return fam;
}

// ----------------------------- boson hopping ----------------------------------

BosonHoppingModel boson_hopping_family(int cutoff, double omega1, double omega2) {
    FockSpace space = build_boson_fock(2, cutoff);

    // diagonal part from occupation tuples directly (exact integers scaled)
    Matrix H0 = Matrix::Zero(space.dim, space.dim);
    for (Eigen::Index i = 0; i < space.dim; ++i) {
        const auto& occ = space.basis[static_cast<std::size_t>(i)];
        H0(i, i) = omega1 * occ[0] + omega2 * occ[1];
    }
    Matrix hop = kernels::multiply(space.creation[0], space.annihilation[1]) +
                 kernels::multiply(space.creation[1], space.annihilation[0]);

    auto H0p = std::make_shared<const Matrix>(std::move(H0));
    auto hopp = std::make_shared<const Matrix>(std::move(hop));

    OperatorFamily family;
    family.dim = space.dim;
    family.label = "boson_hopping";
    family.hamiltonian_at = [H0p, hopp](double lambda) {
        return HermitianOperator(*H0p + lambda * *hopp);
    };
    family.derivative_at = [hopp](double) { return HermitianOperator(*hopp); };

    HermitianOperator number(space.number);
    return BosonHoppingModel{std::move(space), std::move(family), std::move(number)};
}

// -------------------------------- registry -----------------------------------

namespace {

std::map<std::string, double> merge_params(const std::string& model,
                                           const std::map<std::string, double>& given,
                                           std::map<std::string, double> defaults) {
    for (const auto& [key, value] : given) {
        auto it = defaults.find(key);
        if (it == defaults.end()) {
            std::ostringstream msg;
            msg << "model '" << model << "' has no parameter '" << key << "'; valid:";
            if (defaults.empty()) {
                msg << " (none)";
            }
            for (const auto& entry : defaults) {
                msg << " " << entry.first;
            }
            throw std::invalid_argument(msg.str());
        }
        it->second = value;
    }
    return defaults;
}

Eigen::Index as_positive_int(const std::map<std::string, double>& params, const std::string& key,
                             Eigen::Index min_value) {
    const double v = params.at(key);
    if (!(v == std::floor(v)) || v < static_cast<double>(min_value) || v > 1e9) {
        std::ostringstream msg;
        msg << "parameter '" << key << "' must be an integer >= " << min_value << ", got " << v;
        throw std::invalid_argument(msg.str());
    }
    return static_cast<Eigen::Index>(v);
}

const double kGenericSamples[5] = {-0.7, -0.2, 0.0, 0.6, 1.3};
const double kOscillatorSamples[5] = {-0.5, 0.0, 0.7, 1.5, 3.0};
const double kBosonSamples[5] = {-0.6, -0.2, 0.0, 0.4, 0.8};

Matrix pauli_x() {
    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}
Matrix pauli_y() {
    Matrix s(2, 2);
    s << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return s;
}
Matrix pauli_z() {
    Matrix s(2, 2);
    s << 1, 0, 0, -1;
    return s;
}

} // namespace

std::vector<std::string> model_names() {
    return {"oscillator", "random",   "degenerate",    "commuting",        "constant",
            "diagonal",   "spin",     "boson_hopping", "broken_derivative"};
}

std::string model_catalog() {
    std::ostringstream out;
    out << "oscillator         M=128                            closed forms; domain lambda > -1\n"
        << "random             dim=8                            observable (non-commuting)\n"
        << "degenerate         dim=12                           observable (commuting); exact "
           "repeated eigenvalues\n"
        << "commuting          dim=8                            observable (commuting)\n"
        << "constant           dim=8                            H' = 0\n"
        << "diagonal           (no parameters)                  observable (commuting); dim 2\n"
        << "spin               (no parameters)                  observable (non-commuting); dim 2\n"
        << "boson_hopping      cutoff=6 omega1=1 omega2=1.3     number operator (grand ensemble)\n"
        << "broken_derivative  dim=8                            corrupted derivative channel; "
           "verify must fail\n";
    return out.str();
}

ModelInstance make_model(const std::string& name, const std::map<std::string, double>& params,
                         std::uint64_t seed) {
    ModelInstance model;
    model.name = name;

    if (name == "oscillator") {
        model.parameters = merge_params(name, params, {{"M", 128.0}});
        const Eigen::Index M = as_positive_int(model.parameters, "M", 2);
        model.family = oscillator_family(M);
        model.closed = ClosedForms{oscillator_closed_form_partition, oscillator_closed_form_H,
                                   oscillator_closed_form_Hprime, oscillator_closed_form_dH_dlambda};
        validate_family(model.family, kOscillatorSamples);
    } else if (name == "random") {
        model.parameters = merge_params(name, params, {{"dim", 8.0}});
        const Eigen::Index dim = as_positive_int(model.parameters, "dim", 2);
        model.family = random_hermitian_family(dim, seed);
        model.observable = random_hermitian_family(dim, seed + 1);
        model.observable->label = "random-observable";
        validate_family(model.family, kGenericSamples);
        validate_family(*model.observable, kGenericSamples);
    } else if (name == "degenerate") {
        model.parameters = merge_params(name, params, {{"dim", 12.0}});
        const Eigen::Index dim = as_positive_int(model.parameters, "dim", 2);
        const std::vector<int> mult = default_multiplicities(dim);
        CommutingPair pair = commuting_pair(dim, mult, seed);
        model.family = std::move(pair.hamiltonian);
        model.family.label = "degenerate";
        model.observable = std::move(pair.observable);
        model.observable->label = "degenerate-observable";
        validate_family(model.family, kGenericSamples);
        validate_family(*model.observable, kGenericSamples);
    } else if (name == "commuting") {
        model.parameters = merge_params(name, params, {{"dim", 8.0}});
        const Eigen::Index dim = as_positive_int(model.parameters, "dim", 2);
        const std::vector<int> mult(static_cast<std::size_t>(dim), 1);
        CommutingPair pair = commuting_pair(dim, mult, seed);
        model.family = std::move(pair.hamiltonian);
        model.observable = std::move(pair.observable);
        validate_family(model.family, kGenericSamples);
        validate_family(*model.observable, kGenericSamples);
    } else if (name == "constant") {
        model.parameters = merge_params(name, params, {{"dim", 8.0}});
        const Eigen::Index dim = as_positive_int(model.parameters, "dim", 2);
        SplitMix64 rng(seed);
        Matrix raw(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                raw(i, j) = Complex(rng.symmetric(), rng.symmetric());
            }
        }
        model.family = constant_observable((raw + raw.adjoint()) / 2.0, "constant");
        validate_family(model.family, kGenericSamples);
    } else if (name == "diagonal") {
        model.parameters = merge_params(name, params, {});
        Matrix D = Matrix::Zero(2, 2);
        D(0, 0) = 1.0;
        D(1, 1) = 2.0;
        OperatorFamily fam;
        fam.dim = 2;
        fam.label = "diagonal";
        fam.hamiltonian_at = [D](double lambda) { return HermitianOperator(lambda * D); };
        fam.derivative_at = [D](double) { return HermitianOperator(D); };
        model.family = std::move(fam);
        model.observable = constant_observable(D, "diagonal-observable");
        validate_family(model.family, kGenericSamples);
    } else if (name == "spin") {
        model.parameters = merge_params(name, params, {});
        const Matrix sx = pauli_x();
        const Matrix sz = pauli_z();
        OperatorFamily fam;
        fam.dim = 2;
        fam.label = "spin";
        fam.hamiltonian_at = [sx, sz](double lambda) { return HermitianOperator(sx + lambda * sz); };
        fam.derivative_at = [sz](double) { return HermitianOperator(sz); };
        model.family = std::move(fam);
        model.observable = constant_observable(pauli_y(), "spin-observable");
        validate_family(model.family, kGenericSamples);
    } else if (name == "boson_hopping") {
        model.parameters =
            merge_params(name, params, {{"cutoff", 6.0}, {"omega1", 1.0}, {"omega2", 1.3}});
        const Eigen::Index cutoff = as_positive_int(model.parameters, "cutoff", 1);
        BosonHoppingModel boson = boson_hopping_family(static_cast<int>(cutoff),
                                                       model.parameters.at("omega1"),
                                                       model.parameters.at("omega2"));
        model.family = std::move(boson.family);
        model.number = std::move(boson.number);
        model.observable = constant_observable(model.number->matrix(), "number-observable");
        validate_family(model.family, kBosonSamples);
    } else if (name == "broken_derivative") {
        model.parameters = merge_params(name, params, {{"dim", 8.0}});
        const Eigen::Index dim = as_positive_int(model.parameters, "dim", 2);
        model.family = broken_derivative_family(dim, seed);
        // no validation on purpose: the corrupted derivative channel must
        // reach the identity checks and fail there
    } else {
        std::ostringstream msg;
        msg << "unknown model '" << name << "'; registered models:\n" << model_catalog();
        throw std::invalid_argument(msg.str());
    }
    return model;
}

} // namespace hft
