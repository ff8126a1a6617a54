// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here, independent of the unit suites.
#include "hft/cli.hpp"
#include "hft/ensemble_canonical.hpp"
#include "hft/ensemble_grand.hpp"
#include "hft/finite_diff.hpp"
#include "hft/kernels.hpp"
#include "hft/model_zoo.hpp"
#include "hft/rng.hpp"
#include "hft/truncation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace hft;

namespace {

int g_failures = 0;

class Criterion {
public:
    Criterion(int number, std::string title)
        : number_(number), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string& detail) {
        if (!ok && first_failure_.empty()) {
            first_failure_ = detail;
        }
        ok_ = ok_ && ok;
    }

    double elapsed_s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    void finish() {
        const double dt = elapsed_s();
        if (ok_) {
            std::printf("[PASS] criterion %d: %s (%.2f s)\n", number_, title_.c_str(), dt);
        } else {
            std::printf("[FAIL] criterion %d: %s (%.2f s) -- %s\n", number_, title_.c_str(), dt,
                        first_failure_.c_str());
            ++g_failures;
        }
    }

private:
    int number_;
    std::string title_;
    std::chrono::steady_clock::time_point start_;
    bool ok_ = true;
    std::string first_failure_;
};

bool band(double lhs, double rhs, double tol_abs = 1e-8, double tol_rel = 1e-6) {
    const double res = std::abs(lhs - rhs);
    return res <= tol_abs || res <= tol_rel * std::max(std::abs(lhs), std::abs(rhs));
}

std::string point(double lambda, double beta) {
    return "at lambda=" + std::to_string(lambda) + " beta=" + std::to_string(beta);
}

double mean_energy(const OperatorFamily& fam, double lambda, double beta) {
    const EnsembleContext ctx = make_context(fam, lambda, beta);
    return thermal_average(ctx, fam.hamiltonian_at(lambda));
}

// ---------------------------------------------------------------------------

void criterion_1() {
    Criterion c(1, "oscillator spectral averages match the closed forms");
    const OperatorFamily fam = oscillator_family(128);
    for (double lambda : {0.0, 1.0, 3.0}) {
        for (double beta : {0.5, 1.0, 2.0}) {
            const EnsembleContext ctx = make_context(fam, lambda, beta);
            const double h = thermal_average(ctx, fam.hamiltonian_at(lambda));
            const double hp = thermal_average(ctx, fam.derivative_at(lambda));
            const double h_ref = oscillator_closed_form_H(lambda, beta);
            const double hp_ref = oscillator_closed_form_Hprime(lambda, beta);
            c.check(std::abs(h - h_ref) <= 1e-8 * std::abs(h_ref), "<H> " + point(lambda, beta));
            c.check(std::abs(hp - hp_ref) <= 1e-8 * std::abs(hp_ref),
                    "<H'> " + point(lambda, beta));
        }
    }
    // the published evaluations at lambda=0, beta=1
    c.check(std::abs(oscillator_closed_form_H(0.0, 1.0) - 1.0819767) <= 5e-8,
            "published <H> digits");
    c.check(std::abs(oscillator_closed_form_Hprime(0.0, 1.0) - 0.5409884) <= 5e-8,
            "published <H'> digits");
    c.check(c.elapsed_s() < 1.0, "runtime exceeded 1 s");
    c.finish();
}

std::vector<OperatorFamily> criterion_2_families() {
    std::vector<OperatorFamily> fams;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        fams.push_back(random_hermitian_family(40, seed));
    }
    static const int mults[] = {3, 2, 1, 3, 2, 1}; // sums to 12, one block of 3
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        fams.emplace_back(degenerate_family(12, mults, seed));
    }
    return fams;
}

void criterion_2(const std::vector<OperatorFamily>& fams) {
    Criterion c(2, "canonical energy derivative matches the finite-difference oracle");
    for (const OperatorFamily& fam : fams) {
        for (double lambda : {-0.5, 0.0, 0.7}) {
            for (double beta : {0.5, 2.0}) {
                const double oracle = fd::derivative(
                    [&](double l) { return mean_energy(fam, l, beta); }, lambda);
                const double formula = dH_dlambda_hft(fam, lambda, beta);
                c.check(band(oracle, formula),
                        fam.label + " " + point(lambda, beta));
            }
        }
    }
    c.check(c.elapsed_s() < 30.0, "runtime exceeded 30 s");
    c.finish();
}

void criterion_3(const std::vector<OperatorFamily>& fams) {
    Criterion c(3, "beta-derivative identity and the beta-form recomposition");
    for (const OperatorFamily& fam : fams) {
        for (double lambda : {-0.5, 0.0, 0.7}) {
            for (double beta : {0.5, 2.0}) {
                const double oracle = fd::derivative(
                    [&](double b) {
                        return thermal_average(make_context(fam, lambda, b),
                                               fam.derivative_at(lambda));
                    },
                    beta);
                c.check(band(oracle, dHprime_dbeta(fam, lambda, beta)),
                        fam.label + " d<H'>/dbeta " + point(lambda, beta));
                const double direct = dH_dlambda_hft(fam, lambda, beta);
                const double recomposed = dH_dlambda_beta_form(fam, lambda, beta);
                c.check(std::abs(direct - recomposed) <=
                            1e-12 * std::max({1.0, std::abs(direct), std::abs(recomposed)}),
                        fam.label + " beta-form " + point(lambda, beta));
            }
        }
    }
    c.finish();
}

void criterion_4() {
    Criterion c(4, "commuting-observable law with rejection of non-commuting pairs");
    // diagonal fixture
    {
        RealVector hc(4), hd(4), ac(4), ad(4);
        hc << 0.0, 0.7, 1.4, 2.2;
        hd << 1.0, -0.5, 0.25, 0.8;
        ac << 0.3, -1.0, 0.5, 1.2;
        ad << -0.2, 0.6, 1.1, -0.4;
        Matrix h0 = Matrix(hc.cast<Complex>().asDiagonal());
        Matrix h1 = Matrix(hd.cast<Complex>().asDiagonal());
        Matrix a0 = Matrix(ac.cast<Complex>().asDiagonal());
        Matrix a1 = Matrix(ad.cast<Complex>().asDiagonal());
        OperatorFamily fam, obs;
        fam.dim = obs.dim = 4;
        fam.label = "diagonal";
        obs.label = "diagonal-observable";
        fam.hamiltonian_at = [h0, h1](double l) { return HermitianOperator(h0 + l * h1); };
        fam.derivative_at = [h1](double) { return HermitianOperator(h1); };
        obs.hamiltonian_at = [a0, a1](double l) { return HermitianOperator(a0 + l * a1); };
        obs.derivative_at = [a1](double) { return HermitianOperator(a1); };
        const double oracle = fd::derivative(
            [&](double l) {
                return thermal_average(make_context(fam, l, 1.3), obs.hamiltonian_at(l));
            },
            0.4);
        c.check(band(oracle, dA_dlambda_commuting(fam, obs, 0.4, 1.3)), "diagonal fixture");
    }
    // simultaneously diagonalizable fixtures, dim <= 10
    for (Eigen::Index dim : {6, 10}) {
        const CommutingPair pair =
            commuting_pair(dim, std::vector<int>(static_cast<std::size_t>(dim), 1), 7);
        for (double beta : {0.6, 1.8}) {
            const double oracle = fd::derivative(
                [&](double l) {
                    return thermal_average(make_context(pair.hamiltonian, l, beta),
                                           pair.observable.hamiltonian_at(l));
                },
                0.25);
            c.check(band(oracle, dA_dlambda_commuting(pair.hamiltonian, pair.observable, 0.25,
                                                      beta)),
                    "shared-basis pair dim " + std::to_string(dim));
        }
    }
    // rejection with the commutator norm reported
    bool rejected = false;
    try {
        dA_dlambda_commuting(random_hermitian_family(6, 8), random_hermitian_family(6, 9), 0.1,
                             1.0);
    } catch (const std::invalid_argument& e) {
        rejected = std::string(e.what()).find("norm") != std::string::npos;
    }
    c.check(rejected, "non-commuting pair was not rejected with the norm");
    c.finish();
}

void criterion_5() {
    Criterion c(5, "general observable law through the F operator");
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const OperatorFamily fam = random_hermitian_family(6, seed);
        const OperatorFamily obs = random_hermitian_family(6, seed + 400);
        const double beta = (seed % 2 == 0) ? 0.8 : 1.5; // both within beta <= 1.5
        const double lambda = 0.3;
        const double oracle = fd::derivative(
            [&](double l) {
                return thermal_average(make_context(fam, l, beta), obs.hamiltonian_at(l));
            },
            lambda);
        c.check(band(oracle, dA_dlambda_general(fam, obs, lambda, beta)),
                "general law seed " + std::to_string(seed));
        const FOperatorDiagnostics diag = F_operator_diagnostics(fam, lambda, beta);
        c.check(diag.defining_residual <= 1e-9,
                "F defining residual seed " + std::to_string(seed));
    }
    // agreement with the commuting law on a commuting fixture
    const CommutingPair pair = commuting_pair(8, std::vector<int>(8, 1), 21);
    for (double beta : {0.7, 1.4}) {
        const double a = dA_dlambda_commuting(pair.hamiltonian, pair.observable, 0.2, beta);
        const double b = dA_dlambda_general(pair.hamiltonian, pair.observable, 0.2, beta);
        c.check(std::abs(a - b) <= 1e-8, "commuting agreement at beta " + std::to_string(beta));
    }
    c.finish();
}

void criterion_6() {
    Criterion c(6, "main trace identity for three function classes");
    static const int mults[] = {3, 2, 1, 2};
    const OperatorFamily fams[] = {
        random_hermitian_family(8, 31),
        degenerate_family(8, mults, 32),
    };
    const double beta = 1.2, lambda = 0.35;
    SplitMix64 rng(97);
    std::vector<double> coeffs;
    for (int k = 0; k < 6; ++k) coeffs.push_back(rng.symmetric());
    for (const OperatorFamily& fam : fams) {
        const ScalarFunction funcs[] = {
            ScalarFunction::boltzmann(beta),
            ScalarFunction::x_boltzmann(beta),
            ScalarFunction::polynomial(coeffs),
        };
        for (const ScalarFunction& f : funcs) {
            const IdentityReport r = verify_main_identity(fam, f, lambda, beta);
            c.check(r.passed, fam.label + " f=" + f.label);
        }
        // the Boltzmann case is the partition derivative
        const IdentityReport r =
            verify_main_identity(fam, ScalarFunction::boltzmann(beta), lambda, beta);
        c.check(std::abs(r.lhs - r.rhs) <= 1e-6 * std::max(std::abs(r.lhs), std::abs(r.rhs)),
                fam.label + " Z' against the finite-difference oracle");
        const double dz = dZ_dlambda(fam, lambda, beta);
        c.check(std::abs(r.rhs - dz) <= 1e-6 * std::max(1.0, std::abs(dz)),
                fam.label + " Z' against the trace formula");
    }
    c.finish();
}

void criterion_7() {
    Criterion c(7, "grand-canonical energy derivative on the hopping model");
    const BosonHoppingModel model = boson_hopping_family(6, 1.0, 1.3);
    for (double mu : {-0.5, 0.2}) {
        for (double lambda : {0.0, 0.4}) {
            for (double beta : {1.0, 2.0}) {
                const double oracle = fd::derivative(
                    [&](double l) {
                        const GrandContext g =
                            make_grand_context(model.family, model.number, mu, l, beta);
                        return grand_average(g, model.family.hamiltonian_at(l));
                    },
                    lambda);
                const double formula =
                    dHG_dlambda_hft(model.family, model.number, mu, lambda, beta);
                c.check(band(oracle, formula),
                        "mu=" + std::to_string(mu) + " " + point(lambda, beta));
            }
        }
    }
    for (double lambda : {0.0, 0.4}) {
        for (double beta : {1.0, 2.0}) {
            const double grand = dHG_dlambda_hft(model.family, model.number, 0.0, lambda, beta);
            const double canonical = dH_dlambda_hft(model.family, lambda, beta);
            c.check(std::abs(grand - canonical) <= 1e-10,
                    "mu=0 reduction " + point(lambda, beta));
        }
    }
    c.check(c.elapsed_s() < 20.0, "runtime exceeded 20 s");
    c.finish();
}

void criterion_8() {
    Criterion c(8, "truncation errors shrink to the closed-form references");
    const OperatorFamily fam = oscillator_family(128);
    const Eigen::Index Ms[] = {8, 16, 32, 64, 128};
    struct Track {
        SweepQuantity q;
        double reference;
        const char* name;
    };
    const Track tracks[] = {
        {SweepQuantity::mean_energy, oscillator_closed_form_H(0.0, 1.0), "<H>"},
        {SweepQuantity::mean_energy_derivative, oscillator_closed_form_dH_dlambda(0.0, 1.0),
         "d<H>/dlambda"},
    };
    for (const Track& t : tracks) {
        const ConvergenceResult res =
            convergence_sweep(fam, t.q, 0.0, 1.0, Ms, t.reference);
        for (std::size_t i = 1; i < res.rows.size(); ++i) {
            if (res.rows[i].M >= 16) {
                c.check(res.rows[i].error_vs_reference <= res.rows[i - 1].error_vs_reference,
                        std::string(t.name) + " error grew at M=" +
                            std::to_string(res.rows[i].M));
            }
        }
        c.check(res.rows.back().error_vs_reference <= 1e-9,
                std::string(t.name) + " final error above 1e-9");
    }
    // the analytic derivative evaluates near 0.08065 at lambda=0, beta=1
    c.check(std::abs(oscillator_closed_form_dH_dlambda(0.0, 1.0) - 0.0806542) <= 5e-6,
            "analytic derivative value");
    c.finish();
}

void criterion_9() {
    Criterion c(9, "algebraic property suites");
    // cyclic trace on an operator word
    {
        const Matrix A = random_hermitian_family(6, 41).hamiltonian_at(0.1).matrix();
        const Matrix B = random_hermitian_family(6, 42).hamiltonian_at(0.2).matrix();
        const Matrix C = random_hermitian_family(6, 43).hamiltonian_at(0.3).matrix();
        const Complex abc = trace(kernels::multiply(kernels::multiply(A, B), C));
        const Complex cab = trace(kernels::multiply(kernels::multiply(C, A), B));
        c.check(std::abs(abc - cab) <= 1e-10 * std::max(1.0, std::abs(abc)), "cyclic trace");
    }
    // Frechet cross-validation: block method against the spectral construction
    for (std::uint64_t seed = 51; seed <= 55; ++seed) {
        const Matrix X = random_hermitian_family(7, seed).hamiltonian_at(0.4).matrix();
        const Matrix E = random_hermitian_family(7, seed + 30).hamiltonian_at(0.4).matrix();
        const Matrix block = frechet_exp(X, E).directional;
        const Matrix spectral =
            frechet_exp_spectral(spectral_decompose(HermitianOperator(X)), E);
        c.check(kernels::max_abs(block - spectral) <=
                    1e-10 * std::max(1.0, kernels::max_abs(block)),
                "Frechet cross-validation seed " + std::to_string(seed));
    }
    // <H H'> = <H' H>
    {
        const OperatorFamily fam = random_hermitian_family(8, 61);
        const EnsembleContext ctx = make_context(fam, 0.45, 1.2);
        const Matrix H = ctx.hamiltonian;
        const Matrix Hp = fam.derivative_at(0.45).matrix();
        const double hhp = real_trace_product(kernels::multiply(ctx.rho, H), Hp, "<HH'>");
        const double hph = real_trace_product(kernels::multiply(ctx.rho, Hp), H, "<H'H>");
        c.check(std::abs(hhp - hph) <= 1e-10 * std::max(1.0, std::abs(hhp)),
                "mixed-average symmetry");
    }
    // gauge-shift covariance
    {
        const OperatorFamily fam = random_hermitian_family(6, 71);
        const OperatorFamily moved = shifted_family(fam, 2.3);
        const double lambda = 0.3, beta = 1.1;
        c.check(std::abs(dH_dlambda_hft(fam, lambda, beta) -
                         dH_dlambda_hft(moved, lambda, beta)) <= 1e-9,
                "gauge shift of the energy derivative");
        const double z0 = make_context(fam, lambda, beta).log_Z;
        const double z1 = make_context(moved, lambda, beta).log_Z;
        c.check(std::abs(z1 - (z0 - beta * 2.3)) <= 1e-10, "gauge shift of log Z");
    }
    c.finish();
}

void criterion_10() {
    Criterion c(10, "full command-line run exits 0, corrupted fixture exits 1");
    const std::string dir = "/tmp/hft_acceptance_";
    int idx = 0;
    auto run_ok = [&](std::vector<std::string> args) {
        args.push_back("--out");
        args.push_back(dir + std::to_string(idx++) + ".out");
        const int code = cli::run(args);
        std::string joined;
        for (const auto& a : args) joined += a + " ";
        c.check(code == 0, "exit " + std::to_string(code) + " from: " + joined);
    };
    // criterion 1/8 models through the CLI
    run_ok({"verify", "--model", "oscillator", "--set", "M=128", "--lambda-list", "0,1,3",
            "--beta-list", "0.5,1,2"});
    run_ok({"sweep", "--model", "oscillator", "--set", "M=128", "--lambda-list", "0,1,3",
            "--beta-list", "0.5,1,2", "--format", "json"});
    run_ok({"converge", "--model", "oscillator", "--ms", "8,16,32,64,128", "--quantity", "avg_H",
            "--lambda-list", "0", "--beta-list", "1"});
    run_ok({"converge", "--model", "oscillator", "--ms", "8,16,32,64,128", "--quantity",
            "dH_dlambda", "--lambda-list", "0", "--beta-list", "1"});
    // criterion 2/3 families, sampled seeds
    for (const char* seed : {"1", "2", "3", "4", "5"}) {
        run_ok({"verify", "--model", "random", "--set", "dim=40", "--lambda-list", "-0.5,0,0.7",
                "--beta-list", "0.5,2", "--seed", seed});
        run_ok({"verify", "--model", "degenerate", "--lambda-list", "-0.5,0,0.7", "--beta-list",
                "0.5,2", "--seed", seed});
    }
    // criterion 4/5/6 observable laws
    run_ok({"verify", "--model", "commuting", "--lambda-list", "-0.4,0.25", "--beta-list",
            "0.6,1.8"});
    run_ok({"verify", "--model", "diagonal", "--lambda-list", "0.4", "--beta-list", "1.3"});
    run_ok({"verify", "--model", "spin", "--lambda-list", "0,0.3", "--beta-list", "1.2"});
    run_ok({"verify", "--model", "constant", "--lambda-list", "0.5", "--beta-list", "1"});
    // criterion 7 grand ensemble
    run_ok({"verify", "--model", "boson_hopping", "--lambda-list", "0,0.4", "--beta-list", "1,2",
            "--mu", "-0.5"});
    run_ok({"verify", "--model", "boson_hopping", "--lambda-list", "0,0.4", "--beta-list", "1,2",
            "--mu", "0.2"});
    // the corrupted fixture must fail through the same path
    const int broken = cli::run({"verify", "--model", "broken_derivative", "--lambda-list", "0.3",
                                 "--beta-list", "1", "--out", dir + "broken.out"});
    c.check(broken == 1, "corrupted fixture exited " + std::to_string(broken));
    c.check(c.elapsed_s() < 60.0, "runtime exceeded 60 s");
    c.finish();
}

} // namespace

int main() {
    criterion_1();
    const std::vector<OperatorFamily> fams = criterion_2_families();
    criterion_2(fams);
    criterion_3(fams);
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 10 criteria passed\n");
    return 0;
}
