#include "hft/cli.hpp"

#include "hft/ensemble_canonical.hpp"
#include "hft/ensemble_grand.hpp"
#include "hft/finite_diff.hpp"
#include "hft/kernels.hpp"
#include "hft/model_zoo.hpp"
#include "hft/rng.hpp"
#include "hft/truncation.hpp"
#include "hft/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace hft::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

// Any violation of the usage contract: maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 17 significant digits round-trip doubles exactly
std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + text + "' is not a number");
    }
}

long parse_long(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + text + "' is not an integer");
    }
}

// "a:b:n" -> n evenly spaced values from a to b (stop >= start, count >= 1)
std::vector<double> parse_range(const std::string& text, const std::string& axis) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
        throw ConfigError(axis + " range must be start:stop:count, got '" + text + "'");
    }
    const double a = parse_double(parts[0], axis + " start");
    const double b = parse_double(parts[1], axis + " stop");
    const long n = parse_long(parts[2], axis + " count");
    if (n < 1) {
        throw ConfigError(axis + " count must be >= 1, got " + parts[2]);
    }
    if (!(b >= a)) {
        throw ConfigError(axis + " range requires stop >= start, got '" + text + "'");
    }
    std::vector<double> values(static_cast<std::size_t>(n));
    if (n == 1) {
        values[0] = a;
    } else {
        for (long k = 0; k < n; ++k) {
            values[static_cast<std::size_t>(k)] =
                a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
        }
        values.back() = b;
    }
    return values;
}

std::vector<double> parse_value_list(const std::string& text, const std::string& axis) {
    std::vector<double> values;
    for (const std::string& part : split(text, ',')) {
        values.push_back(parse_double(part, axis + " list entry"));
    }
    if (values.empty()) {
        throw ConfigError(axis + " list must be non-empty");
    }
    return values;
}

std::vector<Eigen::Index> parse_ms(const std::string& text) {
    std::vector<Eigen::Index> ms;
    for (const std::string& part : split(text, ',')) {
        const long v = parse_long(part, "--ms entry");
        if (v < 1) {
            throw ConfigError("--ms entries must be >= 1, got " + part);
        }
        ms.push_back(static_cast<Eigen::Index>(v));
    }
    return ms;
}

void apply_set_entries(const std::vector<std::string>& entries,
                       std::map<std::string, double>& params) {
    for (const std::string& entry : entries) {
        const auto pos = entry.find('=');
        if (pos == std::string::npos || pos == 0) {
            throw ConfigError("--set expects key=value, got '" + entry + "'");
        }
        const std::string key = entry.substr(0, pos);
        params[key] = parse_double(entry.substr(pos + 1), "--set " + key);
    }
}

// ------------------------------- config file ---------------------------------

void apply_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const ordered_json::parse_error& e) {
        throw ConfigError(std::string("config file '") + path + "': " + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config file '" + path + "' must hold a JSON object");
    }
    if (doc.contains("lambda") && doc.contains("lambda_list")) {
        throw ConfigError("config file sets both 'lambda' and 'lambda_list'");
    }
    if (doc.contains("beta") && doc.contains("beta_list")) {
        throw ConfigError("config file sets both 'beta' and 'beta_list'");
    }
    for (const auto& [key, value] : doc.items()) {
        if (key == "model") {
            cfg.model = value.get<std::string>();
        } else if (key == "set") {
            if (!value.is_object()) {
                throw ConfigError("config key 'set' must be an object of numbers");
            }
            for (const auto& [pkey, pval] : value.items()) {
                if (!pval.is_number()) {
                    throw ConfigError("config parameter '" + pkey + "' must be a number");
                }
                cfg.params[pkey] = pval.get<double>();
            }
        } else if (key == "lambda") {
            cfg.lambdas = parse_range(value.get<std::string>(), "lambda");
        } else if (key == "lambda_list") {
            if (!value.is_array() || value.empty()) {
                throw ConfigError("config key 'lambda_list' must be a non-empty array");
            }
            cfg.lambdas = value.get<std::vector<double>>();
        } else if (key == "beta") {
            cfg.betas = parse_range(value.get<std::string>(), "beta");
        } else if (key == "beta_list") {
            if (!value.is_array() || value.empty()) {
                throw ConfigError("config key 'beta_list' must be a non-empty array");
            }
            cfg.betas = value.get<std::vector<double>>();
        } else if (key == "mu") {
            cfg.mu = value.get<double>();
        } else if (key == "format") {
            cfg.format = value.get<std::string>();
        } else if (key == "out") {
            cfg.out = value.get<std::string>();
        } else if (key == "seed") {
            cfg.seed = value.get<std::uint64_t>();
        } else if (key == "ms") {
            if (!value.is_array() || value.empty()) {
                throw ConfigError("config key 'ms' must be a non-empty array of integers");
            }
            cfg.ms.clear();
            for (const auto& m : value) {
                if (!m.is_number_integer() || m.get<long>() < 1) {
                    throw ConfigError("config key 'ms' entries must be integers >= 1");
                }
                cfg.ms.push_back(static_cast<Eigen::Index>(m.get<long>()));
            }
        } else if (key == "quantity") {
            cfg.quantity = value.get<std::string>();
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

// ------------------------------ flag plumbing --------------------------------

struct RawFlags {
    std::string model;
    std::vector<std::string> sets;
    std::string lambda_range;
    std::string lambda_list;
    std::string beta_range;
    std::string beta_list;
    double mu = 0.0;
    std::string format;
    std::string out;
    std::uint64_t seed = 1;
    std::string config;
    std::string ms;
    std::string quantity;
};

void add_common_options(CLI::App* sub, RawFlags& raw) {
    sub->add_option("--model", raw.model, "registered model name (see the models subcommand)");
    sub->add_option("--set", raw.sets, "model parameter key=value (repeatable)");
    sub->add_option("--lambda", raw.lambda_range, "lambda range start:stop:count");
    sub->add_option("--lambda-list", raw.lambda_list, "explicit lambda values v1,v2,...");
    sub->add_option("--beta", raw.beta_range, "beta range start:stop:count");
    sub->add_option("--beta-list", raw.beta_list, "explicit beta values v1,v2,...");
    sub->add_option("--mu", raw.mu, "chemical potential (grand-canonical models)");
    sub->add_option("--format", raw.format, "output format: csv or json (default csv)");
    sub->add_option("--out", raw.out, "output path (default standard output)");
    sub->add_option("--seed", raw.seed, "seed for model construction (default 1)");
    sub->add_option("--config", raw.config, "JSON config file; flags override its values");
}

RunConfig resolve_config(CLI::App* sub, const std::string& command, const RawFlags& raw) {
    RunConfig cfg;
    cfg.command = command;
    if (sub->count("--config") > 0) {
        apply_config_file(raw.config, cfg);
    }

    if (sub->count("--lambda") > 0 && sub->count("--lambda-list") > 0) {
        throw ConfigError("--lambda and --lambda-list are mutually exclusive");
    }
    if (sub->count("--beta") > 0 && sub->count("--beta-list") > 0) {
        throw ConfigError("--beta and --beta-list are mutually exclusive");
    }

    if (sub->count("--model") > 0) {
        cfg.model = raw.model;
    }
    apply_set_entries(raw.sets, cfg.params);
    if (sub->count("--lambda") > 0) {
        cfg.lambdas = parse_range(raw.lambda_range, "lambda");
    }
    if (sub->count("--lambda-list") > 0) {
        cfg.lambdas = parse_value_list(raw.lambda_list, "lambda");
    }
    if (sub->count("--beta") > 0) {
        cfg.betas = parse_range(raw.beta_range, "beta");
    }
    if (sub->count("--beta-list") > 0) {
        cfg.betas = parse_value_list(raw.beta_list, "beta");
    }
    if (sub->count("--mu") > 0) {
        cfg.mu = raw.mu;
    }
    if (sub->count("--format") > 0) {
        cfg.format = raw.format;
    }
    if (sub->count("--out") > 0) {
        cfg.out = raw.out;
    }
    if (sub->count("--seed") > 0) {
        cfg.seed = raw.seed;
    }
    if (sub->get_option_no_throw("--ms") != nullptr && sub->count("--ms") > 0) {
        cfg.ms = parse_ms(raw.ms);
    }
    if (sub->get_option_no_throw("--quantity") != nullptr && sub->count("--quantity") > 0) {
        cfg.quantity = raw.quantity;
    }

    if (cfg.format != "csv" && cfg.format != "json") {
        throw ConfigError("--format must be csv or json, got '" + cfg.format + "'");
    }
    if (command != "models" && cfg.model.empty()) {
        throw ConfigError("--model is required; registered models:\n" + model_catalog());
    }
    for (double beta : cfg.betas) {
        if (!(beta > 0.0)) {
            throw ConfigError("beta must satisfy beta > 0, got " + format_double(beta));
        }
    }
    return cfg;
}

// -------------------------------- emission -----------------------------------

void write_output(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open output file '" + cfg.out + "'");
    }
    out << text;
}

std::string csv_cell(const ordered_json& value) {
    if (value.is_null()) {
        return "";
    }
    if (value.is_string()) {
        return value.get<std::string>();
    }
    if (value.is_boolean()) {
        return value.get<bool>() ? "true" : "false";
    }
    if (value.is_number_integer()) {
        return std::to_string(value.get<long long>());
    }
    if (value.is_number_unsigned()) {
        return std::to_string(value.get<unsigned long long>());
    }
    return format_double(value.get<double>());
}

std::string render_csv(const std::vector<std::string>& columns,
                       const std::vector<ordered_json>& rows) {
    std::ostringstream out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out << (c ? "," : "") << columns[c];
    }
    out << "\n";
    for (const ordered_json& row : rows) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out << (c ? "," : "") << csv_cell(row.at(columns[c]));
        }
        out << "\n";
    }
    return out.str();
}

ordered_json params_json(const std::map<std::string, double>& params) {
    ordered_json obj = ordered_json::object();
    for (const auto& [key, value] : params) {
        obj[key] = value;
    }
    return obj;
}

std::string params_text(const std::map<std::string, double>& params) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [key, value] : params) {
        out << (first ? "" : ";") << key << "=" << format_double(value);
        first = false;
    }
    return out.str();
}

ordered_json meta_json(const RunConfig& cfg, const ModelInstance& model) {
    ordered_json meta;
    meta["tool"] = kToolName;
    meta["version"] = kVersion;
    meta["command"] = cfg.command;
    meta["model"] = model.name;
    meta["params"] = params_json(model.parameters);
    meta["dim"] = static_cast<long long>(model.family.dim);
    meta["lambda"] = cfg.lambdas;
    meta["beta"] = cfg.betas;
    if (cfg.mu.has_value()) {
        meta["mu"] = *cfg.mu;
    } else {
        meta["mu"] = nullptr;
    }
    meta["seed"] = cfg.seed;
    meta["format"] = cfg.format;
    meta["tolerance_abs"] = TolerancePolicy{}.abs;
    meta["tolerance_rel"] = TolerancePolicy{}.rel;
    if (cfg.command == "converge") {
        meta["quantity"] = cfg.quantity;
        ordered_json ms = ordered_json::array();
        for (Eigen::Index m : cfg.ms) {
            ms.push_back(static_cast<long long>(m));
        }
        meta["ms"] = ms;
    }
    return meta;
}

void emit(const RunConfig& cfg, const ModelInstance& model,
          const std::vector<std::string>& columns, const std::vector<ordered_json>& rows) {
    if (cfg.format == "csv") {
        write_output(cfg, render_csv(columns, rows));
    } else {
        ordered_json doc;
        doc["meta"] = meta_json(cfg, model);
        doc["rows"] = rows;
        write_output(cfg, doc.dump(2) + "\n");
    }
}

// --------------------------------- verify ------------------------------------

ModelInstance build_model(const RunConfig& cfg) {
    try {
        return make_model(cfg.model, cfg.params, cfg.seed);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

void check_domain(const RunConfig& cfg, const OperatorFamily& fam) {
    for (double lambda : cfg.lambdas) {
        if (!(lambda > fam.domain_lo) || !(lambda < fam.domain_hi)) {
            std::ostringstream msg;
            msg << "lambda = " << lambda << " outside the domain (" << fam.domain_lo << ", "
                << fam.domain_hi << ") of model '" << fam.label << "'";
            throw ConfigError(msg.str());
        }
    }
}

double mean_energy_of(const EnsembleContext& ctx) {
    double mean = 0.0;
    for (Eigen::Index i = 0; i < ctx.dim(); ++i) {
        mean += ctx.probabilities(i) * ctx.decomposition.eigenvalues(i);
    }
    return mean;
}

// random degree-5 polynomial used as a main-identity probe; coefficients
// are drawn from the run seed so records stay reproducible
ScalarFunction seeded_poly5(std::uint64_t seed) {
    SplitMix64 rng(seed ^ 0x7c3d5cf4b2e1a906ULL);
    std::vector<double> coeff(6);
    for (double& c : coeff) {
        c = rng.symmetric();
    }
    return ScalarFunction::polynomial(std::move(coeff));
}

// Applicability gates for the diagnostics that materialize F explicitly:
// contractions against e^{+beta H} carry absolute rounding noise of order
// dim * eps * e^{beta spread}, which must stay below the 1e-10 imaginary-
// residue guard and the 1e-8 row tolerance with margin. The radius gate is
// the representability bound of e^{beta H} itself.
constexpr double kFOperatorNoiseGate = 1e-11;
constexpr double kFOperatorRadiusGate = 300.0;

void verify_point(const ModelInstance& model, const RunConfig& cfg, double lambda, double beta,
                  std::vector<IdentityReport>& reports) {
    const OperatorFamily& fam = model.family;

    ReportParameters base;
    base.lambda = lambda;
    base.beta = beta;
    base.dim = fam.dim;
    base.model = model.name;
    base.seed = cfg.seed;

    // d/dlambda tr f(H) = tr[H' f'(H)] for three probe functions
    for (const ScalarFunction& f :
         {ScalarFunction::boltzmann(beta), ScalarFunction::x_boltzmann(beta),
          seeded_poly5(cfg.seed)}) {
        IdentityReport r = verify_main_identity(fam, f, lambda, beta);
        r.parameters.model = model.name;
        r.parameters.seed = cfg.seed;
        reports.push_back(std::move(r));
    }

    // Z' = -beta tr(H' e^{-beta H})
    {
        auto Z_of = [&](double l) { return partition_function(make_context(fam, l, beta)); };
        const double lhs = fd::derivative(Z_of, lambda);
        const double rhs = dZ_dlambda(fam, lambda, beta);
        reports.push_back(
            make_report("partition_derivative", lhs, rhs, lhs, TolerancePolicy{}, base));
    }

    // d<H>/dlambda = <H'> + beta(<H><H'> - <HH'>)
    {
        auto H_of = [&](double l) { return mean_energy_of(make_context(fam, l, beta)); };
        const double lhs = fd::derivative(H_of, lambda);
        const double rhs = dH_dlambda_hft(fam, lambda, beta);
        reports.push_back(make_report("energy_derivative", lhs, rhs, lhs, TolerancePolicy{}, base));
    }

    // d<H'>/dbeta = <H><H'> - <HH'>
    {
        auto Hp_of = [&](double b) {
            return thermal_average(make_context(fam, lambda, b), fam.derivative_at(lambda));
        };
        const double lhs = fd::derivative(Hp_of, beta);
        const double rhs = dHprime_dbeta(fam, lambda, beta);
        reports.push_back(
            make_report("observable_beta_derivative", lhs, rhs, lhs, TolerancePolicy{}, base));
    }

    // the two algebraic arrangements of d<H>/dlambda agree to reassociation
    {
        const double lhs = dH_dlambda_beta_form(fam, lambda, beta);
        const double rhs = dH_dlambda_hft(fam, lambda, beta);
        reports.push_back(make_report("energy_derivative_beta_form", lhs, rhs, rhs,
                                      TolerancePolicy{0.0, 1e-12}, base));
    }

    // observable laws: commuting form when [H, A] = 0, else the F route
    if (model.observable.has_value()) {
        const OperatorFamily& obs = *model.observable;
        const HermitianOperator H = fam.hamiltonian_at(lambda);
        const HermitianOperator A = obs.hamiltonian_at(lambda);
        const double comm = commutator_norm(H, A);
        const double comm_scale =
            std::max(1.0, kernels::max_abs(H.matrix()) * kernels::max_abs(A.matrix()));

        auto A_of = [&](double l) {
            return thermal_average(make_context(fam, l, beta), obs.hamiltonian_at(l));
        };

        if (comm <= 1e-10 * comm_scale) {
            const double lhs = fd::derivative(A_of, lambda);
            const double rhs = dA_dlambda_commuting(fam, obs, lambda, beta);
            reports.push_back(make_report("commuting_observable_derivative", lhs, rhs, lhs,
                                          TolerancePolicy{}, base));
        } else {
            const double lhs = fd::derivative(A_of, lambda);
            const double rhs = dA_dlambda_general(fam, obs, lambda, beta);
            reports.push_back(make_report("general_observable_derivative", lhs, rhs, lhs,
                                          TolerancePolicy{}, base));

            const SpectralDecomposition dec = spectral_decompose(H);
            const double e_lo = dec.eigenvalues(0);
            const double e_hi = dec.eigenvalues(dec.dim() - 1);
            const double radius = std::max(std::abs(e_lo), std::abs(e_hi));
            const double noise = static_cast<double>(fam.dim) *
                                 std::numeric_limits<double>::epsilon() *
                                 std::exp(beta * (e_hi - e_lo));
            if (noise <= kFOperatorNoiseGate && beta * radius <= kFOperatorRadiusGate) {
                const FOperatorDiagnostics diag = F_operator_diagnostics(fam, lambda, beta);
                reports.push_back(make_report("f_operator_mean", diag.mean_F, diag.beta_mean_Hp,
                                              diag.beta_mean_Hp, TolerancePolicy{1e-8, 1e-8},
                                              base));
                reports.push_back(make_report("f_operator_residual", diag.defining_residual, 0.0,
                                              0.0,
                                              TolerancePolicy{1e-9 * diag.exp_scale, 0.0}, base));
            }
        }
    }

    // grand-canonical energy derivative on K = H - mu N
    if (model.number.has_value()) {
        const HermitianOperator& N = *model.number;
        const double mu = cfg.mu.value_or(0.0);
        auto HG_of = [&](double l) {
            return grand_average(make_grand_context(fam, N, mu, l, beta), fam.hamiltonian_at(l));
        };
        const double lhs = fd::derivative(HG_of, lambda);
        const double rhs = dHG_dlambda_hft(fam, N, mu, lambda, beta);
        ReportParameters grand = base;
        grand.mu = mu;
        reports.push_back(
            make_report("grand_energy_derivative", lhs, rhs, lhs, TolerancePolicy{}, grand));
    }
}

const std::vector<std::string> kVerifyColumns = {
    "tool_version", "command", "identity", "model",        "params",       "dim",
    "seed",         "lambda",  "beta",     "mu",           "lhs",          "rhs",
    "oracle",       "abs_residual",        "rel_residual", "tol_abs",      "tol_rel",
    "passed"};

ordered_json verify_row(const RunConfig& cfg, const ModelInstance& model,
                        const IdentityReport& r) {
    ordered_json row;
    row["tool_version"] = std::string(kToolName) + " " + kVersion;
    row["command"] = cfg.command;
    row["identity"] = r.identity_name;
    row["model"] = model.name;
    row["params"] = params_text(model.parameters);
    row["dim"] = static_cast<long long>(r.parameters.dim);
    row["seed"] = r.parameters.seed;
    row["lambda"] = r.parameters.lambda;
    row["beta"] = r.parameters.beta;
    if (r.parameters.mu.has_value()) {
        row["mu"] = *r.parameters.mu;
    } else {
        row["mu"] = nullptr;
    }
    row["lhs"] = r.lhs;
    row["rhs"] = r.rhs;
    row["oracle"] = r.oracle;
    row["abs_residual"] = r.abs_residual;
    row["rel_residual"] = r.rel_residual;
    row["tol_abs"] = r.tol_abs;
    row["tol_rel"] = r.tol_rel;
    row["passed"] = r.passed;
    return row;
}

int cmd_verify(const RunConfig& cfg) {
    const ModelInstance model = build_model(cfg);
    check_domain(cfg, model.family);

    std::vector<IdentityReport> reports;
    for (double lambda : cfg.lambdas) {
        for (double beta : cfg.betas) {
            verify_point(model, cfg, lambda, beta, reports);
        }
    }

    std::vector<ordered_json> rows;
    rows.reserve(reports.size());
    bool all_passed = true;
    for (const IdentityReport& r : reports) {
        all_passed = all_passed && r.passed;
        rows.push_back(verify_row(cfg, model, r));
    }
    emit(cfg, model, kVerifyColumns, rows);
    return all_passed ? 0 : 1;
}

// ---------------------------------- sweep ------------------------------------

const std::vector<std::string> kSweepColumns = {
    "tool_version", "command",   "model",        "params",        "dim",     "seed",
    "lambda",       "beta",      "avg_H",        "avg_Hprime",    "dH_dlambda",
    "closed_form_H", "abs_diff", "reference_policy"};

int cmd_sweep(const RunConfig& cfg) {
    const ModelInstance model = build_model(cfg);
    check_domain(cfg, model.family);
    const OperatorFamily& fam = model.family;

    std::vector<ordered_json> rows;
    for (double lambda : cfg.lambdas) {
        for (double beta : cfg.betas) {
            const EnsembleContext ctx = make_context(fam, lambda, beta);
            const double avg_H = mean_energy_of(ctx);
            const double avg_Hp = thermal_average(ctx, fam.derivative_at(lambda));
            const double dH = dH_dlambda_hft(fam, lambda, beta);

            ordered_json row;
            row["tool_version"] = std::string(kToolName) + " " + kVersion;
            row["command"] = cfg.command;
            row["model"] = model.name;
            row["params"] = params_text(model.parameters);
            row["dim"] = static_cast<long long>(fam.dim);
            row["seed"] = cfg.seed;
            row["lambda"] = lambda;
            row["beta"] = beta;
            row["avg_H"] = avg_H;
            row["avg_Hprime"] = avg_Hp;
            row["dH_dlambda"] = dH;
            if (model.closed.has_value()) {
                const double closed = model.closed->mean_H(lambda, beta);
                row["closed_form_H"] = closed;
                row["abs_diff"] = std::abs(avg_H - closed);
                row["reference_policy"] = "closed_form";
            } else {
                row["closed_form_H"] = nullptr;
                row["abs_diff"] = nullptr;
                row["reference_policy"] = "";
            }
            rows.push_back(std::move(row));
        }
    }
    emit(cfg, model, kSweepColumns, rows);
    return 0;
}

// --------------------------------- converge ----------------------------------

const std::vector<std::string> kConvergeColumns = {
    "tool_version", "command", "model", "params",  "dim",   "seed",
    "lambda",       "beta",    "quantity",         "M",     "value",
    "error_vs_reference",      "reference",        "reference_policy"};

int cmd_converge(const RunConfig& cfg) {
    const ModelInstance model = build_model(cfg);
    check_domain(cfg, model.family);
    const OperatorFamily& fam = model.family;

    if (cfg.ms.empty()) {
        throw ConfigError("converge requires --ms m1,m2,... (ascending truncation sizes)");
    }
    SweepQuantity quantity;
    try {
        quantity = parse_quantity(cfg.quantity);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    std::vector<ordered_json> rows;
    for (double lambda : cfg.lambdas) {
        for (double beta : cfg.betas) {
            std::optional<double> reference;
            if (model.closed.has_value()) {
                switch (quantity) {
                case SweepQuantity::partition:
                case SweepQuantity::trace_function: // f is e^{-beta x}, so tr f(H) = Z
                    reference = model.closed->partition(lambda, beta);
                    break;
                case SweepQuantity::mean_energy:
                    reference = model.closed->mean_H(lambda, beta);
                    break;
                case SweepQuantity::mean_energy_derivative:
                    reference = model.closed->dH_dlambda(lambda, beta);
                    break;
                }
            }
            const ScalarFunction f = ScalarFunction::boltzmann(beta);
            ConvergenceResult result;
            try {
                result = convergence_sweep(fam, quantity, lambda, beta, cfg.ms, reference, &f);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }

            for (const ConvergenceRow& cr : result.rows) {
                ordered_json row;
                row["tool_version"] = std::string(kToolName) + " " + kVersion;
                row["command"] = cfg.command;
                row["model"] = model.name;
                row["params"] = params_text(model.parameters);
                row["dim"] = static_cast<long long>(fam.dim);
                row["seed"] = cfg.seed;
                row["lambda"] = lambda;
                row["beta"] = beta;
                row["quantity"] = quantity_name(quantity);
                row["M"] = static_cast<long long>(cr.M);
                row["value"] = cr.value;
                row["error_vs_reference"] = cr.error_vs_reference;
                row["reference"] = result.reference;
                row["reference_policy"] = result.reference_policy;
                rows.push_back(std::move(row));
            }
        }
    }
    emit(cfg, model, kConvergeColumns, rows);
    return 0;
}

int cmd_models(const RunConfig& cfg) {
    write_output(cfg, model_catalog());
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"canonical and grand-canonical thermal averages with derivative-identity checks"};
    app.require_subcommand(1);

    RawFlags raw;
    CLI::App* verify = app.add_subcommand(
        "verify", "run every applicable derivative identity across a (lambda, beta) grid");
    CLI::App* sweep =
        app.add_subcommand("sweep", "tabulate <H>, <H'>, d<H>/dlambda across a grid");
    CLI::App* converge = app.add_subcommand(
        "converge", "track a quantity on truncated bases as the basis size grows");
    CLI::App* models = app.add_subcommand("models", "list the registered models");
    for (CLI::App* sub : {verify, sweep, converge}) {
        add_common_options(sub, raw);
    }
    converge->add_option("--ms", raw.ms, "ascending truncation sizes m1,m2,...");
    converge->add_option("--quantity", raw.quantity,
                         "quantity to track: Z, avg_H, dH_dlambda, trace_f (default avg_H)");
    models->add_option("--out", raw.out, "output path (default standard output)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (models->parsed()) {
            RunConfig cfg;
            cfg.command = "models";
            if (models->count("--out") > 0) {
                cfg.out = raw.out;
            }
            return cmd_models(cfg);
        }
        if (verify->parsed()) {
            return cmd_verify(resolve_config(verify, "verify", raw));
        }
        if (sweep->parsed()) {
            return cmd_sweep(resolve_config(sweep, "sweep", raw));
        }
        return cmd_converge(resolve_config(converge, "converge", raw));
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args);
}

} // namespace hft::cli
