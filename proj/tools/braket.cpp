// braket - weak and modular values of pre-/post-selected systems from the
// command line.  Thin shell over the modval C API: states and observables
// are bra-ket expressions, results are JSON (scalars, reports) or CSV
// (sweeps).  Exit codes: 0 success, 1 numeric/domain failure, 2 bad input.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <modval/modval.h>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitBadInput = 2;

struct CApiError {
    mv_status status;
    std::string message;
};

void check(mv_status status) {
    if (status != MV_OK)
        throw CApiError{status, mv_last_error()};
}

int exit_code_for(mv_status status) {
    return status == MV_ERR_PARSE || status == MV_ERR_INVALID_ARGUMENT ? kExitBadInput
                                                                       : kExitFailure;
}

using KetHandle = std::unique_ptr<mv_ket, decltype(&mv_ket_free)>;
using OpHandle = std::unique_ptr<mv_op, decltype(&mv_op_free)>;
using EnsembleHandle = std::unique_ptr<mv_ensemble, decltype(&mv_ensemble_free)>;

std::string take_string(char* s) {
    std::string out = s;
    mv_string_free(s);
    return out;
}

json complex_json(mv_complex z) { return json{{"re", z.re}, {"im", z.im}}; }

// Options shared by the subcommands.
struct RunConfig {
    std::string psi;
    std::string phi;
    std::vector<std::string> obs;
    std::optional<double> g;
    std::optional<double> theta;
    double gamma_bar = 0.1;
    std::uint64_t shots = 0;
    std::uint64_t seed = 1;
    std::vector<double> range;
    std::string format;  // empty means the subcommand's default
    std::string out_path;
    std::vector<std::string> basis_pairs;
    std::string scenario;

    std::string aliases() const {
        std::string joined;
        for (const auto& pair : basis_pairs) {
            if (!joined.empty())
                joined += ';';
            joined += pair;
        }
        return joined;
    }

    const char* aliases_cstr(std::string& storage) const {
        storage = aliases();
        return storage.empty() ? nullptr : storage.c_str();
    }

    // The coupling constant, accepting either --g or --theta (g = theta/2).
    double coupling() const {
        if (g && theta)
            throw CApiError{MV_ERR_INVALID_ARGUMENT, "give either --g or --theta, not both"};
        if (g)
            return *g;
        if (theta)
            return *theta / 2.0;
        throw CApiError{MV_ERR_INVALID_ARGUMENT, "a coupling is required (--g or --theta)"};
    }
};

EnsembleHandle make_ensemble(const RunConfig& cfg) {
    std::string alias_storage;
    const char* aliases = cfg.aliases_cstr(alias_storage);
    mv_ket* pre = nullptr;
    check(mv_ket_parse(cfg.psi.c_str(), aliases, &pre));
    KetHandle pre_guard(pre, mv_ket_free);
    mv_ket* post = nullptr;
    check(mv_ket_parse(cfg.phi.c_str(), aliases, &post));
    KetHandle post_guard(post, mv_ket_free);
    mv_ensemble* ens = nullptr;
    check(mv_ensemble_create(pre, post, 0.0, &ens));
    return EnsembleHandle(ens, mv_ensemble_free);
}

OpHandle parse_operator(const RunConfig& cfg, const std::string& expr) {
    std::string alias_storage;
    mv_op* op = nullptr;
    check(mv_op_parse(expr.c_str(), cfg.aliases_cstr(alias_storage), &op));
    return OpHandle(op, mv_op_free);
}

// "SITE:EXPR" for sumrule and meter terms.
std::pair<size_t, std::string> split_site_term(const std::string& term) {
    std::size_t colon = term.find(':');
    if (colon == std::string::npos || colon == 0)
        throw CApiError{MV_ERR_INVALID_ARGUMENT,
                        "--obs must look like SITE:EXPR, got '" + term + "'"};
    std::size_t parsed = 0;
    unsigned long site = 0;
    try {
        site = std::stoul(term.substr(0, colon), &parsed);
    } catch (const std::exception&) {
        parsed = 0;
    }
    if (parsed != colon)
        throw CApiError{MV_ERR_INVALID_ARGUMENT,
                        "--obs site must be a number, got '" + term.substr(0, colon) + "'"};
    return {static_cast<size_t>(site), term.substr(colon + 1)};
}

void emit(const RunConfig& cfg, const std::string& payload) {
    if (cfg.out_path.empty()) {
        std::cout << payload;
        if (!payload.empty() && payload.back() != '\n')
            std::cout << '\n';
        return;
    }
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out)
        throw CApiError{MV_ERR_INVALID_ARGUMENT, "cannot open output file " + cfg.out_path};
    out << payload;
    if (!payload.empty() && payload.back() != '\n')
        out << '\n';
}

std::string format_or(const RunConfig& cfg, const char* fallback) {
    return cfg.format.empty() ? fallback : cfg.format;
}

void require_format(const RunConfig& cfg, const std::string& supported) {
    if (format_or(cfg, supported.c_str()) != supported)
        throw CApiError{MV_ERR_INVALID_ARGUMENT,
                        "this subcommand only supports --format " + supported};
}

int cmd_weak(const RunConfig& cfg) {
    EnsembleHandle ens = make_ensemble(cfg);
    OpHandle obs = parse_operator(cfg, cfg.obs.at(0));
    mv_complex weak{}, overlap{};
    check(mv_weak_value(obs.get(), ens.get(), &weak));
    check(mv_ensemble_overlap(ens.get(), &overlap));
    if (format_or(cfg, "json") == "csv") {
        emit(cfg, "re_weak,im_weak\n" + json(weak.re).dump() + "," + json(weak.im).dump());
    } else {
        emit(cfg, json{{"weak", complex_json(weak)}, {"overlap", complex_json(overlap)}}.dump(2));
    }
    return kExitOk;
}

int cmd_modular(const RunConfig& cfg) {
    EnsembleHandle ens = make_ensemble(cfg);
    OpHandle obs = parse_operator(cfg, cfg.obs.at(0));
    const double g = cfg.coupling();
    mv_complex modular{}, overlap{};
    check(mv_modular_value(obs.get(), g, ens.get(), &modular));
    check(mv_ensemble_overlap(ens.get(), &overlap));
    if (format_or(cfg, "json") == "csv") {
        emit(cfg, "g,re_mod,im_mod\n" + json(g).dump() + "," + json(modular.re).dump() + "," +
                      json(modular.im).dump());
    } else {
        emit(cfg, json{{"g", g},
                       {"modular", complex_json(modular)},
                       {"overlap", complex_json(overlap)}}
                      .dump(2));
    }
    return kExitOk;
}

int cmd_sumrule(const RunConfig& cfg) {
    require_format(cfg, "json");
    EnsembleHandle ens = make_ensemble(cfg);
    std::vector<size_t> sites;
    std::vector<std::string> exprs;
    for (const auto& term : cfg.obs) {
        auto [site, expr] = split_site_term(term);
        sites.push_back(site);
        exprs.push_back(expr);
    }
    std::vector<const char*> expr_ptrs;
    for (const auto& e : exprs)
        expr_ptrs.push_back(e.c_str());
    std::string alias_storage;
    char* out = nullptr;
    check(mv_sum_rule_json(sites.data(), expr_ptrs.data(), sites.size(), cfg.coupling(),
                           ens.get(), cfg.aliases_cstr(alias_storage), &out));
    emit(cfg, take_string(out));
    return kExitOk;
}

int cmd_meter(const RunConfig& cfg) {
    require_format(cfg, "json");
    EnsembleHandle ens = make_ensemble(cfg);
    auto [site, expr] = split_site_term(cfg.obs.at(0));
    std::string alias_storage;
    char* out = nullptr;
    check(mv_single_meter_json(site, expr.c_str(), cfg.coupling(), ens.get(), cfg.gamma_bar,
                               cfg.shots, cfg.seed, cfg.aliases_cstr(alias_storage), &out));
    emit(cfg, take_string(out));
    return kExitOk;
}

int cmd_scenario(const RunConfig& cfg) {
    require_format(cfg, "json");
    double coupling;
    if (cfg.scenario == "crz")
        coupling = cfg.theta ? *cfg.theta : (cfg.g ? 2.0 * *cfg.g : 3.141592653589793);
    else
        coupling = cfg.g ? *cfg.g : 0.5;
    char* out = nullptr;
    check(mv_scenario_json(cfg.scenario.c_str(), coupling, &out));
    emit(cfg, take_string(out));
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg) {
    require_format(cfg, "csv");
    if (cfg.range.size() != 3)
        throw CApiError{MV_ERR_INVALID_ARGUMENT, "--range START STOP COUNT is required"};
    const double start = cfg.range[0], stop = cfg.range[1];
    const double count_raw = cfg.range[2];
    if (count_raw < 1 || count_raw != static_cast<double>(static_cast<size_t>(count_raw)))
        throw CApiError{MV_ERR_INVALID_ARGUMENT, "--range COUNT must be a positive integer"};
    const auto count = static_cast<size_t>(count_raw);

    char* out = nullptr;
    if (!cfg.scenario.empty()) {
        check(mv_scenario_sweep_csv(cfg.scenario.c_str(), start, stop, count, &out));
    } else {
        if (cfg.psi.empty() || cfg.phi.empty() || cfg.obs.empty())
            throw CApiError{MV_ERR_INVALID_ARGUMENT,
                            "sweep needs either --scenario or --psi/--phi/--obs"};
        EnsembleHandle ens = make_ensemble(cfg);
        std::string alias_storage;
        check(mv_expr_sweep_csv(cfg.obs.at(0).c_str(), ens.get(), start, stop, count,
                                cfg.aliases_cstr(alias_storage), &out));
    }
    emit(cfg, take_string(out));
    return kExitOk;
}

void add_state_options(CLI::App* cmd, RunConfig& cfg, bool required = true) {
    cmd->add_option("--psi", cfg.psi, "pre-selected state expression")->required(required);
    cmd->add_option("--phi", cfg.phi, "post-selected state expression")->required(required);
    cmd->add_option("--basis", cfg.basis_pairs,
                    "extra ket labels as a pair A,B (repeatable; A -> 0, B -> 1)");
}

void add_output_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--format", cfg.format, "output format (json or csv)")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", cfg.out_path, "write output to a file instead of stdout");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weak and modular values of pre-/post-selected quantum systems"};
    app.require_subcommand(1);

    RunConfig cfg;

    CLI::App* weak = app.add_subcommand("weak", "weak value <phi|A|psi>/<phi|psi>");
    add_state_options(weak, cfg);
    weak->add_option("--obs", cfg.obs, "observable expression on the full space")
        ->required()
        ->expected(1);
    add_output_options(weak, cfg);

    CLI::App* modular = app.add_subcommand("modular", "modular value <phi|exp(-igA)|psi>/<phi|psi>");
    add_state_options(modular, cfg);
    modular->add_option("--obs", cfg.obs, "observable expression on the full space")
        ->required()
        ->expected(1);
    modular->add_option("--g", cfg.g, "coupling constant g");
    modular->add_option("--theta", cfg.theta, "gate angle theta (g = theta/2)");
    add_output_options(modular, cfg);

    CLI::App* sumrule = app.add_subcommand(
        "sumrule", "compare (sum_j A_j)_mod with sum_j (A_j)_mod for local observables");
    add_state_options(sumrule, cfg);
    sumrule->add_option("--obs", cfg.obs, "term as SITE:EXPR (repeat per site)")->required();
    sumrule->add_option("--g", cfg.g, "coupling constant g");
    sumrule->add_option("--theta", cfg.theta, "gate angle theta (g = theta/2)");
    add_output_options(sumrule, cfg);

    CLI::App* meter = app.add_subcommand(
        "meter", "couple a local observable to a meter qubit and read the modular value back");
    add_state_options(meter, cfg);
    meter->add_option("--obs", cfg.obs, "observable as SITE:EXPR")->required()->expected(1);
    meter->add_option("--g", cfg.g, "coupling constant g");
    meter->add_option("--theta", cfg.theta, "gate angle theta (g = theta/2)");
    meter->add_option("--gamma-bar", cfg.gamma_bar, "meter |1> amplitude (default 0.1)");
    meter->add_option("--shots", cfg.shots, "sample the meter this many times per Pauli basis");
    meter->add_option("--seed", cfg.seed, "base RNG seed for sampling (default 1)");
    add_output_options(meter, cfg);

    CLI::App* scenario = app.add_subcommand("scenario", "run a worked scenario");
    scenario->add_option("--name", cfg.scenario, "epr, hardy, cheshire or crz")->required();
    scenario->add_option("--g", cfg.g, "coupling constant g (default 0.5)");
    scenario->add_option("--theta", cfg.theta, "gate angle for crz (default pi)");
    add_output_options(scenario, cfg);

    CLI::App* sweep = app.add_subcommand("sweep", "CSV sweep of a modular value over the coupling");
    sweep->add_option("--scenario", cfg.scenario, "sweep a scenario's headline observable");
    add_state_options(sweep, cfg, /*required=*/false);
    sweep->add_option("--obs", cfg.obs, "observable expression (with --psi/--phi)")->expected(1);
    sweep->add_option("--range", cfg.range, "START STOP COUNT (g; theta for --scenario crz)")
        ->expected(3);
    add_output_options(sweep, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    try {
        if (weak->parsed())
            return cmd_weak(cfg);
        if (modular->parsed())
            return cmd_modular(cfg);
        if (sumrule->parsed())
            return cmd_sumrule(cfg);
        if (meter->parsed())
            return cmd_meter(cfg);
        if (scenario->parsed())
            return cmd_scenario(cfg);
        if (sweep->parsed())
            return cmd_sweep(cfg);
        std::cerr << "braket: no subcommand\n";
        return kExitBadInput;
    } catch (const CApiError& e) {
        std::cerr << "braket: " << e.message << '\n';
        return exit_code_for(e.status);
    } catch (const std::exception& e) {
        std::cerr << "braket: " << e.what() << '\n';
        return kExitFailure;
    }
}
