// Command line front end: simulate | oracle masses | oracle chain |
// check forms | sample gibbs. Exit codes: 0 pass, 1 diagnostic failure,
// 2 config error, 3 runtime error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sticky/chain_oracle.hpp"
#include "sticky/config.hpp"
#include "sticky/form_calculus.hpp"
#include "sticky/log.hpp"
#include "sticky/runner.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitDiagnosticFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sticky::err::Parse("runner: cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, int threads,
                 std::uint64_t seed, bool seed_set) {
    sticky::RunConfig cfg = sticky::parse_config(read_file(config_path));
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_set) cfg.master_seed = seed;
    const sticky::RunManifest manifest = sticky::run_experiment(cfg, threads);
    std::printf("%s (wall clock %.2fs, artifacts in %s)\n",
                manifest.all_pass ? "PASS" : "FAIL", manifest.wall_clock_seconds,
                cfg.out_dir.c_str());
    return manifest.all_pass ? kExitPass : kExitDiagnosticFailure;
}

int cmd_oracle_masses(const std::string& config_path) {
    const sticky::RunConfig cfg = sticky::parse_config(read_file(config_path));
    const sticky::GibbsModel model =
        sticky::make_gibbs_model(cfg.model.d, cfg.model.N, cfg.potential(), cfg.model.s);
    const sticky::StratumMassTable table = sticky::stratum_masses(model, sticky::QuadConfig{});
    std::printf("mask,unnormalized,normalized\n");
    for (std::size_t mask = 0; mask < table.unnormalized.size(); ++mask)
        std::printf("%zu,%s,%s\n", mask, fmt(table.unnormalized[mask]).c_str(),
                    fmt(table.normalized[mask]).c_str());
    return kExitPass;
}

int cmd_oracle_chain(const std::string& config_path) {
    const sticky::RunConfig cfg = sticky::parse_config(read_file(config_path));
    const sticky::GibbsModel model =
        sticky::make_gibbs_model(cfg.model.d, cfg.model.N, cfg.potential(), cfg.model.s);
    const sticky::ChainSpec chain = sticky::build_chain(model, cfg.scheme.h, cfg.scheme.L);
    const sticky::ChainOracle oracle = sticky::chain_stationary_oracle(chain);
    sticky::log_info("power iteration converged after " + std::to_string(oracle.iterations) +
                     " sweeps");
    std::printf("mask,mass\n");
    for (std::size_t mask = 0; mask < oracle.stratum_mass.size(); ++mask)
        std::printf("%zu,%s\n", mask, fmt(oracle.stratum_mass[mask]).c_str());
    return kExitPass;
}

int cmd_check_forms(const std::string& config_path) {
    const sticky::RunConfig cfg = sticky::parse_config(read_file(config_path));
    const sticky::GibbsModel model =
        sticky::make_gibbs_model(cfg.model.d, cfg.model.N, cfg.potential(), cfg.model.s);
    const int n = model.dimension();
    const sticky::QuadConfig qcfg;
    const sticky::StratumMassTable table = sticky::stratum_masses(model, qcfg);
    const auto catalog = sticky::default_catalog(n, cfg.scheme.L);

    double symmetry_max = 0.0, ibp_max = 0.0, energy_max = 0.0;
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i; j < 4; ++j) {
            const sticky::TestFunction& f = catalog[i];
            const sticky::TestFunction& g = catalog[j];
            const double e_fg = sticky::dirichlet_form(model, f, g, qcfg, &table).value;
            const double e_gf = sticky::dirichlet_form(model, g, f, qcfg, &table).value;
            const double nu = sticky::nu_f_pairing(model, f, g, qcfg, &table);
            const double energy = sticky::energy_measure_pairing(model, g, f, qcfg, &table);
            const double bracket =
                2.0 * sticky::dirichlet_form(model, sticky::product(g, f), g, qcfg, &table).value -
                sticky::dirichlet_form(model, sticky::square(g), f, qcfg, &table).value;
            const double sym_err = std::abs(e_fg - e_gf) / (1.0 + std::abs(e_fg));
            const double ibp_err = std::abs(e_fg - nu) / (1.0 + std::abs(e_fg));
            const double energy_err = std::abs(energy - bracket) / (1.0 + std::abs(energy));
            symmetry_max = std::max(symmetry_max, sym_err);
            ibp_max = std::max(ibp_max, ibp_err);
            energy_max = std::max(energy_max, energy_err);
            pairs.push_back({{"f", f.name},
                             {"g", g.name},
                             {"dirichlet", e_fg},
                             {"ibp_rel_err", ibp_err},
                             {"energy_rel_err", energy_err}});
        }
    }

    // stationarity identity: <nu_f, 1-extension> = 0
    const auto f0 = sticky::bump(n, 0.45 * cfg.scheme.L);
    const auto one = sticky::plateau(n, 0.5 * cfg.scheme.L, 0.25 * cfg.scheme.L);
    const double mean_zero = std::abs(sticky::nu_f_pairing(model, f0, one, qcfg, &table));

    nlohmann::json report;
    report["pairs"] = pairs;
    report["symmetry_max_rel_err"] = symmetry_max;
    report["ibp_max_rel_err"] = ibp_max;
    report["energy_max_rel_err"] = energy_max;
    report["mean_zero_abs_err"] = mean_zero;
    report["tolerance"] = 1e-6;
    const bool pass =
        symmetry_max < 1e-6 && ibp_max < 1e-6 && energy_max < 1e-6 && mean_zero < 1e-6;
    report["pass"] = pass;
    std::printf("%s\n", report.dump(2).c_str());
    return pass ? kExitPass : kExitDiagnosticFailure;
}

int cmd_sample_gibbs(const std::string& config_path, long draws) {
    const sticky::RunConfig cfg = sticky::parse_config(read_file(config_path));
    const sticky::GibbsModel model =
        sticky::make_gibbs_model(cfg.model.d, cfg.model.N, cfg.potential(), cfg.model.s);
    const int n = model.dimension();

    sticky::CounterRng rng(sticky::derive_stream_seed(cfg.master_seed, 0, sticky::kSamplerPurpose));
    std::vector<double> phi(n, 0.0);
    for (long sweep = 0; sweep < cfg.sampler.sweeps; ++sweep)
        sticky::gibbs_sweep(model, phi, cfg.sampler, rng);

    std::string header = "draw";
    for (int j = 1; j <= n; ++j) header += ",phi_" + std::to_string(j);
    std::printf("%s\n", header.c_str());
    std::vector<long> counts(std::size_t{1} << n, 0);
    for (long d = 0; d < draws; ++d) {
        sticky::gibbs_sweep(model, phi, cfg.sampler, rng);
        std::string row = std::to_string(d);
        for (int j = 0; j < n; ++j) row += "," + fmt(phi[j]);
        std::printf("%s\n", row.c_str());
        ++counts[sticky::stratum_of(phi).mask];
    }
    std::printf("\nmask,count,frequency\n");
    for (std::size_t mask = 0; mask < counts.size(); ++mask)
        std::printf("%zu,%ld,%s\n", mask, counts[mask],
                    fmt(static_cast<double>(counts[mask]) / draws).c_str());
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sticky-interface dynamics: wetting model with delta-pinning"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 1;
    std::uint64_t seed = 0;
    long draws = 1000;

    auto* simulate = app.add_subcommand("simulate", "run replicas and diagnostics");
    simulate->add_option("--config", config_path)->required();
    simulate->add_option("--out", out_dir);
    simulate->add_option("--threads", threads);
    auto* seed_opt = simulate->add_option("--seed", seed);

    auto* oracle = app.add_subcommand("oracle", "deterministic references");
    auto* oracle_masses = oracle->add_subcommand("masses", "stratum masses by quadrature");
    oracle_masses->add_option("--config", config_path)->required();
    auto* oracle_chain = oracle->add_subcommand("chain", "stationary law by power iteration");
    oracle_chain->add_option("--config", config_path)->required();
    oracle->require_subcommand(1);

    auto* check = app.add_subcommand("check", "identity checks");
    auto* check_forms = check->add_subcommand("forms", "form identities at quadrature precision");
    check_forms->add_option("--config", config_path)->required();
    check->require_subcommand(1);

    auto* sample = app.add_subcommand("sample", "stationary sampling");
    auto* sample_gibbs = sample->add_subcommand("gibbs", "MCMC draws from mu");
    sample_gibbs->add_option("--config", config_path)->required();
    sample_gibbs->add_option("--draws", draws);
    sample->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return cmd_simulate(config_path, out_dir, threads, seed, seed_opt->count() > 0);
        if (oracle_masses->parsed()) return cmd_oracle_masses(config_path);
        if (oracle_chain->parsed()) return cmd_oracle_chain(config_path);
        if (check_forms->parsed()) return cmd_check_forms(config_path);
        if (sample_gibbs->parsed()) return cmd_sample_gibbs(config_path, draws);
    } catch (const sticky::err::Parse& e) {
        sticky::log_error(e.what());
        return kExitConfigError;
    } catch (const sticky::err::Validation& e) {
        sticky::log_error(e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        sticky::log_error(e.what());
        return kExitRuntimeError;
    }
    return kExitRuntimeError;
}
