#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sticky/chain.hpp"
#include "sticky/chain_oracle.hpp"
#include "sticky/config.hpp"
#include "sticky/diagnostics.hpp"
#include "sticky/log.hpp"
#include "sticky/quadrature.hpp"
#include "sticky/rng.hpp"
#include "sticky/sampler.hpp"
#include "sticky/trajectory_io.hpp"

namespace sticky {

inline constexpr std::uint64_t kSamplerPurpose = 0x53414d504c455221ull;
inline constexpr std::uint64_t kChainPurpose = 0x434841494e525531ull;
inline constexpr std::uint64_t kShortSamplerPurpose = 0x53414d502d53484full;
inline constexpr std::uint64_t kShortChainPurpose = 0x434841494e2d5348ull;
inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunManifest {
    std::string artifact_version = kArtifactVersion;
    std::uint64_t config_hash = 0;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> replica_seeds;
    std::map<std::string, std::string> stage_status;
    double wall_clock_seconds = 0.0;
    bool all_pass = false;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline nlohmann::json manifest_json(const RunManifest& m, const RunConfig& cfg) {
    nlohmann::json j;
    j["artifact_version"] = m.artifact_version;
    j["config_hash"] = m.config_hash;
    j["master_seed"] = m.master_seed;
    j["replicas"] = cfg.replicas;
    j["replica_seeds"] = m.replica_seeds;
    j["stage_status"] = m.stage_status;
    j["wall_clock_seconds"] = m.wall_clock_seconds;
    j["all_pass"] = m.all_pass;
    return j;
}

// Snap a sampler draw onto the chain grid; exact zeros stay dry.
inline std::vector<int> snap_to_grid(const InterfaceState& state, const ChainSpec& chain) {
    std::vector<int> idx(state.heights.size());
    for (std::size_t j = 0; j < state.heights.size(); ++j) {
        long k = std::lround(state.heights[j] / chain.h);
        if (k < 0) k = 0;
        if (k > chain.levels) k = chain.levels;
        idx[j] = static_cast<int>(k);
    }
    return idx;
}

}  // namespace detail

// Stationary warm starts, parallel replicas, merged diagnostics, artifacts.
// Numeric outputs depend only on (config, master_seed), never on the worker
// count: replicas own disjoint counter-based streams and are merged in index
// order.
inline RunManifest run_experiment(const RunConfig& cfg, int threads = 1) {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();

    RunManifest manifest;
    manifest.master_seed = cfg.master_seed;
    manifest.config_hash = config_hash(to_json(cfg));
    for (long r = 0; r < cfg.replicas; ++r)
        manifest.replica_seeds.push_back(derive_replica_seed(cfg.master_seed, r));
    for (const char* stage :
         {"quadrature", "chain_oracle", "sampler", "simulation", "diagnostics", "artifacts"})
        manifest.stage_status[stage] = "pending";

    const fs::path out_dir(cfg.out_dir);
    fs::create_directories(out_dir);
    detail::write_text(out_dir / "manifest.json",
                       detail::manifest_json(manifest, cfg).dump(2) + "\n");

    const GibbsModel model =
        make_gibbs_model(cfg.model.d, cfg.model.N, cfg.potential(), cfg.model.s);
    const ChainSpec chain = build_chain(model, cfg.scheme.h, cfg.scheme.L);
    const int n = model.dimension();
    const long steps = cfg.steps_per_replica();

    nlohmann::json summary;

    // Stage 1: quadrature oracle (n <= 3). A failure is recorded and the run
    // continues without continuum targets.
    std::vector<double> quad_masses;
    if (n <= 3) {
        try {
            QuadConfig qcfg;
            const StratumMassTable table = stratum_masses(model, qcfg);
            quad_masses = table.normalized;
            summary["quadrature_masses"] = quad_masses;
            manifest.stage_status["quadrature"] = "ok";
            log_info("quadrature masses computed (n=" + std::to_string(n) + ")");
        } catch (const std::exception& e) {
            manifest.stage_status["quadrature"] = std::string("failed: ") + e.what();
            log_error(manifest.stage_status["quadrature"]);
        }
    } else {
        manifest.stage_status["quadrature"] = "skipped: n > 3";
    }

    // Stage 2: exact chain oracle when the grid fits.
    std::vector<double> oracle_masses;
    double states_count = 1.0;
    for (int j = 0; j < n; ++j) states_count *= chain.levels + 1;
    if (states_count <= 2e5) {
        try {
            const ChainOracle oracle = chain_stationary_oracle(chain);
            oracle_masses = oracle.stratum_mass;
            summary["oracle_masses"] = oracle_masses;
            summary["oracle_iterations"] = oracle.iterations;
            manifest.stage_status["chain_oracle"] = "ok";
            log_info("chain oracle converged after " + std::to_string(oracle.iterations) +
                     " iterations");
        } catch (const std::exception& e) {
            manifest.stage_status["chain_oracle"] = std::string("failed: ") + e.what();
            log_error(manifest.stage_status["chain_oracle"]);
        }
    } else {
        manifest.stage_status["chain_oracle"] = "skipped: state space too large";
    }

    // Occupation targets prefer the exact oracle of the same kernel; the
    // quadrature value is the continuum reference kept alongside.
    const std::vector<double>& targets = !oracle_masses.empty() ? oracle_masses : quad_masses;

    // Stage 3+4: warm starts and replica simulations on a worker pool. The
    // long ensemble feeds occupation and quadratic-variation statistics; the
    // martingale and symmetry checks get their own stationary-start ensemble
    // at a short horizon, where the scheme's O(h T) generator bias stays far
    // inside the confidence bands.
    std::vector<TestFunction> catalog;
    ObserverConfig short_observers;
    const bool with_catalog = cfg.diagnostics.catalog == "default";
    long short_replicas = 0;
    long short_steps = 0;
    if (with_catalog) {
        catalog = default_catalog(n, chain.cap);
        catalog.resize(3);  // bump, xbump, trunc
        short_observers.martingale_catalog = &catalog;
        short_observers.symmetry_catalog = &catalog;
        short_replicas = std::max<long>(200, cfg.replicas);
        short_steps = std::max<long>(1, std::llround(std::fmin(1.0, cfg.scheme.T) / chain.delta));
    }

    std::vector<RunResult> results(cfg.replicas);
    std::vector<RunResult> short_results(short_replicas);
    std::vector<std::vector<double>> dump_frames;
    std::atomic<long> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    const auto run_replica = [&](long job) {
        if (job < cfg.replicas) {
            const long r = job;
            CounterRng sampler_rng(derive_stream_seed(cfg.master_seed, r, kSamplerPurpose));
            const InterfaceState start = sample_stationary(model, cfg.sampler, sampler_rng);
            ObserverConfig local;
            local.state_histogram = false;
            if (r == 0 && cfg.diagnostics.dump_trajectory) local.frame_sink = &dump_frames;
            results[r] = simulate(chain, detail::snap_to_grid(start, chain), steps,
                                  cfg.scheme.burn_in,
                                  derive_stream_seed(cfg.master_seed, r, kChainPurpose), local);
        } else {
            const long r = job - cfg.replicas;
            CounterRng sampler_rng(derive_stream_seed(cfg.master_seed, r, kShortSamplerPurpose));
            const InterfaceState start = sample_stationary(model, cfg.sampler, sampler_rng);
            short_results[r] =
                simulate(chain, detail::snap_to_grid(start, chain), short_steps, 0,
                         derive_stream_seed(cfg.master_seed, r, kShortChainPurpose),
                         short_observers);
        }
    };

    const long jobs = cfg.replicas + short_replicas;
    const auto worker = [&] {
        for (;;) {
            const long job = next.fetch_add(1);
            if (job >= jobs || failed.load()) return;
            try {
                run_replica(job);
                log_debug("replica job " + std::to_string(job) + " done");
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                failure = e.what();
            }
        }
    };

    const int pool = std::max(1, threads);
    std::vector<std::thread> workers;
    for (int t = 0; t < pool; ++t) workers.emplace_back(worker);
    for (auto& w : workers) w.join();

    if (failed.load()) {
        manifest.stage_status["sampler"] = "failed";
        manifest.stage_status["simulation"] = "failed: " + failure;
        detail::write_text(out_dir / "manifest.json",
                           detail::manifest_json(manifest, cfg).dump(2) + "\n");
        throw err::NotConverged("runner: replica simulation failed: " + failure);
    }
    manifest.stage_status["sampler"] = "ok";
    manifest.stage_status["simulation"] = "ok";

    if (cfg.diagnostics.dump_trajectory) {
        TrajectoryWriter writer((out_dir / "trajectory_r0.stky").string(),
                                static_cast<std::uint64_t>(n), chain.h, chain.delta);
        for (const auto& frame : dump_frames) writer.append_frame(frame);
    }

    // Stage 5: merged diagnostics in replica-index order.
    bool all_pass = true;
    nlohmann::json pass_flags;

    const OccupationReport occupation = revuz_check(results, targets);
    {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : occupation.rows())
            rows.push_back({{"mask", row.mask},
                            {"empirical_fraction", row.empirical_fraction},
                            {"target_mass", row.target_mass},
                            {"stderr", row.se},
                            {"z", row.z},
                            {"raw_occupation", row.raw_occupation}});
        summary["occupancy"] = rows;
        const bool ok = occupation.pass(cfg.diagnostics.z_threshold);
        pass_flags["occupancy"] = ok;
        all_pass = all_pass && ok;
    }

    try {
        const QvReport qv = qv_check(results);
        nlohmann::json q;
        for (int j = 0; j < n; ++j) q["slopes"].push_back(qv.slope(j));
        q["cross"] = nlohmann::json::array();
        for (const auto& c : qv.cross_terms())
            q["cross"].push_back(
                {{"j", c.j + 1}, {"k", c.k + 1}, {"mean", c.mean}, {"se", c.se}, {"z", c.z}});
        summary["qv"] = q;
        const bool ok = qv.pass(1.9, 2.1, cfg.diagnostics.z_threshold);
        pass_flags["qv"] = ok;
        all_pass = all_pass && ok;
    } catch (const err::InsufficientData& e) {
        summary["qv"] = std::string("skipped: ") + e.what();
    }

    if (with_catalog && short_replicas >= 30) {
        std::vector<std::string> names;
        for (const auto& f : catalog) names.push_back(f.name);
        const MartingaleReport mart = martingale_residual(short_results, names);
        nlohmann::json entries = nlohmann::json::array();
        for (std::size_t i = 0; i < mart.residual.size(); ++i)
            entries.push_back({{"name", mart.names[i]},
                               {"mean", mart.residual[i].mean()},
                               {"ci_half", mart.residual[i].ci_half()},
                               {"contains_zero", mart.residual[i].contains_zero()},
                               {"control_mean", mart.control[i].mean()},
                               {"control_ci_half", mart.control[i].ci_half()}});
        summary["martingale"] = entries;
        const bool ok = mart.pass();
        pass_flags["martingale"] = ok;
        all_pass = all_pass && ok;

        const SymmetryReport sym = symmetry_check(short_results, names);
        nlohmann::json sj;
        sj["invariance"] = nlohmann::json::array();
        for (std::size_t i = 0; i < sym.invariance.size(); ++i)
            sj["invariance"].push_back({{"name", mart.names[i]},
                                        {"mean", sym.invariance[i].mean()},
                                        {"ci_half", sym.invariance[i].ci_half()}});
        sj["pair_differences"] = nlohmann::json::array();
        for (const auto& d : sym.symmetry_difference)
            sj["pair_differences"].push_back({{"mean", d.mean()}, {"ci_half", d.ci_half()}});
        summary["symmetry"] = sj;
        const bool sok = sym.pass();
        pass_flags["symmetry"] = sok;
        all_pass = all_pass && sok;
    } else {
        summary["martingale"] = "skipped";
        summary["symmetry"] = "skipped";
    }

    const ConservativityReport cons = conservativity_check(results);
    summary["conservativity"] = {{"replicas", cons.replicas},
                                 {"in_bounds", cons.in_bounds},
                                 {"time_accounted", cons.time_accounted}};
    pass_flags["conservativity"] = cons.pass();
    all_pass = all_pass && cons.pass();

    manifest.stage_status["diagnostics"] = "ok";

    // Stage 6: artifacts.
    std::string csv = "mask,empirical_fraction,target_mass,stderr,z\n";
    for (const auto& row : occupation.rows()) {
        csv += std::to_string(row.mask) + "," + detail::fmt(row.empirical_fraction) + "," +
               detail::fmt(row.target_mass) + "," + detail::fmt(row.se) + "," +
               detail::fmt(row.z) + "\n";
    }
    detail::write_text(out_dir / "occupancy.csv", csv);

    summary["pass"] = pass_flags;
    summary["all_pass"] = all_pass;
    summary["steps_per_replica"] = steps;
    summary["short_ensemble"] = {{"replicas", short_replicas}, {"steps", short_steps}};
    summary["delta"] = chain.delta;
    detail::write_text(out_dir / "summary.json", summary.dump(2) + "\n");

    manifest.all_pass = all_pass;
    manifest.stage_status["artifacts"] = "ok";
    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail::write_text(out_dir / "manifest.json",
                       detail::manifest_json(manifest, cfg).dump(2) + "\n");
    return manifest;
}

}  // namespace sticky
