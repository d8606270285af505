// Acceptance suite: one line per criterion, exit 0 iff every requested
// criterion passes. Run bare for all criteria or pass a number for one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sticky/chain.hpp"
#include "sticky/chain_oracle.hpp"
#include "sticky/config.hpp"
#include "sticky/diagnostics.hpp"
#include "sticky/form_calculus.hpp"
#include "sticky/runner.hpp"
#include "sticky/sampler.hpp"

namespace {

using nlohmann::json;
using namespace sticky;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// The n=1 reference configuration: T = 5e4 * delta = 62.5 at h = 0.05.
RunConfig reference_n1() {
    return parse_config(R"({
        "model": {"d": 1, "N": 1, "potential": {"family": "gaussian", "a": 1.0}, "s": 1.0},
        "scheme": {"h": 0.05, "L": 4.0, "T": 62.5},
        "replicas": 32,
        "master_seed": 3
    })");
}

json run_reference(const std::string& tag, int threads) {
    RunConfig cfg = reference_n1();
    cfg.out_dir = (std::filesystem::temp_directory_path() / ("sticky_acc_" + tag)).string();
    std::filesystem::remove_all(cfg.out_dir);
    run_experiment(cfg, threads);
    std::ifstream in(cfg.out_dir + "/summary.json");
    json summary;
    in >> summary;
    return summary;
}

// stationary warm starts shared by the direct-simulation criteria
std::vector<int> warm_start(const GibbsModel& model, const ChainSpec& chain,
                            const SamplerConfig& sampler, std::uint64_t master, long replica) {
    CounterRng rng(derive_stream_seed(master, replica, kSamplerPurpose));
    const InterfaceState state = sample_stationary(model, sampler, rng);
    std::vector<int> idx(state.heights.size());
    for (std::size_t j = 0; j < state.heights.size(); ++j) {
        long k = std::lround(state.heights[j] / chain.h);
        idx[j] = static_cast<int>(std::min<long>(std::max<long>(k, 0), chain.levels));
    }
    return idx;
}

// 1. Corner-mass reproduction at the reference configuration.
Outcome criterion_1() {
    const double t0 = now_seconds();
    const json summary = run_reference("c1", 4);
    const double corner = summary["occupancy"][0]["empirical_fraction"];
    const double quad = summary["quadrature_masses"][0];
    const double gap = std::abs(corner - quad);
    const double elapsed = now_seconds() - t0;
    const bool pass = gap <= 0.01 && elapsed < 60.0;
    return {pass, "corner " + fmt(corner) + " vs quadrature " + fmt(quad) + ", |gap| = " +
                      fmt(gap) + " (band 0.01), " + fmt(elapsed) + "s"};
}

// 2. Full stratification at n=2 against the exact chain oracle.
Outcome criterion_2() {
    const double t0 = now_seconds();
    const GibbsModel model = make_gibbs_model(1, 2, Potential::gaussian(1.0), 0.5);
    const ChainSpec chain = build_chain(model, 0.05, 4.5);
    const ChainOracle oracle = chain_stationary_oracle(chain);
    const StratumMassTable quad = stratum_masses(model, QuadConfig{});

    double oracle_gap = 0.0;
    for (int mask = 0; mask < 4; ++mask)
        oracle_gap = std::fmax(oracle_gap,
                               std::abs(oracle.stratum_mass[mask] - quad.normalized[mask]));

    const SamplerConfig sampler{400, 1.0, 0.25};
    std::vector<RunResult> replicas;
    for (long r = 0; r < 16; ++r)
        replicas.push_back(simulate(chain, warm_start(model, chain, sampler, 3, r), 100000, 0,
                                    derive_stream_seed(3, r, kChainPurpose)));
    const OccupationReport occ = revuz_check(replicas, oracle.stratum_mass);
    double max_z = 0.0;
    for (const auto& row : occ.rows()) max_z = std::fmax(max_z, std::abs(row.z));

    const double elapsed = now_seconds() - t0;
    const bool pass = max_z < 3.0 && oracle_gap < 0.02 && elapsed < 300.0;
    return {pass, "max |z| = " + fmt(max_z) + " (< 3), oracle-vs-quadrature gap = " +
                      fmt(oracle_gap) + " (< 0.02), " + fmt(elapsed) + "s"};
}

// 3. Scheme/oracle equivalence for the drift-free chain.
Outcome criterion_3() {
    const GibbsModel model = make_gibbs_model(1, 1, Potential::gaussian(1.0), 1.0);
    const ChainSpec chain = build_chain(model, 0.1, 4.0, /*zero_drift=*/true);

    const ChainOracle oracle = chain_stationary_oracle(chain, 1e-15, 5000000);
    const double balance =
        std::abs(oracle.pi[0] * chain.escape_prob - 0.5 * oracle.pi[1]);

    ObserverConfig obs;
    obs.state_histogram = true;
    const RunResult run =
        simulate(chain, {0}, 1000000, 0, derive_stream_seed(3, 0, kChainPurpose), obs);
    double tv = 0.0;
    for (std::size_t i = 0; i < run.state_histogram.size(); ++i)
        tv += std::abs(static_cast<double>(run.state_histogram[i]) / run.steps - oracle.pi[i]);
    tv *= 0.5;

    const bool pass = tv < 0.02 && balance <= 1e-12;
    return {pass, "TV(simulated, power iteration) = " + fmt(tv) +
                      " (< 0.02), |pi(0)q - pi(h)/2| = " + fmt(balance) + " (<= 1e-12)"};
}

// 4. Interior quadratic variation and vanishing cross-variation at n=2.
Outcome criterion_4() {
    const GibbsModel model = make_gibbs_model(1, 2, Potential::gaussian(1.0), 0.5);
    const ChainSpec chain = build_chain(model, 0.05, 4.5);
    const SamplerConfig sampler{400, 1.0, 0.25};
    std::vector<RunResult> replicas;
    for (long r = 0; r < 4; ++r)
        replicas.push_back(simulate(chain, warm_start(model, chain, sampler, 3, r), 250000, 0,
                                    derive_stream_seed(3, r, kChainPurpose)));
    const QvReport qv = qv_check(replicas);
    const auto cross = qv.cross_terms();
    const bool pass = qv.pass(1.9, 2.1, 3.0);
    return {pass, "slopes " + fmt(qv.slope(0)) + ", " + fmt(qv.slope(1)) +
                      " (band [1.9, 2.1]), cross z = " + fmt(cross[0].z) + " (|z| < 3)"};
}

// 5. Form identities at quadrature precision over the catalog pairs.
Outcome criterion_5() {
    const double t0 = now_seconds();
    double ibp_max = 0.0, energy_max = 0.0;
    int pairs = 0;
    for (int N : {1, 2}) {
        const GibbsModel model =
            make_gibbs_model(1, N, Potential::gaussian(1.0), N == 1 ? 1.0 : 0.5);
        const int n = model.dimension();
        const QuadConfig cfg;
        const StratumMassTable table = stratum_masses(model, cfg);
        const auto catalog = default_catalog(n, 3.0);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i; j < 4; ++j) {
                const TestFunction& f = catalog[i];
                const TestFunction& g = catalog[j];
                const double e = dirichlet_form(model, f, g, cfg, &table).value;
                const double nu = nu_f_pairing(model, f, g, cfg, &table);
                ibp_max = std::fmax(ibp_max, std::abs(e - nu) / (1.0 + std::abs(e)));
                const double pairing = energy_measure_pairing(model, g, f, cfg, &table);
                const double bracket =
                    2.0 * dirichlet_form(model, product(g, f), g, cfg, &table).value -
                    dirichlet_form(model, square(g), f, cfg, &table).value;
                energy_max = std::fmax(energy_max,
                                       std::abs(pairing - bracket) / (1.0 + std::abs(pairing)));
                ++pairs;
            }
    }
    const double elapsed = now_seconds() - t0;
    const bool pass = pairs >= 6 && ibp_max < 1e-6 && energy_max < 1e-6 && elapsed < 30.0;
    return {pass, std::to_string(pairs) + " pairs, max rel err: ibp " + fmt(ibp_max) +
                      ", energy " + fmt(energy_max) + " (< 1e-6), " + fmt(elapsed) + "s"};
}

// 6. Invariance and symmetry from the stationary-start short ensemble.
Outcome criterion_6() {
    const json summary = run_reference("c6", 2);
    bool pass = summary["short_ensemble"]["replicas"].get<long>() >= 200;
    double worst = 0.0;
    for (const auto& entry : summary["symmetry"]["invariance"]) {
        const double mean = entry["mean"], ci = entry["ci_half"];
        pass = pass && std::abs(mean) <= ci;
        worst = std::fmax(worst, ci > 0.0 ? std::abs(mean) / ci : 0.0);
    }
    for (const auto& entry : summary["symmetry"]["pair_differences"]) {
        const double mean = entry["mean"], ci = entry["ci_half"];
        pass = pass && std::abs(mean) <= ci;
        worst = std::fmax(worst, ci > 0.0 ? std::abs(mean) / ci : 0.0);
    }
    return {pass, "all 95% CIs contain 0; worst |mean|/ci = " + fmt(worst)};
}

// 7. Martingale problem with the boundary terms, plus the negative control.
Outcome criterion_7() {
    const json summary = run_reference("c7", 2);
    const auto& entries = summary["martingale"];
    bool with_terms_pass = entries.size() >= 3;
    bool control_fails = false;
    double worst = 0.0;
    for (const auto& entry : entries) {
        const double mean = entry["mean"], ci = entry["ci_half"];
        with_terms_pass = with_terms_pass && std::abs(mean) <= ci;
        worst = std::fmax(worst, ci > 0.0 ? std::abs(mean) / ci : 0.0);
        const double cmean = entry["control_mean"], cci = entry["control_ci_half"];
        if (std::abs(cmean) > cci) control_fails = true;
    }
    const bool pass = with_terms_pass && control_fails;
    return {pass, std::to_string(entries.size()) + " functions, worst |mean|/ci = " + fmt(worst) +
                      "; dropping the boundary term breaks the test: " +
                      (control_fails ? "yes" : "no")};
}

// 8. Corner-mass error strictly decreases under h-refinement.
Outcome criterion_8() {
    const GibbsModel model = make_gibbs_model(1, 1, Potential::gaussian(1.0), 1.0);
    const double target = stratum_masses(model, QuadConfig{}).normalized[0];
    const SamplerConfig sampler{200, 1.0, 0.25};
    const double horizon = 1500.0;

    std::vector<double> errors;
    std::string detail = "errors:";
    for (double h : {0.2, 0.1, 0.05}) {
        const ChainSpec chain = build_chain(model, h, 4.0);
        const long steps = std::llround(horizon / chain.delta);
        std::vector<RunResult> replicas;
        for (long r = 0; r < 32; ++r)
            replicas.push_back(simulate(chain, warm_start(model, chain, sampler, 3, r), steps, 0,
                                        derive_stream_seed(3, r, kChainPurpose)));
        const OccupationReport occ = revuz_check(replicas);
        const double corner = occ.rows()[0].empirical_fraction;
        errors.push_back(std::abs(corner - target));
        detail += " h=" + fmt(h) + ": " + fmt(errors.back());
    }
    const bool pass = errors[0] > errors[1] && errors[1] > errors[2];
    return {pass, detail + (pass ? " (strictly decreasing)" : " (not monotone)")};
}

// 9. Byte-identical occupancy.csv across 1 and 8 worker threads.
Outcome criterion_9() {
    RunConfig cfg = reference_n1();
    const auto base = std::filesystem::temp_directory_path();
    const std::string dir1 = (base / "sticky_acc_c9_t1").string();
    const std::string dir8 = (base / "sticky_acc_c9_t8").string();
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir8);

    cfg.out_dir = dir1;
    run_experiment(cfg, 1);
    cfg.out_dir = dir8;
    run_experiment(cfg, 8);

    const auto slurp = [](const std::string& dir) {
        std::ifstream in(dir + "/occupancy.csv", std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const std::string a = slurp(dir1);
    const std::string b = slurp(dir8);
    const bool pass = !a.empty() && a == b;
    return {pass, "occupancy.csv identical across 1 and 8 threads: " + std::string(pass ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"corner-mass reproduction (Revuz/ergodic)", criterion_1},
        {"full stratification at n=2", criterion_2},
        {"scheme/oracle equivalence", criterion_3},
        {"quadratic/cross variation", criterion_4},
        {"form identities", criterion_5},
        {"invariance and symmetry", criterion_6},
        {"martingale problem with negative control", criterion_7},
        {"refinement trend", criterion_8},
        {"reproducibility across worker counts", criterion_9},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    bool all_pass = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (only != 0 && number != only) continue;
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d (%s): %s — %s\n", number, criteria[i].first,
                    outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && outcome.pass;
    }
    return all_pass ? 0 : 1;
}
