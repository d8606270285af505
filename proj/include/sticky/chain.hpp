#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sticky/errors.hpp"
#include "sticky/gibbs.hpp"
#include "sticky/quadrature.hpp"
#include "sticky/rng.hpp"
#include "sticky/strata.hpp"
#include "sticky/test_functions.hpp"

namespace sticky {

// Sticky lattice chain: synchronous product birth-death dynamics on the grid
// {0, h, ..., Mh}^n with time step delta = h^2/2.
//   interior:  +-h with probabilities (1 -+ h b_j / 2) / 2
//   at zero:   escape to h with probability q = h / (2s), else hold
//   at the cap: forced reflection to (M-1) h
// Every coordinate consumes exactly one uniform per step, in coordinate
// order, so trajectories are reproducible from the stream seed alone.
struct ChainSpec {
    GibbsModel model;
    double h = 0.0;
    double delta = 0.0;        // h^2 / 2
    double escape_prob = 0.0;  // q = h / (2s)
    double cap = 0.0;          // upper reflecting bound L = levels * h
    int levels = 0;            // M
    bool zero_drift = false;   // diagnostic lever: forces b = 0

    int dimension() const { return model.dimension(); }

    double drift_at(int j, std::span<const double> phi) const {
        return zero_drift ? 0.0 : model.drift(j, phi);
    }
};

namespace detail {

// Golden-section minimum of the local bond energy of height t at one site.
inline double relax_site(const GibbsModel& model, std::vector<double>& phi, int site,
                         double hi) {
    const auto local = [&](double t) {
        double e = 0.0;
        for (int nb : model.lattice.neighbors[site])
            e += model.potential.value(t - (nb >= 0 ? phi[nb] : 0.0));
        return e;
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.0, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = local(x1), f2 = local(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = local(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = local(x2);
        }
    }
    return 0.5 * (a + b);
}

// Estimate of mu{ some phi_x > L }: exact quadrature tail for n <= 3; beyond
// that a Laplace-style bound n * exp(-(min_x H*_x - H(0))), where H*_x is the
// Hamiltonian minimized by coordinate descent with phi_x pinned at the cap.
inline double cap_tail_estimate(const GibbsModel& model, double cap) {
    const int n = model.dimension();
    if (n <= 3) {
        QuadConfig cfg;
        cfg.rel_tol = 1e-8;
        cfg.tail_L = std::fmax(truncation_bound(model), 2.0 * cap);
        const StratumMassTable wide = stratum_masses(model, cfg);
        cfg.tail_L = cap;
        const StratumMassTable inside = stratum_masses(model, cfg);
        return 1.0 - inside.total / wide.total;
    }
    double min_cost = std::numeric_limits<double>::infinity();
    const std::vector<double> flat(n, 0.0);
    const double base = model.hamiltonian(flat);
    for (int pinned = 0; pinned < n; ++pinned) {
        std::vector<double> phi(n, 0.0);
        phi[pinned] = cap;
        for (int sweep = 0; sweep < 100; ++sweep)
            for (int site = 0; site < n; ++site)
                if (site != pinned) phi[site] = relax_site(model, phi, site, cap);
        min_cost = std::fmin(min_cost, model.hamiltonian(phi) - base);
    }
    return n * std::exp(-min_cost);
}

}  // namespace detail

inline ChainSpec build_chain(const GibbsModel& model, double h, double cap,
                             bool zero_drift = false) {
    if (!(h > 0.0)) throw err::StepTooLarge("dynamics: spatial step must be positive");
    const double q = h / (2.0 * model.stickiness);
    if (q > 1.0)
        throw err::StepTooLarge("dynamics: boundary escape probability q = h/(2s) = " +
                                std::to_string(q) + " exceeds 1");
    const int levels = static_cast<int>(std::llround(cap / h));
    if (levels < 2) throw err::StepTooLarge("dynamics: cap must be at least 2h");

    ChainSpec chain;
    chain.model = model;
    chain.h = h;
    chain.delta = 0.5 * h * h;
    chain.escape_prob = q;
    chain.levels = levels;
    chain.cap = levels * h;
    chain.zero_drift = zero_drift;

    const double bias = 0.5 * h * model.max_abs_drift(chain.cap);
    if (!zero_drift && bias >= 1.0)
        throw err::StepTooLarge("dynamics: drift bias h*max|b|/2 = " + std::to_string(bias) +
                                " reaches 1; shrink h or the cap");

    const double tail = detail::cap_tail_estimate(model, chain.cap);
    if (tail > 1e-6)
        throw err::CapTooSmall("dynamics: estimated mu mass above the cap is " +
                               std::to_string(tail));
    return chain;
}

// One synchronous update; indices and heights belong to the caller. drifts
// and scratch must have size n. Returns via out parameters to keep the hot
// loop allocation-free.
inline void chain_step(const ChainSpec& chain, std::vector<int>& idx, std::vector<double>& phi,
                       std::vector<double>& drifts, CounterRng& rng) {
    const int n = chain.dimension();
    for (int j = 0; j < n; ++j) drifts[j] = idx[j] > 0 ? chain.drift_at(j, phi) : 0.0;
    for (int j = 0; j < n; ++j) {
        const double u = rng.uniform();
        if (idx[j] == 0) {
            if (u < chain.escape_prob) idx[j] = 1;
        } else if (idx[j] == chain.levels) {
            idx[j] = chain.levels - 1;
        } else {
            const double p_up = 0.5 * (1.0 + 0.5 * chain.h * drifts[j]);
            idx[j] += (u < p_up) ? 1 : -1;
        }
        phi[j] = idx[j] * chain.h;
    }
}

// Per-test-function path accumulators for the martingale diagnostic. The
// generator integral uses left-endpoint evaluation, consistent with the
// explicit scheme; the boundary part (1/s) sum_{j dry} d_j f is kept separate
// so the negative control can drop it.
struct MartingaleAccum {
    double start_value = 0.0;
    double end_value = 0.0;
    double generator_integral = 0.0;
    double boundary_integral = 0.0;
};

// All per-replica accumulators; merged across replicas by the diagnostics.
struct RunResult {
    int n = 0;
    double h = 0.0, delta = 0.0, s = 1.0;
    long steps = 0;
    long burn_in = 0;

    std::map<StratumMask, long> stratum_steps;
    std::vector<std::map<StratumMask, long>> batch_counts;
    long batch_length = 0;

    std::vector<long> interior_steps;   // per coordinate
    std::vector<double> interior_sq;    // per coordinate, sum of squared interior increments
    std::vector<long> zero_steps;       // per coordinate
    std::vector<double> cross_sum;     // per pair j<k, compensated products
    std::vector<double> cross_sq_sum;
    std::vector<long> cross_count;

    std::vector<MartingaleAccum> martingale;  // per catalog function
    std::vector<double> symmetry_start;       // per symmetry function
    std::vector<double> symmetry_end;

    std::vector<long> state_histogram;  // mixed-radix over grid states, optional
    std::vector<int> final_state;
    bool in_bounds = true;

    double elapsed_time() const { return steps * delta; }
};

class TrajectoryWriter;  // trajectory_io.hpp

struct ObserverConfig {
    int batches = 32;
    const std::vector<TestFunction>* martingale_catalog = nullptr;
    const std::vector<TestFunction>* symmetry_catalog = nullptr;
    bool state_histogram = false;
    std::vector<std::vector<double>>* frame_sink = nullptr;  // optional raw frames
};

// Runs burn_in unobserved steps followed by `steps` observed ones. The result
// is a pure function of (chain, start, steps, burn_in, seed, observers).
inline RunResult simulate(const ChainSpec& chain, const std::vector<int>& start, long steps,
                          long burn_in, std::uint64_t stream_seed,
                          const ObserverConfig& observers = {}) {
    const int n = chain.dimension();
    if (static_cast<int>(start.size()) != n)
        throw err::Validation({"dynamics: start state has wrong dimension"});

    RunResult out;
    out.n = n;
    out.h = chain.h;
    out.delta = chain.delta;
    out.s = chain.model.stickiness;
    out.steps = steps;
    out.burn_in = burn_in;
    out.interior_steps.assign(n, 0);
    out.interior_sq.assign(n, 0.0);
    out.zero_steps.assign(n, 0);
    const int pairs = n * (n - 1) / 2;
    out.cross_sum.assign(pairs, 0.0);
    out.cross_sq_sum.assign(pairs, 0.0);
    out.cross_count.assign(pairs, 0);

    std::vector<int> idx = start;
    std::vector<double> phi(n), drifts(n), prev_phi(n);
    for (int j = 0; j < n; ++j) {
        if (idx[j] < 0 || idx[j] > chain.levels)
            throw err::Validation({"dynamics: start state off the grid"});
        phi[j] = idx[j] * chain.h;
    }

    CounterRng rng(stream_seed);
    for (long k = 0; k < burn_in; ++k) chain_step(chain, idx, phi, drifts, rng);

    const int batches = steps >= observers.batches ? observers.batches : 1;
    out.batch_counts.assign(batches, {});
    out.batch_length = batches > 0 ? steps / batches : 0;

    const bool with_hist = observers.state_histogram;
    long hist_states = 0;
    if (with_hist) {
        double count = 1.0;
        for (int j = 0; j < n; ++j) count *= chain.levels + 1;
        if (count > 2e5)
            throw err::StateSpaceTooLarge("dynamics: state histogram over " +
                                          std::to_string(count) + " grid states");
        hist_states = static_cast<long>(count);
        out.state_histogram.assign(hist_states, 0);
    }

    const auto* mart = observers.martingale_catalog;
    if (mart != nullptr) {
        out.martingale.resize(mart->size());
        for (std::size_t i = 0; i < mart->size(); ++i)
            out.martingale[i].start_value = (*mart)[i].value(phi);
    }
    if (observers.symmetry_catalog != nullptr)
        for (const TestFunction& f : *observers.symmetry_catalog)
            out.symmetry_start.push_back(f.value(phi));

    for (long k = 0; k < steps; ++k) {
        // observe the pre-move state: it owns the time slice [k delta, (k+1) delta)
        StratumMask mask = 0;
        for (int j = 0; j < n; ++j) {
            if (idx[j] > 0) {
                mask |= StratumMask{1} << j;
                ++out.interior_steps[j];
            } else {
                ++out.zero_steps[j];
            }
        }
        ++out.stratum_steps[mask];
        if (batches > 1 && out.batch_length > 0) {
            const long b = k / out.batch_length;
            if (b < batches) ++out.batch_counts[b][mask];
        } else if (batches == 1) {
            ++out.batch_counts[0][mask];
        }
        if (with_hist) {
            long code = 0;
            for (int j = n - 1; j >= 0; --j) code = code * (chain.levels + 1) + idx[j];
            ++out.state_histogram[code];
        }
        if (mart != nullptr) {
            for (std::size_t i = 0; i < mart->size(); ++i) {
                const TestFunction& f = (*mart)[i];
                double interior = 0.0, boundary = 0.0;
                for (int j = 0; j < n; ++j) {
                    if (idx[j] > 0)
                        interior += f.d2(j, phi) + f.d1(j, phi) * chain.drift_at(j, phi);
                    else
                        boundary += f.d1(j, phi) / chain.model.stickiness;
                }
                out.martingale[i].generator_integral += chain.delta * interior;
                out.martingale[i].boundary_integral += chain.delta * boundary;
            }
        }
        if (observers.frame_sink != nullptr) observers.frame_sink->push_back(phi);

        prev_phi = phi;
        chain_step(chain, idx, phi, drifts, rng);

        for (int j = 0; j < n; ++j) {
            if (prev_phi[j] <= 0.0) continue;
            const double dx = phi[j] - prev_phi[j];
            out.interior_sq[j] += dx * dx;
        }

        // compensated cross products over coordinates interior before the move
        if (pairs > 0) {
            int p = 0;
            for (int j = 0; j < n; ++j)
                for (int l = j + 1; l < n; ++l, ++p) {
                    if (prev_phi[j] <= 0.0 || prev_phi[l] <= 0.0) continue;
                    const double mj = (phi[j] - prev_phi[j]) - chain.delta * drifts[j];
                    const double ml = (phi[l] - prev_phi[l]) - chain.delta * drifts[l];
                    const double prod = mj * ml;
                    out.cross_sum[p] += prod;
                    out.cross_sq_sum[p] += prod * prod;
                    ++out.cross_count[p];
                }
        }

        for (int j = 0; j < n; ++j)
            if (phi[j] < 0.0 || phi[j] > chain.cap) out.in_bounds = false;
    }

    if (mart != nullptr)
        for (std::size_t i = 0; i < mart->size(); ++i)
            out.martingale[i].end_value = (*mart)[i].value(phi);
    if (observers.symmetry_catalog != nullptr)
        for (const TestFunction& f : *observers.symmetry_catalog)
            out.symmetry_end.push_back(f.value(phi));
    out.final_state = idx;
    return out;
}

}  // namespace sticky
