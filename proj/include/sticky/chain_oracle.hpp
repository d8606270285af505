#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sticky/chain.hpp"
#include "sticky/errors.hpp"
#include "sticky/strata.hpp"

namespace sticky {

// Stationary distribution of the exact synchronous chain by power iteration.
// States are mixed-radix codes over {0..M}^n with coordinate 0 least
// significant.
struct ChainOracle {
    int n = 0;
    int levels = 0;
    std::vector<double> pi;            // per grid state
    std::vector<double> stratum_mass;  // aggregated per mask
    long iterations = 0;
    double tv_increment = 0.0;
};

inline ChainOracle chain_stationary_oracle(const ChainSpec& chain, double tv_tol = 1e-13,
                                           long max_iterations = 2000000) {
    const int n = chain.dimension();
    const long side = chain.levels + 1;
    double count = 1.0;
    for (int j = 0; j < n; ++j) count *= static_cast<double>(side);
    if (count > 2e5)
        throw err::StateSpaceTooLarge("dynamics: chain oracle over " + std::to_string(count) +
                                      " states exceeds the 2e5 cap");
    const long states = static_cast<long>(count);

    // Sparse transition matrix in CSR form. Each coordinate contributes at
    // most two targets; the synchronous kernel is their product.
    std::vector<long> row_ptr(states + 1, 0);
    std::vector<long> cols;
    std::vector<double> vals;
    cols.reserve(static_cast<std::size_t>(states) * (1u << std::min(n, 4)));
    vals.reserve(cols.capacity());

    std::vector<int> idx(n);
    std::vector<double> phi(n);
    // per-coordinate move table: {target index, probability} x {0,1}
    std::vector<std::array<long, 2>> targets(n);
    std::vector<std::array<double, 2>> probs(n);
    std::vector<int> n_moves(n);

    for (long state = 0; state < states; ++state) {
        long rem = state;
        for (int j = 0; j < n; ++j) {
            idx[j] = static_cast<int>(rem % side);
            rem /= side;
            phi[j] = idx[j] * chain.h;
        }
        for (int j = 0; j < n; ++j) {
            if (idx[j] == 0) {
                targets[j] = {1, 0};
                probs[j] = {chain.escape_prob, 1.0 - chain.escape_prob};
                n_moves[j] = 2;
            } else if (idx[j] == chain.levels) {
                targets[j] = {chain.levels - 1, 0};
                probs[j] = {1.0, 0.0};
                n_moves[j] = 1;
            } else {
                const double p_up = 0.5 * (1.0 + 0.5 * chain.h * chain.drift_at(j, phi));
                targets[j] = {idx[j] + 1, idx[j] - 1};
                probs[j] = {p_up, 1.0 - p_up};
                n_moves[j] = 1 + (probs[j][1] > 0.0 ? 1 : 0);
            }
        }
        long combos = 1;
        for (int j = 0; j < n; ++j) combos *= n_moves[j];
        for (long c = 0; c < combos; ++c) {
            long code = 0;
            double p = 1.0;
            long rem_c = c;
            long radix = 1;
            for (int j = 0; j < n; ++j) {
                const int choice = static_cast<int>(rem_c % n_moves[j]);
                rem_c /= n_moves[j];
                code += targets[j][choice] * radix;
                p *= probs[j][choice];
                radix *= side;
            }
            if (p == 0.0) continue;
            cols.push_back(code);
            vals.push_back(p);
        }
        row_ptr[state + 1] = static_cast<long>(cols.size());
    }

    std::vector<double> pi(states, 1.0 / states), next(states, 0.0);
    ChainOracle out;
    out.n = n;
    out.levels = chain.levels;
    // Below the rounding floor the increments stop improving; accept the
    // plateau once it is deep enough, since further sweeps only re-round.
    double best_tv = 1.0;
    long stale = 0;
    bool converged = false;
    for (out.iterations = 1; out.iterations <= max_iterations; ++out.iterations) {
        std::fill(next.begin(), next.end(), 0.0);
        for (long r = 0; r < states; ++r) {
            const double mass = pi[r];
            if (mass == 0.0) continue;
            for (long e = row_ptr[r]; e < row_ptr[r + 1]; ++e) next[cols[e]] += mass * vals[e];
        }
        double sum = 0.0;
        for (double v : next) sum += v;
        double tv = 0.0;
        for (long i = 0; i < states; ++i) {
            next[i] /= sum;
            tv += std::abs(next[i] - pi[i]);
        }
        out.tv_increment = 0.5 * tv;
        pi.swap(next);
        if (out.tv_increment < tv_tol) {
            converged = true;
            break;
        }
        if (out.tv_increment < best_tv * 0.999) {
            best_tv = out.tv_increment;
            stale = 0;
        } else if (++stale >= 20000) {
            if (best_tv < 1e-10) {
                converged = true;
                break;
            }
            break;
        }
    }
    if (!converged) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "dynamics: power iteration stalled at TV increment %g",
                      out.tv_increment);
        throw err::NotConverged(msg);
    }

    out.pi = std::move(pi);
    out.stratum_mass.assign(std::size_t{1} << n, 0.0);
    for (long state = 0; state < states; ++state) {
        long rem = state;
        StratumMask mask = 0;
        for (int j = 0; j < n; ++j) {
            if (rem % side != 0) mask |= StratumMask{1} << j;
            rem /= side;
        }
        out.stratum_mass[mask] += out.pi[state];
    }
    return out;
}

}  // namespace sticky
