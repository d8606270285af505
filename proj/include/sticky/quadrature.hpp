#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sticky/errors.hpp"
#include "sticky/gibbs.hpp"
#include "sticky/integrate.hpp"
#include "sticky/strata.hpp"

namespace sticky {

struct QuadConfig {
    double tail_L = 0.0;    // 0 = derive from the potential's coercivity
    double rel_tol = 1e-9;  // per outermost integral; inner levels are tighter
    int max_subdiv = 2000;
};

// Coercivity envelope: a configuration whose largest height is t contains a
// bond gap of at least t/(N+1) on the walk from the hull, so
//   H >= V(t/(N+1)) - (bonds - 1) * max(0, -min V).
// Solving V(r) = 40 + slack keeps the discarded tail below exp(-40) of the
// stratum mass, far under the 1e-10 budget.
inline double truncation_bound(const GibbsModel& model) {
    const Lattice& lat = model.lattice;
    long bonds = static_cast<long>(lat.inner_pairs.size()) + lat.boundary_boundary_pairs;
    for (int i = 0; i < lat.n; ++i) bonds += lat.wall_bonds[i];
    const double slack =
        static_cast<double>(bonds - 1) * std::fmax(0.0, -model.potential.min_value());
    const double target = 40.0 + slack;

    double hi = 1.0;
    while (model.potential.value(hi) < target) {
        hi *= 2.0;
        if (hi > 0x1p30)
            throw err::ToleranceNotMet("quadrature: potential too flat to truncate");
    }
    double lo = 0.0;
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-9 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (model.potential.value(mid) < target ? lo : hi) = mid;
    }
    return (lat.N + 1) * hi;
}

// Integral of g over the face E_+(B): coordinates in B range over (0, L],
// the rest are pinned at 0. Inner levels run at tighter relative tolerance
// so their noise cannot stall the outer subdivision; abs_floor keeps levels
// whose section integral crosses zero from chasing an unreachable relative
// target.
template <class G>
double face_integral(const G& g, StratumMask mask, int n, double L, double rel_tol,
                     int max_subdiv, double abs_floor = 0.0) {
    std::vector<int> coords;
    for (int j = 0; j < n; ++j)
        if ((mask >> j) & 1u) coords.push_back(j);

    std::vector<double> phi(n, 0.0);
    std::function<double(std::size_t)> level = [&](std::size_t depth) -> double {
        if (depth == coords.size()) return g(std::span<const double>(phi));
        const double tol = rel_tol * std::pow(0.1, static_cast<double>(depth));
        return integrate_adaptive(
            [&](double x) {
                phi[coords[depth]] = x;
                return level(depth + 1);
            },
            0.0, L, tol, abs_floor, max_subdiv);
    };
    return level(0);
}

// Unnormalized and normalized stratum masses of mu, indexed by mask.
struct StratumMassTable {
    int n = 0;
    double s = 1.0;
    double tail_L = 0.0;
    std::vector<double> unnormalized;
    std::vector<double> normalized;
    double total = 0.0;
};

inline StratumMassTable stratum_masses(const GibbsModel& model, const QuadConfig& cfg) {
    const int n = model.dimension();
    if (n > 3)
        throw err::DimensionTooLarge("quadrature: stratum masses limited to n <= 3, got n = " +
                                     std::to_string(n));
    StratumMassTable table;
    table.n = n;
    table.s = model.stickiness;
    table.tail_L = cfg.tail_L > 0.0 ? cfg.tail_L : truncation_bound(model);

    const auto rho = [&](std::span<const double> phi) { return model.density_unnorm(phi); };
    for (const StratumId& b : enumerate_strata(n)) {
        const double weight = stratum_weight(n, model.stickiness, b).value;
        const double mass =
            weight * face_integral(rho, b.mask, n, table.tail_L, cfg.rel_tol, cfg.max_subdiv);
        table.unnormalized.push_back(mass);
        table.total += mass;
    }
    table.normalized.resize(table.unnormalized.size());
    for (std::size_t i = 0; i < table.unnormalized.size(); ++i)
        table.normalized[i] = table.unnormalized[i] / table.total;
    return table;
}

// E_mu[f] = sum_B s^(n-#B) int_face f rho / Z.
template <class F>
double mu_expectation(const GibbsModel& model, const F& f, const QuadConfig& cfg) {
    const int n = model.dimension();
    const StratumMassTable table = stratum_masses(model, cfg);
    const double floor = 1e-13 * (1.0 + table.total);
    double acc = 0.0;
    for (const StratumId& b : enumerate_strata(n)) {
        const double weight = stratum_weight(n, model.stickiness, b).value;
        acc += weight * face_integral(
                            [&](std::span<const double> phi) {
                                return f(phi) * model.density_unnorm(phi);
                            },
                            b.mask, n, table.tail_L, cfg.rel_tol, cfg.max_subdiv, floor);
    }
    return acc / table.total;
}

}  // namespace sticky
