#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sticky/gibbs.hpp"
#include "sticky/quadrature.hpp"
#include "sticky/strata.hpp"
#include "sticky/test_functions.hpp"

namespace sticky {

// L^s f = sum_i d^2_i f + sum_i d_i f * d_i ln(rho) + (1/s) sum_i d_i f.
inline double apply_L_s(const GibbsModel& model, const TestFunction& f,
                        std::span<const double> phi) {
    validate_state(phi);
    const int n = model.dimension();
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double df = f.d1(j, phi);
        acc += f.d2(j, phi) + df * model.drift(j, phi) + df / model.stickiness;
    }
    return acc;
}

// L f = L^s f without the (1/s) term.
inline double apply_L(const GibbsModel& model, const TestFunction& f,
                      std::span<const double> phi) {
    validate_state(phi);
    const int n = model.dimension();
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += f.d2(j, phi) + f.d1(j, phi) * model.drift(j, phi);
    return acc;
}

// E(f,g) with its per-stratum breakdown E_B(f,g); the corner entry is 0.
struct FormValue {
    double value = 0.0;
    std::vector<double> per_stratum;  // indexed by mask
};

namespace detail {

inline StratumMassTable masses_or(const GibbsModel& model, const QuadConfig& cfg,
                                  const StratumMassTable* table) {
    return table != nullptr ? *table : stratum_masses(model, cfg);
}

}  // namespace detail

inline FormValue dirichlet_form(const GibbsModel& model, const TestFunction& f,
                                const TestFunction& g, const QuadConfig& cfg,
                                const StratumMassTable* table = nullptr) {
    const int n = model.dimension();
    const StratumMassTable masses = detail::masses_or(model, cfg, table);
    // The integrand needs both gradients, so it vanishes once any coordinate
    // leaves the smaller support.
    const double box = std::fmin(masses.tail_L, std::fmin(f.support_radius, g.support_radius));
    const double floor = 1e-13 * (1.0 + masses.total);
    FormValue out;
    out.per_stratum.assign(std::size_t{1} << n, 0.0);
    for (const StratumId& b : enumerate_strata(n)) {
        if (b.mask == 0) continue;
        const double weight = stratum_weight(n, model.stickiness, b).value;
        const double integral = face_integral(
            [&](std::span<const double> phi) {
                double grad = 0.0;
                for (int i = 0; i < n; ++i)
                    if (b.contains(i)) grad += f.d1(i, phi) * g.d1(i, phi);
                return grad * model.density_unnorm(phi);
            },
            b.mask, n, box, cfg.rel_tol, cfg.max_subdiv, floor);
        out.per_stratum[b.mask] = weight * integral / masses.total;
        out.value += out.per_stratum[b.mask];
    }
    return out;
}

// <nu_f, g>: the measure representation of E(f,.) after integration by parts.
// Every stratum carries -(d^2_i + b_i d_i)f over its own coordinates and the
// -(1/s) d_i f escape terms over the pinned ones; the corner contributes
// -(1/s) sum_i d_i f(0) g(0) with weight s^n rho(0).
inline double nu_f_pairing(const GibbsModel& model, const TestFunction& f, const TestFunction& g,
                           const QuadConfig& cfg, const StratumMassTable* table = nullptr) {
    const int n = model.dimension();
    const StratumMassTable masses = detail::masses_or(model, cfg, table);
    // Every term carries a derivative of f, so the f support bounds the box.
    const double box = std::fmin(masses.tail_L, f.support_radius);
    const double floor = 1e-13 * (1.0 + masses.total);
    double acc = 0.0;
    for (const StratumId& b : enumerate_strata(n)) {
        const double weight = stratum_weight(n, model.stickiness, b).value;
        const double integral = face_integral(
            [&](std::span<const double> phi) {
                double density = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (b.contains(i))
                        density += -f.d2(i, phi) - f.d1(i, phi) * model.drift(i, phi);
                    else
                        density += -f.d1(i, phi) / model.stickiness;
                }
                return density * g.value(phi) * model.density_unnorm(phi);
            },
            b.mask, n, box, cfg.rel_tol, cfg.max_subdiv, floor);
        acc += weight * integral;
    }
    return acc / masses.total;
}

// int f d nu_<g> with nu_<g> = 2 sum_B sum_{i in B} (d_i g)^2 mu_B.
inline double energy_measure_pairing(const GibbsModel& model, const TestFunction& g,
                                     const TestFunction& f, const QuadConfig& cfg,
                                     const StratumMassTable* table = nullptr) {
    const int n = model.dimension();
    const StratumMassTable masses = detail::masses_or(model, cfg, table);
    const double box = std::fmin(masses.tail_L, g.support_radius);
    const double floor = 1e-13 * (1.0 + masses.total);
    double acc = 0.0;
    for (const StratumId& b : enumerate_strata(n)) {
        if (b.mask == 0) continue;
        const double weight = stratum_weight(n, model.stickiness, b).value;
        const double integral = face_integral(
            [&](std::span<const double> phi) {
                double grad2 = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (!b.contains(i)) continue;
                    const double dg = g.d1(i, phi);
                    grad2 += dg * dg;
                }
                return grad2 * f.value(phi) * model.density_unnorm(phi);
            },
            b.mask, n, box, cfg.rel_tol, cfg.max_subdiv, floor);
        acc += weight * integral;
    }
    return 2.0 * acc / masses.total;
}

// Max |L^s f| over the supplied boundary samples; interior samples are
// ignored. Zero certifies f as Wentzell on the sampled strata.
inline double wentzell_residual(const GibbsModel& model, const TestFunction& f,
                                std::span<const InterfaceState> sample_states) {
    const int n = model.dimension();
    double residual = 0.0;
    for (const InterfaceState& state : sample_states) {
        if (static_cast<int>(state.heights.size()) != n) continue;
        if (state.stratum().popcount() == n) continue;  // not on the boundary
        residual = std::fmax(residual, std::abs(apply_L_s(model, f, state.view())));
    }
    return residual;
}

// Deterministic grid of boundary samples: for every proper stratum, levels
// box*i/per_axis on the free coordinates, zeros elsewhere.
inline std::vector<InterfaceState> boundary_samples(int n, double box, int per_axis) {
    std::vector<InterfaceState> out;
    for (const StratumId& b : enumerate_strata(n)) {
        if (b.popcount() == n) continue;
        std::vector<int> free_coords;
        for (int j = 0; j < n; ++j)
            if (b.contains(j)) free_coords.push_back(j);
        long combos = 1;
        for (std::size_t k = 0; k < free_coords.size(); ++k) combos *= per_axis;
        for (long c = 0; c < combos; ++c) {
            std::vector<double> phi(n, 0.0);
            long rem = c;
            for (int j : free_coords) {
                phi[j] = box * static_cast<double>(rem % per_axis + 1) / per_axis;
                rem /= per_axis;
            }
            out.emplace_back(std::move(phi));
        }
    }
    return out;
}

}  // namespace sticky
