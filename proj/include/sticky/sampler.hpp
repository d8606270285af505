#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sticky/errors.hpp"
#include "sticky/gibbs.hpp"
#include "sticky/rng.hpp"

namespace sticky {

// Systematic-scan reversible-jump Metropolis-Hastings sampler for the mixed
// per-site conditional  s exp(-e_x(0)) delta_0 + exp(-e_x(t)) dt  on [0,inf),
// where e_x(t) is the local bond energy of height t at site x. Heights stay
// continuous; no grid is imposed here.
struct SamplerConfig {
    long sweeps = 0;
    double proposal_sigma = 1.0;      // scale of both the flip and the walk moves
    double atom_proposal_prob = 0.25; // chance of proposing a dry<->wet flip per visit
};

inline void validate_sampler_config(const SamplerConfig& cfg, std::vector<std::string>& errors) {
    if (!(cfg.proposal_sigma > 0.0))
        errors.push_back("sampler: proposal_sigma must be positive");
    if (!(cfg.atom_proposal_prob > 0.0 && cfg.atom_proposal_prob < 1.0))
        errors.push_back("sampler: atom_proposal_prob must lie in (0,1)");
}

// Local bond energy of placing height t at site x, neighbors fixed.
inline double site_energy(const GibbsModel& model, std::span<const double> phi, int site,
                          double t) {
    double e = 0.0;
    for (int nb : model.lattice.neighbors[site])
        e += model.potential.value(t - (nb >= 0 ? phi[nb] : 0.0));
    return e;
}

inline double half_normal_pdf(double sigma, double z) {
    return std::sqrt(2.0 / M_PI) / sigma * std::exp(-0.5 * z * z / (sigma * sigma));
}

// Acceptance probability for the wet(u) -> dry flip. The reverse proposal
// draws the wet height from the half-normal, whose density enters the ratio
// together with the atom weight s.
inline double flip_alpha_wet_to_dry(const GibbsModel& model, std::span<const double> phi,
                                    int site, double sigma, double u) {
    const double log_ratio = -site_energy(model, phi, site, 0.0) + site_energy(model, phi, site, u);
    const double ratio = model.stickiness * std::exp(log_ratio) * half_normal_pdf(sigma, u);
    return std::fmin(1.0, ratio);
}

inline double flip_alpha_dry_to_wet(const GibbsModel& model, std::span<const double> phi,
                                    int site, double sigma, double z) {
    const double log_ratio = -site_energy(model, phi, site, z) + site_energy(model, phi, site, 0.0);
    const double ratio =
        std::exp(log_ratio) / (model.stickiness * half_normal_pdf(sigma, z));
    return std::fmin(1.0, ratio);
}

namespace detail {

// Box-Muller; consumes exactly two uniforms.
inline double draw_normal(CounterRng& rng) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log1p(u1 - 1.0 + 0x1.0p-53));
    return r * std::cos(2.0 * M_PI * u2);
}

}  // namespace detail

// One systematic sweep; detailed balance holds site-wise against the mixed
// conditional.
inline void gibbs_sweep(const GibbsModel& model, std::vector<double>& phi,
                        const SamplerConfig& cfg, CounterRng& rng) {
    const int n = model.dimension();
    for (int site = 0; site < n; ++site) {
        const double branch = rng.uniform();
        if (branch < cfg.atom_proposal_prob) {
            if (phi[site] > 0.0) {
                const double alpha =
                    flip_alpha_wet_to_dry(model, phi, site, cfg.proposal_sigma, phi[site]);
                if (rng.uniform() < alpha) phi[site] = 0.0;
            } else {
                const double z = std::abs(detail::draw_normal(rng)) * cfg.proposal_sigma;
                const double alpha =
                    flip_alpha_dry_to_wet(model, phi, site, cfg.proposal_sigma, z);
                if (rng.uniform() < alpha) phi[site] = z;
            }
        } else if (phi[site] > 0.0) {
            // reflected random walk: q(t'|t) = N(t'-t) + N(t'+t) is symmetric
            const double proposal =
                std::abs(phi[site] + cfg.proposal_sigma * detail::draw_normal(rng));
            const double log_ratio = site_energy(model, phi, site, phi[site]) -
                                     site_energy(model, phi, site, proposal);
            if (std::log(rng.uniform() + 1e-300) < log_ratio) phi[site] = proposal;
        }
    }
}

// Burn-in heuristic: at least 100 sweeps per site.
inline InterfaceState sample_stationary(const GibbsModel& model, const SamplerConfig& cfg,
                                        CounterRng& rng) {
    const int n = model.dimension();
    if (cfg.sweeps < 100 * n)
        throw err::Validation({"sampler: sweeps = " + std::to_string(cfg.sweeps) +
                               " below the burn-in heuristic 100*n = " + std::to_string(100 * n)});
    std::vector<double> phi(n, 0.0);
    for (long sweep = 0; sweep < cfg.sweeps; ++sweep) gibbs_sweep(model, phi, cfg, rng);
    return InterfaceState{std::move(phi)};
}

}  // namespace sticky
