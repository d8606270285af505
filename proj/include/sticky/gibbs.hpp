#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sticky/errors.hpp"
#include "sticky/lattice.hpp"
#include "sticky/potential.hpp"
#include "sticky/strata.hpp"

namespace sticky {

// Interface heights over the lattice sites, one per site, all >= 0.
struct InterfaceState {
    std::vector<double> heights;

    InterfaceState() = default;
    explicit InterfaceState(std::vector<double> h) : heights(std::move(h)) {}
    InterfaceState(std::initializer_list<double> h) : heights(h) {}

    std::span<const double> view() const { return heights; }
    StratumId stratum() const { return stratum_of(heights); }
};

inline void validate_state(std::span<const double> heights) {
    (void)stratum_of(heights);  // throws NonFinite / Negative
}

// Lattice Gibbs model: Hamiltonian with zero boundary condition, unnormalized
// density exp(-H), and drift b_x = d/dphi_x ln(rho) = -V'(x, .).
// Immutable after construction; safe for shared concurrent reads.
struct GibbsModel {
    Lattice lattice;
    Potential potential;
    double stickiness = 1.0;
    double kappa = 0.0;               // int exp(-V), from the validation gate
    std::optional<double> log_z;      // filled by quadrature at small n

    int dimension() const { return lattice.n; }

    // H = 1/2 * sum over ordered closure pairs at distance 1 of V(phi_x - phi_y),
    // phi = 0 on the hull. Evaluated over unordered bonds.
    double hamiltonian(std::span<const double> phi) const {
        double h = lattice.boundary_boundary_pairs * potential.value(0.0);
        for (const auto& [i, j] : lattice.inner_pairs) h += potential.value(phi[i] - phi[j]);
        for (int i = 0; i < lattice.n; ++i)
            if (lattice.wall_bonds[i] > 0) h += lattice.wall_bonds[i] * potential.value(phi[i]);
        return h;
    }

    // V'(x, phi) = sum over closure neighbors y of V'(phi_x - phi_y) = d_x H.
    double grad_interaction(int site, std::span<const double> phi) const {
        if (site < 0 || site >= lattice.n)
            throw err::UnknownSite("gibbs: site " + std::to_string(site) + " outside 0.." +
                                   std::to_string(lattice.n - 1));
        double g = 0.0;
        for (int nb : lattice.neighbors[site])
            g += potential.deriv(phi[site] - (nb >= 0 ? phi[nb] : 0.0));
        return g;
    }

    double drift(int site, std::span<const double> phi) const {
        return -grad_interaction(site, phi);
    }

    double log_density_unnorm(std::span<const double> phi) const { return -hamiltonian(phi); }
    double density_unnorm(std::span<const double> phi) const {
        return std::exp(-hamiltonian(phi));
    }

    // Envelope bound for max_x |V'(x, phi)| over [0, box]^n: every site has
    // 2d closure neighbors and each bond difference lies in [-box, box].
    double max_abs_drift(double box) const {
        return 2.0 * lattice.d * potential.max_abs_deriv(box);
    }
};

inline GibbsModel make_gibbs_model(Lattice lattice, Potential potential, double stickiness) {
    if (!(stickiness > 0.0) || !std::isfinite(stickiness))
        throw err::InvalidStickiness("gibbs: stickiness must be in (0,inf), got " +
                                     std::to_string(stickiness));
    GibbsModel m;
    m.kappa = validate_potential(potential);
    m.lattice = std::move(lattice);
    m.potential = std::move(potential);
    m.stickiness = stickiness;
    return m;
}

inline GibbsModel make_gibbs_model(int d, int N, Potential potential, double stickiness) {
    return make_gibbs_model(build_lattice(d, N), std::move(potential), stickiness);
}

}  // namespace sticky
