#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sticky/errors.hpp"
#include "sticky/strata.hpp"

namespace sticky {

// The box {1,...,N}^d with zero boundary condition on the distance-1 hull.
// Sites carry linear indices 0..n-1 in row-major order of their coordinates;
// a neighbor entry of -1 denotes a boundary site (height pinned to 0).
struct Lattice {
    int d = 1;
    int N = 1;
    int n = 1;
    std::vector<std::vector<int>> neighbors;       // per site, 2d entries
    std::vector<std::pair<int, int>> inner_pairs;  // unordered interior-interior bonds
    std::vector<int> wall_bonds;                   // per site, count of boundary neighbors
    int boundary_boundary_pairs = 0;               // adjacent hull-hull bonds, each V(0)

    int site_index(const std::vector<int>& coords) const {
        int idx = 0;
        for (int k = 0; k < d; ++k) idx = idx * N + (coords[k] - 1);
        return idx;
    }
};

inline Lattice build_lattice(int d, int N) {
    if (d < 1 || N < 1) throw err::DimensionTooLarge("gibbs: require d >= 1 and N >= 1");
    double n_check = 1.0;
    for (int k = 0; k < d; ++k) n_check *= N;
    if (n_check > kMaxDimension)
        throw err::DimensionTooLarge("gibbs: N^d = " + std::to_string(n_check) + " exceeds cap " +
                                     std::to_string(kMaxDimension));

    Lattice lat;
    lat.d = d;
    lat.N = N;
    lat.n = static_cast<int>(n_check);
    lat.neighbors.assign(lat.n, {});
    lat.wall_bonds.assign(lat.n, 0);

    // Enumerate interior sites in row-major coordinate order.
    std::vector<int> coords(d, 1);
    for (int idx = 0; idx < lat.n; ++idx) {
        for (int k = 0; k < d; ++k) {
            for (int dir : {-1, +1}) {
                std::vector<int> nb = coords;
                nb[k] += dir;
                const bool inside = nb[k] >= 1 && nb[k] <= N;
                if (inside) {
                    const int nidx = lat.site_index(nb);
                    lat.neighbors[idx].push_back(nidx);
                    if (nidx > idx) lat.inner_pairs.emplace_back(idx, nidx);
                } else {
                    lat.neighbors[idx].push_back(-1);
                    ++lat.wall_bonds[idx];
                }
            }
        }
        for (int k = d - 1; k >= 0; --k) {
            if (++coords[k] <= N) break;
            coords[k] = 1;
        }
    }

    // Hull sites are the distance-1 neighbors of {1..N}^d outside it; two
    // adjacent hull sites contribute a constant V(0) bond. Each of the 2d hull
    // sides is a {1..N}^(d-1) slab holding (d-1)*N^(d-2)*(N-1) adjacent pairs;
    // sites on different sides are never at distance 1.
    if (d >= 2) {
        double nd2 = 1.0;
        for (int k = 0; k < d - 2; ++k) nd2 *= N;
        const double slab_pairs = static_cast<double>(d - 1) * nd2 * (N - 1);
        lat.boundary_boundary_pairs = static_cast<int>(2 * d * slab_pairs);
    }
    return lat;
}

}  // namespace sticky
