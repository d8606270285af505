#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "sticky/errors.hpp"
#include "sticky/integrate.hpp"

namespace sticky {

// Pair interaction potential. Built-in families are even polynomials
//   gaussian:  V(r) = a r^2 / 2
//   quartic:   V(r) = a r^2 / 2 + c r^4 / 4
// so symmetry and C1 hold by construction; integrability of exp(-V) is
// still checked numerically at model construction. Custom potentials pass
// through the same gate plus symmetry/C1 probes.
enum class PotentialFamily { gaussian, quartic, custom };

struct Potential {
    PotentialFamily family = PotentialFamily::gaussian;
    double a = 1.0;
    double c = 0.0;
    std::string name = "gaussian";
    std::function<double(double)> custom_v;
    std::function<double(double)> custom_dv;

    double value(double r) const {
        switch (family) {
            case PotentialFamily::gaussian: return 0.5 * a * r * r;
            case PotentialFamily::quartic: return 0.5 * a * r * r + 0.25 * c * r * r * r * r;
            case PotentialFamily::custom: return custom_v(r);
        }
        return 0.0;
    }

    double deriv(double r) const {
        switch (family) {
            case PotentialFamily::gaussian: return a * r;
            case PotentialFamily::quartic: return a * r + c * r * r * r;
            case PotentialFamily::custom: return custom_dv(r);
        }
        return 0.0;
    }

    // Global minimum of V; the lower bound -b of the codomain.
    double min_value() const {
        switch (family) {
            case PotentialFamily::gaussian: return a >= 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
            case PotentialFamily::quartic:
                if (c > 0.0 && a < 0.0) return -a * a / (4.0 * c);
                if (c >= 0.0) return a >= 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
                return -std::numeric_limits<double>::infinity();
            case PotentialFamily::custom: {
                double lo = 0.0;
                for (double r = 0.0; r <= 64.0; r += 1.0 / 64.0) lo = std::fmin(lo, value(r));
                return lo;
            }
        }
        return 0.0;
    }

    // max |V'| over [-r_max, r_max]; monotone envelope for the built-ins.
    double max_abs_deriv(double r_max) const {
        switch (family) {
            case PotentialFamily::gaussian: return std::abs(a) * r_max;
            case PotentialFamily::quartic:
                return std::abs(a) * r_max + std::abs(c) * r_max * r_max * r_max;
            case PotentialFamily::custom: {
                double hi = 0.0;
                const int samples = 4096;
                for (int i = 0; i <= samples; ++i)
                    hi = std::fmax(hi, std::abs(deriv(r_max * i / samples)));
                return hi;
            }
        }
        return 0.0;
    }

    static Potential gaussian(double a) {
        Potential p;
        p.family = PotentialFamily::gaussian;
        p.a = a;
        p.name = "gaussian";
        return p;
    }

    static Potential quartic(double a, double c) {
        Potential p;
        p.family = PotentialFamily::quartic;
        p.a = a;
        p.c = c;
        p.name = "quartic";
        return p;
    }

    static Potential custom(std::string name, std::function<double(double)> v,
                            std::function<double(double)> dv) {
        Potential p;
        p.family = PotentialFamily::custom;
        p.name = std::move(name);
        p.custom_v = std::move(v);
        p.custom_dv = std::move(dv);
        return p;
    }
};

namespace detail {

inline void check_symmetry(const Potential& p) {
    for (double r : {0.13, 0.41, 0.97, 1.61, 2.71, 4.3, 7.9}) {
        const double plus = p.value(r);
        const double minus = p.value(-r);
        if (std::abs(plus - minus) > 1e-10 * (1.0 + std::abs(plus)))
            throw err::NotSymmetric("potential '" + p.name + "': V(" + std::to_string(r) +
                                    ") != V(-" + std::to_string(r) + ")");
    }
}

inline void check_c1(const Potential& p) {
    // Derivative must match a central difference of V away from kinks and be
    // continuous across 0; |r| fails the second probe.
    const double fd_step = 1e-6;
    for (double r : {-2.3, -0.7, 0.5, 1.9, 3.7}) {
        const double fd = (p.value(r + fd_step) - p.value(r - fd_step)) / (2.0 * fd_step);
        const double dv = p.deriv(r);
        if (std::abs(fd - dv) > 1e-4 * (1.0 + std::abs(dv)))
            throw err::NotC1("potential '" + p.name + "': V' inconsistent with V near r=" +
                             std::to_string(r));
    }
    const double jump = std::abs(p.deriv(1e-7) - p.deriv(-1e-7));
    if (jump > 1e-3 * (1.0 + p.max_abs_deriv(1.0)))
        throw err::NotC1("potential '" + p.name + "': V' jumps at 0 by " + std::to_string(jump));
}

// Smallest r with exp(-V) below the target on a doubling scan, requiring the
// integrand to keep decaying past it. Conservative: a potential whose tail
// decays slower than the scan reaches is reported as divergent.
inline double decay_radius(const Potential& p, double log_target) {
    for (double r = 1.0; r <= 0x1p26; r *= 2.0) {
        if (p.value(r) >= log_target && p.value(-r) >= log_target && p.value(2.0 * r) >= p.value(r) &&
            p.value(-2.0 * r) >= p.value(-r))
            return r;
    }
    return -1.0;
}

}  // namespace detail

// Condition gate: returns kappa = int exp(-V) dr by adaptive quadrature at
// relative tolerance 1e-8, or throws NotSymmetric/NotC1/KappaDiverges.
inline double validate_potential(const Potential& p) {
    detail::check_symmetry(p);
    detail::check_c1(p);

    bool diverges = false;
    if (p.family == PotentialFamily::gaussian) {
        diverges = !(p.a > 0.0);
    } else if (p.family == PotentialFamily::quartic) {
        diverges = p.c < 0.0 || (p.c == 0.0 && !(p.a > 0.0));
    }
    const double radius = diverges ? -1.0 : detail::decay_radius(p, 45.0);
    if (radius < 0.0)
        throw err::KappaDiverges("potential '" + p.name + "': exp(-V) is not integrable");

    return integrate_adaptive([&](double r) { return std::exp(-p.value(r)); }, -radius, radius,
                              1e-8, 0.0, 4000);
}

}  // namespace sticky
