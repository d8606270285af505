#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sticky {

// Member of C^2_c(E): evaluators for f, d_j f, d^2_j f, all exact (no numeric
// differentiation; products use the product rule). Vanishes once any
// coordinate exceeds support_radius.
struct TestFunction {
    std::string name;
    double support_radius = 0.0;
    std::function<double(std::span<const double>)> value;
    std::function<double(int, std::span<const double>)> d1;
    std::function<double(int, std::span<const double>)> d2;

    double operator()(std::span<const double> phi) const { return value(phi); }
};

namespace kernels {

// psi(u) = (1-u^2)^3 on [0,1]: C^2 with two vanishing derivatives at u=1.
inline double psi(double u) {
    if (u >= 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return w * w * w;
}
inline double psi_d1(double u) {
    if (u >= 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return -6.0 * u * w * w;
}
inline double psi_d2(double u) {
    if (u >= 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return -6.0 * w * w + 24.0 * u * u * w;
}

// C^2 step from 1 down to 0 over [0,1] (quintic smoothstep complement).
inline double step(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}
inline double step_d1(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double w = 1.0 - t;
    return -30.0 * t * t * w * w;
}
inline double step_d2(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
}

// eta(u) = 64 u^3 (1-u)^3 on [0,1]: triple zeros at both ends, peak 1 at 1/2.
inline double eta(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double w = u * (1.0 - u);
    return 64.0 * w * w * w;
}
inline double eta_d1(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double w = u * (1.0 - u);
    return 192.0 * w * w * (1.0 - 2.0 * u);
}
inline double eta_d2(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return 384.0 * u * (1.0 - u) * (1.0 - 5.0 * u + 5.0 * u * u);
}

}  // namespace kernels

// One coordinate factor of a separable product.
struct Factor {
    std::function<double(double)> value;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
};

inline TestFunction separable(std::string name, double support_radius,
                              std::vector<Factor> factors) {
    auto shared = std::make_shared<std::vector<Factor>>(std::move(factors));
    TestFunction f;
    f.name = std::move(name);
    f.support_radius = support_radius;
    f.value = [shared](std::span<const double> phi) {
        double prod = 1.0;
        for (std::size_t j = 0; j < shared->size(); ++j) prod *= (*shared)[j].value(phi[j]);
        return prod;
    };
    f.d1 = [shared](int j, std::span<const double> phi) {
        double prod = (*shared)[j].d1(phi[j]);
        for (std::size_t k = 0; k < shared->size(); ++k)
            if (static_cast<int>(k) != j) prod *= (*shared)[k].value(phi[k]);
        return prod;
    };
    f.d2 = [shared](int j, std::span<const double> phi) {
        double prod = (*shared)[j].d2(phi[j]);
        for (std::size_t k = 0; k < shared->size(); ++k)
            if (static_cast<int>(k) != j) prod *= (*shared)[k].value(phi[k]);
        return prod;
    };
    return f;
}

// Product bump prod_j psi(phi_j / R_j).
inline TestFunction bump(std::vector<double> radii, std::string name = "bump") {
    double support = 0.0;
    std::vector<Factor> fs;
    for (double r : radii) {
        support = std::fmax(support, r);
        fs.push_back({[r](double x) { return kernels::psi(x / r); },
                      [r](double x) { return kernels::psi_d1(x / r) / r; },
                      [r](double x) { return kernels::psi_d2(x / r) / (r * r); }});
    }
    return separable(std::move(name), support, std::move(fs));
}

inline TestFunction bump(int n, double radius, std::string name = "bump") {
    return bump(std::vector<double>(n, radius), std::move(name));
}

// Truncated coordinate function: phi_j on [0,k+1)^n, 0 beyond [k+2,inf)^n.
inline TestFunction trunc_coord(int n, int j, double k) {
    std::vector<Factor> fs;
    for (int i = 0; i < n; ++i) {
        if (i == j) {
            fs.push_back({[k](double x) { return x * kernels::step(x - (k + 1.0)); },
                          [k](double x) {
                              return kernels::step(x - (k + 1.0)) +
                                     x * kernels::step_d1(x - (k + 1.0));
                          },
                          [k](double x) {
                              return 2.0 * kernels::step_d1(x - (k + 1.0)) +
                                     x * kernels::step_d2(x - (k + 1.0));
                          }});
        } else {
            fs.push_back({[k](double x) { return kernels::step(x - (k + 1.0)); },
                          [k](double x) { return kernels::step_d1(x - (k + 1.0)); },
                          [k](double x) { return kernels::step_d2(x - (k + 1.0)); }});
        }
    }
    return separable("pi_" + std::to_string(j + 1) + "^" + std::to_string(k), k + 2.0,
                     std::move(fs));
}

// phi_m times the product bump; has unit slope at the corner.
inline TestFunction mono_bump(int n, int m, double radius, std::string name = "xbump") {
    std::vector<Factor> fs;
    for (int i = 0; i < n; ++i) {
        const double r = radius;
        if (i == m) {
            fs.push_back({[r](double x) { return x * kernels::psi(x / r); },
                          [r](double x) { return kernels::psi(x / r) + x * kernels::psi_d1(x / r) / r; },
                          [r](double x) {
                              return 2.0 * kernels::psi_d1(x / r) / r +
                                     x * kernels::psi_d2(x / r) / (r * r);
                          }});
        } else {
            fs.push_back({[r](double x) { return kernels::psi(x / r); },
                          [r](double x) { return kernels::psi_d1(x / r) / r; },
                          [r](double x) { return kernels::psi_d2(x / r) / (r * r); }});
        }
    }
    return separable(std::move(name), radius, std::move(fs));
}

// Constant 1 on [0,P]^n, C^2 decay to 0 over [P, P+W] per coordinate.
inline TestFunction plateau(int n, double p, double w, std::string name = "plateau") {
    std::vector<Factor> fs;
    for (int i = 0; i < n; ++i)
        fs.push_back({[p, w](double x) { return kernels::step((x - p) / w); },
                      [p, w](double x) { return kernels::step_d1((x - p) / w) / w; },
                      [p, w](double x) { return kernels::step_d2((x - p) / w) / (w * w); }});
    return separable(std::move(name), p + w, std::move(fs));
}

// Blend between the bump and a face-flat profile: at theta=1 every first and
// second partial vanishes on all boundary strata, so L^s f = 0 there.
inline TestFunction face_flat_blend(int n, double theta, double radius) {
    std::vector<Factor> fs;
    for (int i = 0; i < n; ++i) {
        const double r = radius, t = theta;
        fs.push_back(
            {[r, t](double x) { return (1.0 - t) * kernels::psi(x / r) + t * kernels::eta(x / r); },
             [r, t](double x) {
                 return ((1.0 - t) * kernels::psi_d1(x / r) + t * kernels::eta_d1(x / r)) / r;
             },
             [r, t](double x) {
                 return ((1.0 - t) * kernels::psi_d2(x / r) + t * kernels::eta_d2(x / r)) / (r * r);
             }});
    }
    return separable("blend_" + std::to_string(theta), radius, std::move(fs));
}

// Exact product-rule combination; keeps identity checks at quadrature precision.
inline TestFunction product(const TestFunction& f, const TestFunction& g,
                            std::string name = "") {
    TestFunction out;
    out.name = name.empty() ? f.name + "*" + g.name : std::move(name);
    out.support_radius = std::fmin(f.support_radius, g.support_radius);
    out.value = [f, g](std::span<const double> phi) { return f.value(phi) * g.value(phi); };
    out.d1 = [f, g](int j, std::span<const double> phi) {
        return f.d1(j, phi) * g.value(phi) + f.value(phi) * g.d1(j, phi);
    };
    out.d2 = [f, g](int j, std::span<const double> phi) {
        return f.d2(j, phi) * g.value(phi) + 2.0 * f.d1(j, phi) * g.d1(j, phi) +
               f.value(phi) * g.d2(j, phi);
    };
    return out;
}

inline TestFunction square(const TestFunction& g) { return product(g, g, g.name + "^2"); }

// Default catalog scaled to the truncation box.
inline std::vector<TestFunction> default_catalog(int n, double box) {
    std::vector<TestFunction> cat;
    cat.push_back(bump(n, 0.5 * box));
    cat.push_back(mono_bump(n, 0, 0.5 * box));
    cat.push_back(trunc_coord(n, 0, std::fmax(1.0, 0.5 * box - 1.0)));
    cat.push_back(plateau(n, box / 3.0, box / 3.0));
    cat.push_back(bump(n, 0.7 * box, "bump_wide"));
    cat.push_back(face_flat_blend(n, 0.5, 0.5 * box));
    return cat;
}

}  // namespace sticky
