#pragma once

#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "sticky/errors.hpp"

namespace sticky {

// 15-point Kronrod / 7-point Gauss pair on [-1,1] (QUADPACK dqk15 constants).
namespace gk {

inline constexpr double kNodes[8] = {
    0.991455371120812639206854697526329,  //
    0.949107912342758524526189684047851,  //
    0.864864423359769072789712788640926,  //
    0.741531185599394439863864773280788,  //
    0.586087235467691130294144838258730,  //
    0.405845151377397166906606412076961,  //
    0.207784955007898467600689403773245,  //
    0.000000000000000000000000000000000,
};

inline constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,  //
    0.063092092629978553290700663189204,  //
    0.104790010322250183839876322541518,  //
    0.140653259715525918745189590510238,  //
    0.169004726639267902826583426598550,  //
    0.190350578064785409913256402421014,  //
    0.204432940075298892414161999234649,  //
    0.209482141084727828012999174891714,
};

// Gauss weights for the odd Kronrod nodes 1,3,5,7 (0-based).
inline constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

}  // namespace gk

struct Panel {
    double a, b;
    double value;  // K15 estimate
    double error;  // |K15 - G7|
};

template <class F>
Panel gk15_panel(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_mid = f(mid);
    double k15 = gk::kKronrodW[7] * f_mid;
    double g7 = gk::kGaussW[3] * f_mid;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * gk::kNodes[i];
        const double pair = f(mid + dx) + f(mid - dx);
        k15 += gk::kKronrodW[i] * pair;
        if (i % 2 == 1) g7 += gk::kGaussW[i / 2] * pair;
    }
    return Panel{a, b, k15 * half, std::abs(k15 - g7) * std::abs(half)};
}

// Globally adaptive bisection: split the worst panel until the summed error
// estimate meets max(rel_tol*|sum|, abs_tol). Starts from several uniform
// panels so integrands supported on a narrow band cannot slip between the
// nodes of one wide panel. Deterministic for fixed inputs.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                          int max_subdiv = 2000, int initial_panels = 8) {
    struct Entry {
        double error;
        std::size_t order;
        std::size_t index;
        bool operator<(const Entry& o) const {
            return error != o.error ? error < o.error : order > o.order;
        }
    };

    std::vector<Panel> panels;
    panels.reserve(64);
    std::priority_queue<Entry> worst;
    double total = 0.0;
    double total_err = 0.0;
    for (int i = 0; i < initial_panels; ++i) {
        const double left = a + (b - a) * i / initial_panels;
        const double right = a + (b - a) * (i + 1) / initial_panels;
        panels.push_back(gk15_panel(f, left, right));
        worst.push({panels.back().error, panels.size() - 1, panels.size() - 1});
        total += panels.back().value;
        total_err += panels.back().error;
    }
    std::size_t order = panels.size();

    const auto tolerance = [&] { return std::fmax(rel_tol * std::abs(total), abs_tol); };

    while (total_err > tolerance()) {
        if (static_cast<int>(panels.size()) >= max_subdiv)
            throw err::ToleranceNotMet("quadrature: " + std::to_string(max_subdiv) +
                                       " panels reached with error " + std::to_string(total_err));
        const Entry top = worst.top();
        worst.pop();
        const Panel old = panels[top.index];
        const double mid = 0.5 * (old.a + old.b);
        const Panel left = gk15_panel(f, old.a, mid);
        const Panel right = gk15_panel(f, mid, old.b);
        total += left.value + right.value - old.value;
        total_err += left.error + right.error - old.error;
        panels[top.index] = left;
        worst.push({left.error, order++, top.index});
        panels.push_back(right);
        worst.push({right.error, order++, panels.size() - 1});
    }

    // Recompute the sum in panel order so the result does not depend on the
    // incremental update history.
    double sum = 0.0;
    for (const Panel& p : panels) sum += p.value;
    return sum;
}

}  // namespace sticky
