#pragma once

#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "kprice/errors.hpp"
#include "kprice/numerics.hpp"

namespace kprice {

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_intervals = 16384;
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 1;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1], positive half.
// Odd indices are the embedded Gauss-7 nodes.
inline constexpr double gk_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0,
};
inline constexpr double gk_weights_k[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
};
inline constexpr double gk_weights_g[4] = {
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
};

struct Panel {
    double a, b;
    double k15, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

inline Panel gk15(const std::function<double(double)>& f, double a, double b) {
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    double fc = f(mid);
    double k15 = gk_weights_k[7] * fc;
    double g7 = gk_weights_g[3] * fc;
    for (int i = 0; i < 7; ++i) {
        double off = half * gk_nodes[i];
        double pair = f(mid - off) + f(mid + off);
        k15 += gk_weights_k[i] * pair;
        if (i % 2 == 1) g7 += gk_weights_g[i / 2] * pair;
    }
    k15 *= half;
    g7 *= half;
    return Panel{a, b, k15, std::fabs(k15 - g7)};
}

} // namespace detail

// Globally adaptive Gauss-Kronrod 7-15: repeatedly bisect the panel with the
// largest error estimate until the summed estimate meets the tolerance.
inline QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                            const QuadOptions& opts = {}) {
    if (a == b) return {0.0, 0.0, 0};
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::priority_queue<detail::Panel> panels;
    panels.push(detail::gk15(f, a, b));
    double value = panels.top().k15;
    double err = panels.top().err;
    int count = 1;
    while (err > std::max(opts.abs_tol, opts.rel_tol * std::fabs(value))) {
        if (count >= opts.max_intervals) {
            throw numeric_error("integrate: " + std::to_string(count) +
                                " panels used, error estimate " + format_double(err) +
                                " still above tolerance");
        }
        detail::Panel worst = panels.top();
        panels.pop();
        double mid = 0.5 * (worst.a + worst.b);
        detail::Panel left = detail::gk15(f, worst.a, mid);
        detail::Panel right = detail::gk15(f, mid, worst.b);
        value += left.k15 + right.k15 - worst.k15;
        err += left.err + right.err - worst.err;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    return {sign * value, err, count};
}

} // namespace kprice
