#pragma once

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "kprice/errors.hpp"

namespace kprice {

// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// Root of a strictly increasing f on [lo, hi] by bisection.
// Endpoints are clamped: f(lo) >= 0 returns lo, f(hi) <= 0 returns hi.
inline double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                                double tol = 1e-14, int max_iter = 200) {
    double flo = f(lo);
    if (flo >= 0.0) return lo;
    double fhi = f(hi);
    if (fhi <= 0.0) return hi;
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Golden-section maximization of f on [lo, hi] down to bracket width `tol`.
// Returns the bracket midpoint.
inline double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                 double tol = 1e-8) {
    static const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Central finite difference of given order (1..4) with one Richardson
// extrapolation step: D = (4 D(h/2) - D(h)) / 3.
inline double central_difference(const std::function<double(double)>& f, double x, int order,
                                 double h) {
    auto stencil = [&](double s) -> double {
        switch (order) {
        case 1:
            return (f(x + s) - f(x - s)) / (2.0 * s);
        case 2:
            return (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s);
        case 3:
            return (f(x + 2.0 * s) - 2.0 * f(x + s) + 2.0 * f(x - s) - f(x - 2.0 * s)) /
                   (2.0 * s * s * s);
        case 4:
            return (f(x + 2.0 * s) - 4.0 * f(x + s) + 6.0 * f(x) - 4.0 * f(x - s) +
                    f(x - 2.0 * s)) /
                   (s * s * s * s);
        default:
            throw invalid_argument_error("central_difference: order must be in [1,4], got " +
                                         std::to_string(order));
        }
    };
    double coarse = stencil(h);
    double fine = stencil(0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

inline bool close_abs(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
    double scale = std::max(std::fabs(a), std::fabs(b));
    return std::fabs(a - b) <= std::max(abs_floor, rel * scale);
}

} // namespace kprice
