#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "kprice/errors.hpp"

namespace kprice {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt factorial(int n) {
    if (n < 0) throw invalid_argument_error("factorial: negative argument " + std::to_string(n));
    BigInt r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

inline BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

// (n-1)! / ((n-k)! (k-2)!), the constant in front of the k-price win density.
inline double kprice_density_constant(int n, int k) {
    Rational c(factorial(n - 1), factorial(n - k) * factorial(k - 2));
    return static_cast<double>(c);
}

// Falling product c (c-1) ... (c-m+1) for real c.
inline double falling_product(double c, int m) {
    double r = 1.0;
    for (int i = 0; i < m; ++i) r *= (c - i);
    return r;
}

} // namespace kprice
