#pragma once

#include <utility>

#include "kprice/distribution.hpp"
#include "kprice/rational.hpp"

namespace kprice {

// n symmetric bidders; one is focal, so n-1 independent opponent bids are
// drawn from bid_distribution.
struct OpponentField {
    int n;
    Distribution bid_distribution;
};

// P(the (k-1)-th highest of the n-1 opponent bids <= t and the highest <= x).
// Winning at bid x and paying at most t is exactly this event for a k-price
// rule. Constant in t beyond x.
double joint_cdf(const OpponentField& field, int k, double t, double x);

// Partial derivative of joint_cdf in t: the payment density at t given the
// field tops out below x.
double joint_density(const OpponentField& field, int k, double t, double x);

struct McEstimate {
    double estimate = 0.0;
    double half_width_95 = 0.0;
    long long rounds = 0;
    unsigned long long seed = 0;
    int shards = 0;
};

// Sharded Monte Carlo estimate of joint_cdf. Bit-identical for a fixed
// (seed, shards) pair regardless of thread count.
McEstimate mc_joint_probability(const OpponentField& field, int k, double t, double x,
                                long long rounds, unsigned long long seed, int shards = 16,
                                int threads = 0);

// Exact rational (lhs, rhs) pairs for the two identities the closed-form
// solution rests on. Equality must hold with zero tolerance.
//
// integral_0^1 (1-u)^p u^m du = p! m! / (p+m+1)!,
// with the lhs expanded binomially and integrated term by term.
std::pair<Rational, Rational> beta_integral_identity(int p, int m);

// sum_{p=0}^{k-2} (-1)^(k-2-p) C(k-2,p) / (n-1-p) = (n-k)! (k-2)! / (n-1)!.
std::pair<Rational, Rational> alternating_sum_identity(int n, int k);

} // namespace kprice
