#include "kprice/order_stats.hpp"

#include <cmath>
#include <vector>

#include "kprice/numerics.hpp"
#include "kprice/rng.hpp"

namespace kprice {

namespace {

void check_field(const OpponentField& field, int k) {
    if (field.n < 2) {
        throw invalid_argument_error("opponent field: need n >= 2 bidders, got " +
                                     std::to_string(field.n));
    }
    if (k < 2 || k > field.n) {
        throw invalid_argument_error("k-price rule: need 2 <= k <= n, got k=" + std::to_string(k) +
                                     ", n=" + std::to_string(field.n));
    }
}

} // namespace

double joint_cdf(const OpponentField& field, int k, double t, double x) {
    check_field(field, k);
    const auto& d = field.bid_distribution;
    if (t > x) t = x;
    double ft = d.cdf(t);
    double fx = d.cdf(x);
    int n = field.n;
    double sum = 0.0;
    for (int p = 0; p <= k - 2; ++p) {
        double c = static_cast<double>(binomial(n - 1, p));
        sum += c * std::pow(ft, n - 1 - p) * std::pow(fx - ft, p);
    }
    return sum;
}

double joint_density(const OpponentField& field, int k, double t, double x) {
    check_field(field, k);
    if (t > x) return 0.0;
    const auto& d = field.bid_distribution;
    double ft = d.cdf(t);
    double fx = d.cdf(x);
    int n = field.n;
    double c = kprice_density_constant(n, k);
    return c * std::pow(ft, n - k) * std::pow(fx - ft, k - 2) * d.pdf(t);
}

McEstimate mc_joint_probability(const OpponentField& field, int k, double t, double x,
                                long long rounds, unsigned long long seed, int shards,
                                int threads) {
    check_field(field, k);
    if (rounds < 1) throw invalid_argument_error("mc_joint_probability: rounds must be positive");
    if (shards < 1) throw invalid_argument_error("mc_joint_probability: shards must be positive");
    if (shards > rounds) shards = static_cast<int>(rounds);

    const auto& d = field.bid_distribution;
    int opponents = field.n - 1;
    std::vector<long long> hits(shards, 0);
    parallel_shards(shards, threads, [&](int s) {
        long long mine = rounds / shards + (s < rounds % shards ? 1 : 0);
        auto rng = make_shard_rng(seed, s);
        long long count = 0;
        for (long long r = 0; r < mine; ++r) {
            int above_t = 0;
            bool above_x = false;
            for (int i = 0; i < opponents; ++i) {
                double b = d.quantile(canonical(rng));
                if (b > t) ++above_t;
                if (b > x) above_x = true;
            }
            if (!above_x && above_t <= k - 2) ++count;
        }
        hits[s] = count;
    });

    long long total = 0;
    for (long long h : hits) total += h;
    double p = static_cast<double>(total) / static_cast<double>(rounds);
    double hw = 1.959964 * std::sqrt(p * (1.0 - p) / static_cast<double>(rounds));
    return McEstimate{p, hw, rounds, seed, shards};
}

std::pair<Rational, Rational> beta_integral_identity(int p, int m) {
    if (p < 0 || m < 0) throw invalid_argument_error("beta_integral_identity: need p, m >= 0");
    Rational lhs = 0;
    for (int i = 0; i <= p; ++i) {
        Rational term(binomial(p, i), m + i + 1);
        lhs += (i % 2 == 0) ? term : -term;
    }
    Rational rhs(factorial(p) * factorial(m), factorial(p + m + 1));
    return {lhs, rhs};
}

std::pair<Rational, Rational> alternating_sum_identity(int n, int k) {
    if (k < 2 || k > n) {
        throw invalid_argument_error("alternating_sum_identity: need 2 <= k <= n, got k=" +
                                     std::to_string(k) + ", n=" + std::to_string(n));
    }
    Rational lhs = 0;
    for (int p = 0; p <= k - 2; ++p) {
        Rational term(binomial(k - 2, p), n - 1 - p);
        lhs += ((k - 2 - p) % 2 == 0) ? term : -term;
    }
    Rational rhs(factorial(n - k) * factorial(k - 2), factorial(n - 1));
    return {lhs, rhs};
}

} // namespace kprice
