#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kprice/equilibrium.hpp"
#include "kprice/order_stats.hpp"

namespace kprice {

struct Deviation {
    int bidder = 0;
    Strategy strategy;
};

struct SimulationConfig {
    AuctionSpec spec;
    // One strategy (everyone plays it) or exactly n.
    std::vector<Strategy> strategies;
    long long rounds = 0;
    unsigned long long seed = 0;
    int shards = 16;
    int threads = 0;
    // When set, every round is also played with this bidder switched to the
    // alternate strategy on the same drawn values; the report carries the
    // paired payoff difference.
    std::optional<Deviation> deviation;
    std::string trace_path;
    long long trace_limit = 100000;
};

struct SimulationReport {
    double mean_revenue = 0.0;
    double revenue_half_width_95 = 0.0;
    double mean_winner_payoff = 0.0;
    std::vector<double> bidder_mean_payoff;
    std::optional<double> deviation_gain;
    std::optional<double> deviation_gain_half_width_95;
    long long rounds = 0;
    unsigned long long seed = 0;
    int shards = 0;
    long long ties = 0;
    std::string rng;
    nlohmann::json to_json() const;
};

// Plays `rounds` auctions. Rounds are split across shards with generators
// derived from (seed, shard); shard aggregates merge in shard order, so the
// report is bit-identical for a fixed (seed, shards) pair no matter how many
// threads run.
SimulationReport run_simulation(const SimulationConfig& config);

// Monte Carlo payoff of one bidder holding valuation v and bidding x against
// n-1 opponents who draw values and play opp. Cross-checks the quadrature
// payoff. Ties on the top bid count as losses for the focal bidder.
McEstimate mc_focal_payoff(const Distribution& valuation, int n, const Strategy& opp,
                           const PaymentRule& payment, double v, double x, long long rounds,
                           unsigned long long seed, int shards = 16, int threads = 0);

} // namespace kprice
