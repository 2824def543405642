#include "kprice/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kprice/numerics.hpp"
#include "kprice/rng.hpp"

namespace kprice {

namespace {

constexpr double kZ95 = 1.959964;

struct Welford {
    long long count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        double d = x - mean;
        mean += d / double(count);
        m2 += d * (x - mean);
    }
    void merge(const Welford& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        double d = o.mean - mean;
        long long total = count + o.count;
        mean += d * double(o.count) / double(total);
        m2 += o.m2 + d * d * double(count) * double(o.count) / double(total);
        count = total;
    }
    double half_width() const {
        if (count < 2) return 0.0;
        double var = m2 / double(count - 1);
        return kZ95 * std::sqrt(var / double(count));
    }
};

double combination_payment(const std::vector<double>& sorted_desc, const CoefficientVector& cv) {
    double pay = 0.0;
    for (int k = 1; k <= cv.s(); ++k) {
        pay += cv.alpha(k) * sorted_desc[static_cast<size_t>(k - 1)];
    }
    return pay;
}

struct RoundOutcome {
    int winner;
    double payment;
    bool tie;
};

RoundOutcome settle(const std::vector<double>& bids, const PaymentRule& payment,
                    std::vector<double>& scratch) {
    int winner = 0;
    for (size_t i = 1; i < bids.size(); ++i) {
        if (bids[i] > bids[winner]) winner = static_cast<int>(i);
    }
    bool tie = false;
    for (size_t i = 0; i < bids.size(); ++i) {
        if (static_cast<int>(i) != winner && bids[i] == bids[winner]) tie = true;
    }
    scratch = bids;
    std::sort(scratch.begin(), scratch.end(), std::greater<>());
    double pay;
    if (const auto* kp = std::get_if<KPrice>(&payment)) {
        pay = scratch[static_cast<size_t>(kp->k - 1)];
    } else {
        pay = combination_payment(scratch, std::get<CoefficientVector>(payment));
    }
    return {winner, pay, tie};
}

struct ShardAggregate {
    Welford revenue;
    Welford winner_payoff;
    Welford deviation_diff;
    std::vector<double> bidder_payoff_sum;
    long long ties = 0;
    std::string trace;
};

} // namespace

SimulationReport run_simulation(const SimulationConfig& config) {
    config.spec.validate();
    int n = config.spec.n;
    if (config.rounds < 1) throw invalid_argument_error("simulate: rounds must be positive");
    if (config.shards < 1) throw invalid_argument_error("simulate: shards must be positive");
    if (config.strategies.size() != 1 && config.strategies.size() != static_cast<size_t>(n)) {
        throw invalid_argument_error("simulate: need 1 or n strategies, got " +
                                     std::to_string(config.strategies.size()));
    }
    if (config.deviation && (config.deviation->bidder < 0 || config.deviation->bidder >= n)) {
        throw invalid_argument_error("simulate: deviating bidder index out of range");
    }
    int shards = config.shards > config.rounds ? static_cast<int>(config.rounds) : config.shards;

    auto strategy_of = [&](int i) -> const Strategy& {
        return config.strategies.size() == 1 ? config.strategies[0]
                                             : config.strategies[static_cast<size_t>(i)];
    };

    const Distribution& vals = config.spec.valuation;
    bool want_trace = !config.trace_path.empty();
    std::vector<ShardAggregate> agg(static_cast<size_t>(shards));

    parallel_shards(shards, config.threads, [&](int s) {
        long long mine = config.rounds / shards + (s < config.rounds % shards ? 1 : 0);
        long long offset = 0;
        for (int i = 0; i < s; ++i) {
            offset += config.rounds / shards + (i < config.rounds % shards ? 1 : 0);
        }
        auto rng = make_shard_rng(config.seed, s);
        ShardAggregate& a = agg[static_cast<size_t>(s)];
        a.bidder_payoff_sum.assign(static_cast<size_t>(n), 0.0);
        std::ostringstream trace;

        std::vector<double> values(static_cast<size_t>(n));
        std::vector<double> bids(static_cast<size_t>(n));
        std::vector<double> scratch;
        for (long long r = 0; r < mine; ++r) {
            for (int i = 0; i < n; ++i) values[static_cast<size_t>(i)] = vals.quantile(canonical(rng));
            for (int i = 0; i < n; ++i) {
                bids[static_cast<size_t>(i)] = strategy_of(i)(values[static_cast<size_t>(i)]);
            }
            RoundOutcome base = settle(bids, config.spec.payment, scratch);
            double winner_value = values[static_cast<size_t>(base.winner)];
            a.revenue.add(base.payment);
            a.winner_payoff.add(winner_value - base.payment);
            a.bidder_payoff_sum[static_cast<size_t>(base.winner)] += winner_value - base.payment;
            if (base.tie) ++a.ties;

            if (config.deviation) {
                int db = config.deviation->bidder;
                double base_payoff =
                    base.winner == db ? values[static_cast<size_t>(db)] - base.payment : 0.0;
                double saved = bids[static_cast<size_t>(db)];
                bids[static_cast<size_t>(db)] =
                    config.deviation->strategy(values[static_cast<size_t>(db)]);
                RoundOutcome dev = settle(bids, config.spec.payment, scratch);
                double dev_payoff =
                    dev.winner == db ? values[static_cast<size_t>(db)] - dev.payment : 0.0;
                bids[static_cast<size_t>(db)] = saved;
                a.deviation_diff.add(dev_payoff - base_payoff);
            }

            long long global_round = offset + r;
            if (want_trace && global_round < config.trace_limit) {
                trace << global_round << ',' << base.winner << ',' << format_double(base.payment)
                      << '\n';
            }
        }
        a.trace = trace.str();
    });

    SimulationReport rep;
    rep.rounds = config.rounds;
    rep.seed = config.seed;
    rep.shards = shards;
    rep.rng = rng_description();
    Welford revenue, winner_payoff, deviation_diff;
    std::vector<double> payoff_sum(static_cast<size_t>(n), 0.0);
    for (const auto& a : agg) {
        revenue.merge(a.revenue);
        winner_payoff.merge(a.winner_payoff);
        deviation_diff.merge(a.deviation_diff);
        for (int i = 0; i < n; ++i) payoff_sum[static_cast<size_t>(i)] += a.bidder_payoff_sum[static_cast<size_t>(i)];
        rep.ties += a.ties;
    }
    rep.mean_revenue = revenue.mean;
    rep.revenue_half_width_95 = revenue.half_width();
    rep.mean_winner_payoff = winner_payoff.mean;
    rep.bidder_mean_payoff.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        rep.bidder_mean_payoff[static_cast<size_t>(i)] =
            payoff_sum[static_cast<size_t>(i)] / double(config.rounds);
    }
    if (config.deviation) {
        rep.deviation_gain = deviation_diff.mean;
        rep.deviation_gain_half_width_95 = deviation_diff.half_width();
    }

    if (want_trace) {
        std::ofstream out(config.trace_path);
        if (!out) throw io_error("cannot write trace: " + config.trace_path);
        out << "round,winner,price\n";
        for (const auto& a : agg) out << a.trace;
        if (!out) throw io_error("short write to trace: " + config.trace_path);
    }
    return rep;
}

McEstimate mc_focal_payoff(const Distribution& valuation, int n, const Strategy& opp,
                           const PaymentRule& payment, double v, double x, long long rounds,
                           unsigned long long seed, int shards, int threads) {
    if (n < 2) throw invalid_argument_error("mc_focal_payoff: need n >= 2");
    if (rounds < 1) throw invalid_argument_error("mc_focal_payoff: rounds must be positive");
    if (shards < 1) throw invalid_argument_error("mc_focal_payoff: shards must be positive");
    if (shards > rounds) shards = static_cast<int>(rounds);
    if (const auto* kp = std::get_if<KPrice>(&payment)) {
        if (kp->k < 1 || kp->k > n) {
            throw invalid_argument_error("mc_focal_payoff: need 1 <= k <= n");
        }
    } else {
        const auto& cv = std::get<CoefficientVector>(payment);
        cv.validate();
        if (cv.s() > n) throw invalid_argument_error("mc_focal_payoff: more weights than bids");
    }

    std::vector<Welford> parts(static_cast<size_t>(shards));
    parallel_shards(shards, threads, [&](int s) {
        long long mine = rounds / shards + (s < rounds % shards ? 1 : 0);
        auto rng = make_shard_rng(seed, s);
        Welford w;
        std::vector<double> all(static_cast<size_t>(n));
        for (long long r = 0; r < mine; ++r) {
            double top = -std::numeric_limits<double>::infinity();
            all[0] = x;
            for (int i = 1; i < n; ++i) {
                double b = opp(valuation.quantile(canonical(rng)));
                all[static_cast<size_t>(i)] = b;
                top = std::max(top, b);
            }
            double payoff = 0.0;
            if (x > top) {
                std::sort(all.begin(), all.end(), std::greater<>());
                double pay;
                if (const auto* kp = std::get_if<KPrice>(&payment)) {
                    pay = all[static_cast<size_t>(kp->k - 1)];
                } else {
                    pay = combination_payment(all, std::get<CoefficientVector>(payment));
                }
                payoff = v - pay;
            }
            w.add(payoff);
        }
        parts[static_cast<size_t>(s)] = w;
    });

    Welford total;
    for (const auto& w : parts) total.merge(w);
    return McEstimate{total.mean, total.half_width(), rounds, seed, shards};
}

nlohmann::json SimulationReport::to_json() const {
    nlohmann::json j{{"mean_revenue", mean_revenue},
                     {"revenue_half_width_95", revenue_half_width_95},
                     {"mean_winner_payoff", mean_winner_payoff},
                     {"bidder_mean_payoff", bidder_mean_payoff},
                     {"rounds", rounds},
                     {"seed", seed},
                     {"shards", shards},
                     {"ties", ties},
                     {"rng", rng}};
    j["deviation_gain"] = deviation_gain ? nlohmann::json(*deviation_gain) : nlohmann::json(nullptr);
    j["deviation_gain_half_width_95"] = deviation_gain_half_width_95
                                            ? nlohmann::json(*deviation_gain_half_width_95)
                                            : nlohmann::json(nullptr);
    return j;
}

} // namespace kprice
