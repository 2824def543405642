#pragma once

#include <optional>
#include <vector>

#include "kprice/equilibrium.hpp"
#include "kprice/quadrature.hpp"

namespace kprice {

// Smallest valuation quantile a with opp(q(a)) >= x: the fraction of the
// field a bid of x beats. Clamped to [a_lo, a_cap]; unbounded supports cap
// at 1 - 1e-9.
double winning_quantile(const Distribution& valuation, const Strategy& opp, double x);

// Expected payoff of bidding x at valuation v when the n-1 opponents all
// play opp over the same valuation distribution. The winner pays the k-th
// highest of all n bids; k = 1 means paying one's own bid. Computed on the
// quantile scale:
//   U_k = c_k integral_0^{a_x} (v - opp(q(u))) u^{n-k} (a_x - u)^{k-2} du,
//   c_k = (n-1)!/((n-k)!(k-2)!),  U_1 = (v - x) a_x^{n-1}.
double expected_payoff_kprice(const Distribution& valuation, int n, const Strategy& opp, double v,
                              double x, int k, const QuadOptions& opts = {});

// Payoff under spec.payment (k-price or combination of order statistics).
double expected_payoff(const AuctionSpec& spec, const Strategy& opp, double v, double x,
                       const QuadOptions& opts = {});

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int points = 4097;
};

struct BestResponse {
    double bid = 0.0;
    double payoff = 0.0;
    double grid_bid = 0.0;
    int grid_points = 0;
};

// Maximizes x -> expected_payoff over candidate bids: a scan over the
// opponents' bid range (sampled at valuation quantiles by default, or over
// an explicit uniform grid), then golden-section refinement to a 1e-8
// bracket. A payoff that never rises above zero falls back to bidding v.
BestResponse best_response(const AuctionSpec& spec, const Strategy& opp, double v,
                           std::optional<GridSpec> grid = {}, const QuadOptions& opts = {});

struct EquilibriumRow {
    double v = 0.0;
    double candidate_bid = 0.0;
    double candidate_payoff = 0.0;
    double best_bid = 0.0;
    double best_payoff = 0.0;
    double gain = 0.0;
    double bid_gap = 0.0;
};

struct EquilibriumReport {
    std::vector<EquilibriumRow> rows;
    double max_gain = 0.0;
    double max_bid_gap = 0.0;
    double gain_tolerance = 0.0;
    bool passed = false;
    std::vector<std::string> notes;
    nlohmann::json to_json() const;
};

// Valuations at quantiles 1/(points+1) .. points/(points+1).
std::vector<double> default_value_grid(const Distribution& valuation, int points = 19);

// Checks that unilateral deviation from `candidate` gains at most gain_tol
// at every grid valuation, with everyone else playing `candidate`.
EquilibriumReport verify_equilibrium(const AuctionSpec& spec, const Strategy& candidate,
                                     std::vector<double> value_grid = {}, double gain_tol = 1e-5,
                                     const QuadOptions& opts = {});

// integral_0^{F(x)} (x - g(q(u))) u^{n-k} (F(x) - u)^{k-3} du for k >= 3.
// Vanishes identically when g is the k-price equilibrium; the revenue
// equivalence argument runs through exactly this quantity.
double ret_integral_residual(const Distribution& valuation, int n, int k, const Strategy& g,
                             double x, const QuadOptions& opts = {});

// Header "x,U": expected payoff against opp at valuation v over a bid grid.
void write_payoff_curve_csv(const std::string& path, const AuctionSpec& spec, const Strategy& opp,
                            double v, const GridSpec& grid, const QuadOptions& opts = {});

} // namespace kprice
