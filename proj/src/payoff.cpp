#include "kprice/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "kprice/numerics.hpp"
#include "kprice/rational.hpp"

namespace kprice {

namespace {

double quantile_domain_lo(const Distribution& d) { return d.cdf(d.support_lo()); }

double quantile_domain_cap(const Distribution& d) {
    return d.bounded_support() ? d.cdf(d.support_hi()) : 1.0 - 1e-9;
}

// Payoff with the winning quantile already known (exact when x was produced
// as opp(q(a_x))).
double payoff_at(const Distribution& vals, int n, const PaymentRule& payment, const Strategy& opp,
                 double v, double x, double a_x, const QuadOptions& opts) {
    double a_lo = quantile_domain_lo(vals);
    if (const auto* kp = std::get_if<KPrice>(&payment)) {
        int k = kp->k;
        if (k == 1) return (v - x) * std::pow(a_x, n - 1);
        if (a_x <= a_lo) return 0.0;
        double c = kprice_density_constant(n, k);
        auto integrand = [&](double u) {
            return (v - opp(vals.quantile(u))) * std::pow(u, n - k) * std::pow(a_x - u, k - 2);
        };
        return c * integrate(integrand, a_lo, a_x, opts).value;
    }
    const auto& cv = std::get<CoefficientVector>(payment);
    double total = cv.alpha(1) * (v - x) * std::pow(a_x, n - 1);
    if (a_x <= a_lo) return total;
    std::vector<std::pair<int, double>> terms;
    for (int k = 2; k <= cv.s(); ++k) {
        if (cv.alpha(k) != 0.0) terms.emplace_back(k, cv.alpha(k) * kprice_density_constant(n, k));
    }
    if (terms.empty()) return total;
    auto integrand = [&](double u) {
        double kernel = 0.0;
        for (const auto& [k, w] : terms) {
            kernel += w * std::pow(u, n - k) * std::pow(a_x - u, k - 2);
        }
        return (v - opp(vals.quantile(u))) * kernel;
    };
    return total + integrate(integrand, a_lo, a_x, opts).value;
}

} // namespace

double winning_quantile(const Distribution& valuation, const Strategy& opp, double x) {
    double lo = quantile_domain_lo(valuation);
    double hi = quantile_domain_cap(valuation);
    return bisect_increasing([&](double a) { return opp(valuation.quantile(a)) - x; }, lo, hi,
                             1e-15);
}

double expected_payoff_kprice(const Distribution& valuation, int n, const Strategy& opp, double v,
                              double x, int k, const QuadOptions& opts) {
    if (n < 2) throw invalid_argument_error("expected_payoff: need n >= 2");
    if (k < 1 || k > n) {
        throw invalid_argument_error("expected_payoff: need 1 <= k <= n, got k=" +
                                     std::to_string(k));
    }
    double a_x = winning_quantile(valuation, opp, x);
    return payoff_at(valuation, n, KPrice{k}, opp, v, x, a_x, opts);
}

double expected_payoff(const AuctionSpec& spec, const Strategy& opp, double v, double x,
                       const QuadOptions& opts) {
    spec.validate();
    double a_x = winning_quantile(spec.valuation, opp, x);
    return payoff_at(spec.valuation, spec.n, spec.payment, opp, v, x, a_x, opts);
}

BestResponse best_response(const AuctionSpec& spec, const Strategy& opp, double v,
                           std::optional<GridSpec> grid, const QuadOptions& opts) {
    spec.validate();
    const Distribution& vals = spec.valuation;

    std::vector<double> xs;
    std::vector<double> quantiles;
    if (grid) {
        if (grid->points < 3 || !(grid->hi > grid->lo)) {
            throw invalid_argument_error("best_response: grid needs hi > lo and >= 3 points");
        }
        xs.reserve(grid->points);
        for (int i = 0; i < grid->points; ++i) {
            xs.push_back(grid->lo + (grid->hi - grid->lo) * i / double(grid->points - 1));
        }
    } else {
        // Sample candidate bids at the opponents' own bid quantiles: dense
        // exactly where the field bids, which keeps unbounded supports
        // tractable.
        int points = 4097;
        double a_lo = quantile_domain_lo(vals);
        double a_hi = vals.bounded_support() ? quantile_domain_cap(vals) : 1.0 - 1e-4;
        xs.reserve(points);
        quantiles.reserve(points);
        for (int i = 0; i < points; ++i) {
            double a = a_lo + (a_hi - a_lo) * i / double(points - 1);
            quantiles.push_back(a);
            xs.push_back(opp(vals.quantile(a)));
        }
    }

    double best_val = -std::numeric_limits<double>::infinity();
    size_t best_i = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double u = quantiles.empty()
                       ? expected_payoff(spec, opp, v, xs[i], opts)
                       : payoff_at(vals, spec.n, spec.payment, opp, v, xs[i], quantiles[i], opts);
        if (u > best_val) {
            best_val = u;
            best_i = i;
        }
    }

    BestResponse out;
    out.grid_points = static_cast<int>(xs.size());
    if (best_val <= 1e-14) {
        out.bid = v;
        out.grid_bid = v;
        out.payoff = expected_payoff(spec, opp, v, v, opts);
        return out;
    }
    out.grid_bid = xs[best_i];
    double lo = xs[best_i == 0 ? 0 : best_i - 1];
    double hi = xs[std::min(best_i + 1, xs.size() - 1)];
    double refined = lo < hi ? golden_section_max(
                                   [&](double x) { return expected_payoff(spec, opp, v, x, opts); },
                                   lo, hi, 1e-8)
                             : out.grid_bid;
    double refined_val = expected_payoff(spec, opp, v, refined, opts);
    if (refined_val >= best_val) {
        out.bid = refined;
        out.payoff = refined_val;
    } else {
        out.bid = out.grid_bid;
        out.payoff = best_val;
    }
    return out;
}

std::vector<double> default_value_grid(const Distribution& valuation, int points) {
    if (points < 1) throw invalid_argument_error("default_value_grid: need at least 1 point");
    std::vector<double> out;
    out.reserve(points);
    for (int i = 1; i <= points; ++i) {
        out.push_back(valuation.quantile(double(i) / double(points + 1)));
    }
    return out;
}

EquilibriumReport verify_equilibrium(const AuctionSpec& spec, const Strategy& candidate,
                                     std::vector<double> value_grid, double gain_tol,
                                     const QuadOptions& opts) {
    spec.validate();
    if (value_grid.empty()) value_grid = default_value_grid(spec.valuation);

    EquilibriumReport rep;
    rep.gain_tolerance = gain_tol;
    rep.notes = spec.notes();
    for (double v : value_grid) {
        EquilibriumRow row;
        row.v = v;
        row.candidate_bid = candidate(v);
        row.candidate_payoff = expected_payoff(spec, candidate, v, row.candidate_bid, opts);
        BestResponse br = best_response(spec, candidate, v, {}, opts);
        row.best_bid = br.bid;
        row.best_payoff = br.payoff;
        row.gain = std::max(0.0, br.payoff - row.candidate_payoff);
        row.bid_gap = std::fabs(br.bid - row.candidate_bid);
        rep.max_gain = std::max(rep.max_gain, row.gain);
        rep.max_bid_gap = std::max(rep.max_bid_gap, row.bid_gap);
        rep.rows.push_back(row);
    }
    rep.passed = rep.max_gain <= gain_tol;
    return rep;
}

nlohmann::json EquilibriumReport::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows) {
        rows_json.push_back({{"v", r.v},
                             {"candidate_bid", r.candidate_bid},
                             {"candidate_payoff", r.candidate_payoff},
                             {"best_bid", r.best_bid},
                             {"best_payoff", r.best_payoff},
                             {"gain", r.gain},
                             {"bid_gap", r.bid_gap}});
    }
    return {{"max_gain", max_gain},       {"max_bid_gap", max_bid_gap},
            {"gain_tolerance", gain_tolerance}, {"passed", passed},
            {"notes", notes},             {"rows", rows_json}};
}

double ret_integral_residual(const Distribution& valuation, int n, int k, const Strategy& g,
                             double x, const QuadOptions& opts) {
    if (k < 3 || k > n) {
        throw invalid_argument_error("ret_integral_residual: need 3 <= k <= n, got k=" +
                                     std::to_string(k));
    }
    double a_x = valuation.cdf(x);
    double a_lo = quantile_domain_lo(valuation);
    if (a_x <= a_lo) return 0.0;
    auto integrand = [&](double u) {
        return (x - g(valuation.quantile(u))) * std::pow(u, n - k) * std::pow(a_x - u, k - 3);
    };
    return integrate(integrand, a_lo, a_x, opts).value;
}

void write_payoff_curve_csv(const std::string& path, const AuctionSpec& spec, const Strategy& opp,
                            double v, const GridSpec& grid, const QuadOptions& opts) {
    if (grid.points < 2 || !(grid.hi > grid.lo)) {
        throw invalid_argument_error("payoff curve: grid needs hi > lo and >= 2 points");
    }
    std::ofstream out(path);
    if (!out) throw io_error("cannot write payoff curve: " + path);
    out << "x,U\n";
    for (int i = 0; i < grid.points; ++i) {
        double x = grid.lo + (grid.hi - grid.lo) * i / double(grid.points - 1);
        out << format_double(x) << ',' << format_double(expected_payoff(spec, opp, v, x, opts))
            << '\n';
    }
    if (!out) throw io_error("short write to payoff curve: " + path);
}

} // namespace kprice
