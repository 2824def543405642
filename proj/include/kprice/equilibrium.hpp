#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kprice/coefficients.hpp"
#include "kprice/distribution.hpp"

namespace kprice {

// Winner pays the k-th highest bid, k >= 2. First-price payment only occurs
// inside combination rules.
struct KPrice {
    int k;
};

using PaymentRule = std::variant<KPrice, CoefficientVector>;

struct AuctionSpec {
    int n;
    PaymentRule payment;
    Distribution valuation;

    void validate() const;
    bool is_kprice() const { return std::holds_alternative<KPrice>(payment); }
    int k() const;
    const CoefficientVector& coefficients() const;

    // Report annotations, e.g. "n == k: payment is the lowest bid".
    std::vector<std::string> notes() const;
    nlohmann::json payment_json() const;
};

// A bidding strategy: valuation -> bid. Closed forms evaluate lazily and
// carry their distribution; tables interpolate linearly between knots and
// extend the edge segments outward.
class Strategy {
public:
    static Strategy truthful(std::optional<Distribution> valuation = {});
    static Strategy from_table(std::vector<double> values, std::vector<double> bids,
                               std::optional<Distribution> valuation = {});
    static Strategy load_csv(const std::string& path);

    double operator()(double value) const;

    // g on the quantile scale: the bid of the a-th valuation quantile.
    // Requires a carried distribution for table strategies loaded bare.
    double at_quantile(double a) const;

    const std::optional<Distribution>& valuation_dist() const;

    // (value, bid) rows for table strategies; empty for lazy closed forms.
    std::vector<std::pair<double, double>> knots() const;
    nlohmann::json descriptor() const;

    // Header "v,bid", shortest round-trip decimals. Closed forms sample
    // grid_points quantiles in [1e-4, 1-1e-4]; tables dump their knots.
    void save_csv(const std::string& path, int grid_points = 2049) const;

    struct Impl;
    explicit Strategy(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

private:
    std::shared_ptr<const Impl> impl_;
};

// Equilibrium bid of the a-th valuation quantile for a k-price auction:
//   g1(a) = sum_{j=0}^{k-2} C(k-2,j) [(n-k)!/(n-k+j)!] a^j q^(j)(a).
double equilibrium_bid_at_quantile(const Distribution& valuation, int n, int k, double a);

// General closed-form equilibrium for a k-price auction. Analytic families
// evaluate lazily; tabulated quantiles are sampled into a table inside the
// finite-difference margins.
Strategy solve_closed_form(const AuctionSpec& spec);

// Independent fast paths on the value scale, for cross-checking the general
// solver. Require k == 3 (resp. 4):
//   g(v) = v + F/((n-2)F'),
//   g(v) = v + 2F/((n-3)F') - F^2 F''/((n-2)(n-3)F'^3).
Strategy three_price_formula(const AuctionSpec& spec);
Strategy four_price_formula(const AuctionSpec& spec);

// Uniform valuations bid linearly: g(v) = (n-1)/(n-k+1) * v.
double uniform_slope(int n, int k);

// For F(x) = x^alpha the equilibrium is linear in v with slope
// Gamma(n-k+1) Gamma(n-1+1/alpha) / (Gamma(n-k+1+1/alpha) Gamma(n-1)).
double polynomial_slope_gamma(double alpha, int n, int k);

// Same slope for alpha = 1/m by a finite product of rationals:
// prod_{i=0}^{k-3} (n-2+m-i)/(n-2-i).
double polynomial_slope_product(int m, int n, int k);

struct MonotonicityReport {
    bool increasing = false;
    int grid_size = 0;
    double min_increment = 0.0;
    std::optional<double> first_violation_a;
    std::vector<std::string> notes;
    nlohmann::json to_json() const;
};

// Samples the strategy on a quantile grid in [1e-4, 1-1e-4] and checks for
// strict increase; adjacent ties count as violations. The closed form is an
// equilibrium exactly when this passes.
MonotonicityReport check_existence(const Strategy& strategy, int grid_size = 2049);

} // namespace kprice
