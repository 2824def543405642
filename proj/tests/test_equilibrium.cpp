#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "kprice/equilibrium.hpp"

using namespace kprice;

namespace {

std::vector<double> interior_grid(int points) {
    std::vector<double> out(points);
    for (int i = 0; i < points; ++i) out[i] = 0.01 + 0.98 * i / double(points - 1);
    return out;
}

} // namespace

TEST_CASE("uniform slope") {
    CHECK(uniform_slope(2, 2) == 1.0);
    CHECK(uniform_slope(5, 2) == 1.0);
    CHECK(uniform_slope(5, 3) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(uniform_slope(5, 5) == 4.0);
    CHECK(uniform_slope(8, 4) == doctest::Approx(1.4).epsilon(1e-15));
    CHECK_THROWS_AS(uniform_slope(5, 1), invalid_argument_error);
    CHECK_THROWS_AS(uniform_slope(5, 6), invalid_argument_error);
}

TEST_CASE("uniform equilibrium is linear with the predicted slope") {
    for (int n = 2; n <= 8; ++n) {
        for (int k = 2; k <= n; ++k) {
            AuctionSpec spec{n, KPrice{k}, Distribution::uniform01()};
            auto g = solve_closed_form(spec);
            double slope = uniform_slope(n, k);
            for (double a : interior_grid(11)) {
                CHECK(std::fabs(g.at_quantile(a) - slope * a) <= 1e-12);
            }
        }
    }
}

TEST_CASE("second price is truthful for any distribution") {
    for (const auto& d : {Distribution::uniform01(), Distribution::polynomial(2.0),
                          Distribution::exponential(1.0)}) {
        AuctionSpec spec{4, KPrice{2}, d};
        auto g = solve_closed_form(spec);
        for (double a : {0.1, 0.5, 0.9}) CHECK(g.at_quantile(a) == d.quantile(a));
    }
}

TEST_CASE("three price fast path matches the general form") {
    AuctionSpec spec{6, KPrice{3}, Distribution::polynomial(2.0)};
    auto general = solve_closed_form(spec);
    auto fast = three_price_formula(spec);
    double slope = polynomial_slope_gamma(2.0, 6, 3);
    CHECK(slope == doctest::Approx(1.125).epsilon(1e-12));
    for (double a : interior_grid(101)) {
        double want = general.at_quantile(a);
        CHECK(std::fabs(fast.at_quantile(a) - want) <= 1e-9 * std::max(1.0, std::fabs(want)));
        CHECK(std::fabs(want - slope * spec.valuation.quantile(a)) <= 1e-12);
    }
    CHECK_THROWS_AS(three_price_formula(AuctionSpec{6, KPrice{4}, Distribution::uniform01()}),
                    invalid_argument_error);
}

TEST_CASE("four price fast path matches the general form") {
    AuctionSpec spec{6, KPrice{4}, Distribution::exponential(1.0)};
    auto general = solve_closed_form(spec);
    auto fast = four_price_formula(spec);
    for (double a : interior_grid(101)) {
        double want = general.at_quantile(a);
        CHECK(std::fabs(fast.at_quantile(a) - want) <= 1e-9 * std::max(1.0, std::fabs(want)));
    }
    CHECK_THROWS_AS(four_price_formula(AuctionSpec{6, KPrice{3}, Distribution::uniform01()}),
                    invalid_argument_error);
}

TEST_CASE("polynomial slope: product and gamma forms agree") {
    CHECK(polynomial_slope_gamma(2.0, 5, 5) == doctest::Approx(2.1875).epsilon(1e-12));
    CHECK(polynomial_slope_gamma(0.5, 5, 5) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(polynomial_slope_product(2, 5, 5) == doctest::Approx(10.0).epsilon(1e-15));
    for (int m = 1; m <= 3; ++m) {
        for (int n = 2; n <= 8; ++n) {
            for (int k = 2; k <= n; ++k) {
                double prod = polynomial_slope_product(m, n, k);
                double gam = polynomial_slope_gamma(1.0 / m, n, k);
                CHECK(std::fabs(prod - gam) <= 1e-12 * prod);
            }
        }
    }
    for (int n = 2; n <= 8; ++n) {
        for (int k = 2; k <= n; ++k) {
            CHECK(polynomial_slope_product(1, n, k) ==
                  doctest::Approx(uniform_slope(n, k)).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(polynomial_slope_product(0, 5, 3), invalid_argument_error);
    CHECK_THROWS_AS(polynomial_slope_gamma(-1.0, 5, 3), invalid_argument_error);
}

TEST_CASE("linear poly equilibrium for non-integer exponent") {
    AuctionSpec spec{5, KPrice{4}, Distribution::polynomial(0.5)};
    auto g = solve_closed_form(spec);
    double slope = polynomial_slope_product(2, 5, 4);
    CHECK(slope == doctest::Approx(10.0 / 3.0).epsilon(1e-14));
    for (double a : {0.2, 0.49, 0.8}) {
        double v = spec.valuation.quantile(a);
        CHECK(std::fabs(g.at_quantile(a) - slope * v) <= 1e-12 * std::max(1.0, slope * v));
    }
}

TEST_CASE("bid at quantile zero is the support floor") {
    CHECK(equilibrium_bid_at_quantile(Distribution::uniform01(), 5, 3, 0.0) == 0.0);
    CHECK(equilibrium_bid_at_quantile(Distribution::exponential(1.0), 5, 5, 0.0) == 0.0);
}

TEST_CASE("strategy tables interpolate and extrapolate linearly") {
    auto s = Strategy::from_table({0.0, 1.0}, {0.0, 2.0});
    CHECK(s(0.5) == 1.0);
    CHECK(s(1.5) == 3.0);
    CHECK(s(-0.5) == -1.0);
    CHECK(s.knots().size() == 2);
    CHECK_THROWS_AS(s.at_quantile(0.5), invalid_argument_error);
    CHECK_THROWS_AS(Strategy::from_table({0.0, 0.0}, {0.0, 1.0}), invalid_argument_error);
    CHECK_THROWS_AS(Strategy::from_table({0.0}, {0.0}), invalid_argument_error);
    CHECK_THROWS_AS(Strategy::truthful().at_quantile(0.5), invalid_argument_error);
    CHECK(Strategy::truthful()(0.7) == 0.7);
}

TEST_CASE("monotonicity check flags a dip") {
    auto bad = Strategy::from_table({0.0, 0.5, 0.75, 1.0}, {0.0, 0.5, 0.4, 1.0});
    auto rep = check_existence(bad);
    CHECK(!rep.increasing);
    CHECK(rep.min_increment == doctest::Approx(-0.1).epsilon(1e-12));
    REQUIRE(rep.first_violation_a.has_value());
    CHECK(*rep.first_violation_a == 0.5);
    CHECK(rep.notes.size() == 1);
    CHECK(rep.to_json()["increasing"] == false);

    auto good = solve_closed_form(AuctionSpec{5, KPrice{3}, Distribution::uniform01()});
    auto ok = check_existence(good, 257);
    CHECK(ok.increasing);
    CHECK(ok.grid_size == 257);
    CHECK(ok.min_increment > 0.0);
    CHECK(ok.to_json()["first_violation_a"].is_null());
}

TEST_CASE("strategy CSV round trip") {
    AuctionSpec spec{5, KPrice{3}, Distribution::exponential(1.0)};
    auto g = solve_closed_form(spec);
    const char* path = "strategy_roundtrip_test.csv";
    g.save_csv(path);
    auto loaded = Strategy::load_csv(path);
    CHECK(loaded.knots().size() == 2049);
    for (double a : {0.2, 0.35, 0.5, 0.65, 0.8}) {
        double v = spec.valuation.quantile(a);
        CHECK(std::fabs(loaded(v) - g(v)) <= 1e-5);
    }
    std::remove(path);
    CHECK_THROWS_AS(Strategy::load_csv("no_such_strategy.csv"), io_error);
}

TEST_CASE("tabulated valuations reproduce the closed form") {
    auto src = Distribution::polynomial(2.0);
    const int rows = 20001;
    std::vector<double> a(rows), q(rows);
    for (int i = 0; i < rows; ++i) {
        a[i] = double(i) / double(rows - 1);
        q[i] = src.quantile(a[i]);
    }
    auto table = Distribution::tabulated_quantile(std::move(a), std::move(q));
    for (int k : {3, 4}) {
        auto from_table = solve_closed_form(AuctionSpec{5, KPrice{k}, table});
        auto closed = solve_closed_form(AuctionSpec{5, KPrice{k}, src});
        for (double t : {0.3, 0.5, 0.7}) {
            CHECK(std::fabs(from_table.at_quantile(t) - closed.at_quantile(t)) <= 1e-4);
        }
    }
}

TEST_CASE("tabulated uniform on a scaled support keeps the uniform slope") {
    const int rows = 2001;
    const double scale = 2.5;
    std::vector<double> a(rows), q(rows);
    for (int i = 0; i < rows; ++i) {
        a[i] = double(i) / double(rows - 1);
        q[i] = scale * a[i];
    }
    auto table = Distribution::tabulated_quantile(std::move(a), std::move(q));
    for (int k : {2, 3, 4}) {
        auto g = solve_closed_form(AuctionSpec{5, KPrice{k}, table});
        double slope = uniform_slope(5, k);
        for (double v : {0.5, 1.25, 1.875}) {
            CHECK(std::fabs(g(v) - slope * v) <= 1e-5);
        }
    }
    auto g3 = solve_closed_form(AuctionSpec{5, KPrice{3}, table});
    auto kn = g3.knots();
    REQUIRE(!kn.empty());
    CHECK(kn.front().first == 0.0);
    CHECK(kn.front().second == 0.0);
}

TEST_CASE("auction spec validation") {
    CHECK_THROWS_AS(AuctionSpec({1, KPrice{2}, Distribution::uniform01()}).validate(),
                    invalid_argument_error);
    CHECK_THROWS_AS(AuctionSpec({5, KPrice{1}, Distribution::uniform01()}).validate(),
                    invalid_argument_error);
    CHECK_THROWS_AS(AuctionSpec({5, KPrice{6}, Distribution::uniform01()}).validate(),
                    invalid_argument_error);
    CHECK_THROWS_AS(
        AuctionSpec({3, CoefficientVector{{0.5, 0.0, 0.0, 0.5}}, Distribution::uniform01()})
            .validate(),
        invalid_argument_error);
    AuctionSpec lowest{5, KPrice{5}, Distribution::uniform01()};
    lowest.validate();
    REQUIRE(lowest.notes().size() == 1);
    CHECK(lowest.notes()[0].find("lowest bid") != std::string::npos);
    CHECK(lowest.payment_json()["rule"] == "kprice");
    AuctionSpec combo{5, CoefficientVector{{0.5, 0.5}}, Distribution::uniform01()};
    combo.validate();
    CHECK(combo.payment_json()["rule"] == "combination");
    CHECK_THROWS_AS(combo.k(), invalid_argument_error);
    CHECK_THROWS_AS(lowest.coefficients(), invalid_argument_error);
}
