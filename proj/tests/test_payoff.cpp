#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "kprice/payoff.hpp"
#include "kprice/simulate.hpp"

using namespace kprice;

namespace {

const QuadOptions kTight{1e-13, 1e-12, 16384};

// Against truthful opponents with uniform values the payoff of bidding x at
// valuation v has an elementary closed form, independent of this library's
// integration route:
//   U_k(v, x) = v x^(n-1) - ((n-k+1)/n) x^n.
double uniform_truthful_payoff(int n, int k, double v, double x) {
    return v * std::pow(x, n - 1) - (double(n - k + 1) / n) * std::pow(x, n);
}

} // namespace

TEST_CASE("quadrature payoff matches the uniform truthful oracle") {
    auto uniform = Distribution::uniform01();
    auto opp = Strategy::truthful();
    for (int n : {3, 5, 7}) {
        for (int k = 1; k <= n; ++k) {
            for (double v : {0.3, 0.55, 0.8}) {
                for (double x : {0.25, 0.5, 0.75, 0.9}) {
                    double got = expected_payoff_kprice(uniform, n, opp, v, x, k, kTight);
                    double want = uniform_truthful_payoff(n, k, v, x);
                    CHECK(std::fabs(got - want) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("equilibrium payoff traces the envelope integral") {
    auto uniform = Distribution::uniform01();
    for (int k = 2; k <= 5; ++k) {
        AuctionSpec spec{5, KPrice{k}, uniform};
        auto g = solve_closed_form(spec);
        for (double v : {0.3, 0.6, 0.9}) {
            double u = expected_payoff_kprice(uniform, 5, g, v, g(v), k, kTight);
            CHECK(std::fabs(u - std::pow(v, 5) / 5.0) <= 1e-8);
        }
    }
}

TEST_CASE("winning quantile") {
    auto uniform = Distribution::uniform01();
    auto opp = Strategy::truthful();
    CHECK(winning_quantile(uniform, opp, 0.37) == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(winning_quantile(uniform, opp, 2.0) == 1.0);
    CHECK(winning_quantile(uniform, opp, -0.1) == 0.0);
    auto exp1 = Distribution::exponential(1.0);
    CHECK(winning_quantile(exp1, Strategy::truthful(), 1e9) == 1.0 - 1e-9);
}

TEST_CASE("combination payoff is the weighted k-price sum") {
    auto uniform = Distribution::uniform01();
    auto opp = Strategy::truthful();
    const int n = 4;
    const double v = 0.7, x = 0.55;

    AuctionSpec mix{n, CoefficientVector{{0.3, 0.2, 0.5}}, uniform};
    double combo = expected_payoff(mix, opp, v, x, kTight);
    double parts = 0.3 * expected_payoff_kprice(uniform, n, opp, v, x, 1, kTight) +
                   0.2 * expected_payoff_kprice(uniform, n, opp, v, x, 2, kTight) +
                   0.5 * expected_payoff_kprice(uniform, n, opp, v, x, 3, kTight);
    CHECK(std::fabs(combo - parts) <= 1e-10);

    AuctionSpec gappy{n, CoefficientVector{{0.5, 0.0, 0.5}}, uniform};
    double gapped = expected_payoff(gappy, opp, v, x, kTight);
    double gapped_parts = 0.5 * expected_payoff_kprice(uniform, n, opp, v, x, 1, kTight) +
                          0.5 * expected_payoff_kprice(uniform, n, opp, v, x, 3, kTight);
    CHECK(std::fabs(gapped - gapped_parts) <= 1e-10);

    double first = expected_payoff_kprice(uniform, n, opp, v, x, 1, kTight);
    CHECK(first == doctest::Approx((v - x) * std::pow(x, 3)).epsilon(1e-12));
}

TEST_CASE("best response finds the equilibrium bid") {
    auto uniform = Distribution::uniform01();
    AuctionSpec spec{5, KPrice{3}, uniform};
    auto g = solve_closed_form(spec);
    auto br = best_response(spec, g, 0.5);
    CHECK(br.grid_points == 4097);
    CHECK(std::fabs(br.bid - 2.0 / 3.0) <= 1e-5);
    CHECK(br.payoff >= expected_payoff(spec, g, 0.5, g(0.5)) - 1e-12);

    auto gridded = best_response(spec, g, 0.5, GridSpec{0.0, 1.0, 201});
    CHECK(gridded.grid_points == 201);
    CHECK(std::fabs(gridded.bid - 2.0 / 3.0) <= 1e-5);

    CHECK_THROWS_AS(best_response(spec, g, 0.5, GridSpec{0.5, 0.5, 10}), invalid_argument_error);
    CHECK_THROWS_AS(best_response(spec, g, 0.5, GridSpec{0.0, 1.0, 2}), invalid_argument_error);
}

TEST_CASE("best response falls back to truthful when nothing is winnable") {
    AuctionSpec spec{3, KPrice{2}, Distribution::uniform01()};
    auto br = best_response(spec, Strategy::truthful(), 0.0);
    CHECK(br.bid == 0.0);
    CHECK(br.payoff == 0.0);
}

TEST_CASE("verify_equilibrium accepts the closed form") {
    AuctionSpec spec{5, KPrice{3}, Distribution::uniform01()};
    auto g = solve_closed_form(spec);
    auto rep = verify_equilibrium(spec, g);
    CHECK(rep.passed);
    CHECK(rep.max_gain <= 1e-5);
    CHECK(rep.rows.size() == 19);
    CHECK(rep.notes.empty());
    CHECK(rep.to_json()["passed"] == true);
    bool found_half = false;
    for (const auto& row : rep.rows) {
        if (row.v == 0.5) {
            found_half = true;
            CHECK(std::fabs(row.candidate_payoff - 0.00625) <= 1e-9);
        }
    }
    CHECK(found_half);
}

TEST_CASE("verify_equilibrium rejects truthful bidding in a third-price auction") {
    AuctionSpec spec{5, KPrice{3}, Distribution::uniform01()};
    auto rep = verify_equilibrium(spec, Strategy::truthful(), {0.5, 0.8, 0.95});
    CHECK(!rep.passed);
    CHECK(rep.max_gain > 1e-3);
}

TEST_CASE("revenue equivalence integral vanishes on the equilibrium path") {
    auto dists = {Distribution::uniform01(), Distribution::polynomial(2.0),
                  Distribution::exponential(1.0)};
    for (const auto& d : dists) {
        for (int n : {4, 6}) {
            for (int k : {3, 4}) {
                auto g = solve_closed_form(AuctionSpec{n, KPrice{k}, d});
                for (double a : {0.25, 0.5, 0.75}) {
                    double x = d.quantile(a);
                    CHECK(std::fabs(ret_integral_residual(d, n, k, g, x, kTight)) <= 1e-7);
                }
            }
        }
    }
    // Truthful bidding is not the third-price equilibrium; the residual says so.
    double off = ret_integral_residual(Distribution::uniform01(), 4, 3, Strategy::truthful(), 0.8,
                                       kTight);
    CHECK(off == doctest::Approx(std::pow(0.8, 3) / 6.0).epsilon(1e-9));
    CHECK_THROWS_AS(
        ret_integral_residual(Distribution::uniform01(), 4, 2, Strategy::truthful(), 0.8),
        invalid_argument_error);
}

TEST_CASE("monte carlo payoff agrees with quadrature") {
    auto uniform = Distribution::uniform01();
    AuctionSpec spec{5, KPrice{3}, uniform};
    auto g = solve_closed_form(spec);
    double quad = expected_payoff_kprice(uniform, 5, g, 0.6, 0.7, 3, kTight);
    auto mc = mc_focal_payoff(uniform, 5, g, KPrice{3}, 0.6, 0.7, 200000, 99);
    CHECK(mc.half_width_95 > 0.0);
    CHECK(std::fabs(mc.estimate - quad) <= 4.0 * mc.half_width_95);
}

TEST_CASE("default value grid") {
    auto grid = default_value_grid(Distribution::uniform01());
    REQUIRE(grid.size() == 19);
    CHECK(grid.front() == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(grid.back() == doctest::Approx(0.95).epsilon(1e-12));
    CHECK_THROWS_AS(default_value_grid(Distribution::uniform01(), 0), invalid_argument_error);
}

TEST_CASE("payoff curve CSV") {
    const char* path = "payoff_curve_test.csv";
    AuctionSpec spec{4, KPrice{2}, Distribution::uniform01()};
    write_payoff_curve_csv(path, spec, Strategy::truthful(), 0.6, GridSpec{0.1, 0.9, 17});
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "x,U");
    int rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 17);
    in.close();
    std::remove(path);
    CHECK_THROWS_AS(write_payoff_curve_csv(path, spec, Strategy::truthful(), 0.6,
                                           GridSpec{0.9, 0.1, 17}),
                    invalid_argument_error);
}
