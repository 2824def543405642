#include "kprice/combination.hpp"

#include <cmath>

#include "kprice/numerics.hpp"
#include "kprice/rational.hpp"

namespace kprice {

namespace {

void check_ns(int n, int s) {
    if (n < 2) throw invalid_argument_error("combination: need n >= 2, got " + std::to_string(n));
    if (s < 2 || s > n) {
        throw invalid_argument_error("combination: need 2 <= s <= n, got s=" + std::to_string(s) +
                                     ", n=" + std::to_string(n));
    }
}

double overbid_gamma(int n, int k) {
    Rational g(factorial(n - 1), factorial(n - k) * factorial(k - 3));
    return static_cast<double>(g);
}

} // namespace

double truthful_condition_residual(const CoefficientVector& cv, int n) {
    cv.validate();
    check_ns(n, cv.s());
    double pull = 0.0;
    for (int k = 3; k <= cv.s(); ++k) pull += double(k - 2) * cv.alpha(k);
    return cv.alpha(1) - pull;
}

std::vector<CoefficientVector> enumerate_truthful_vertices(int n, int s) {
    check_ns(n, s);
    std::vector<CoefficientVector> out;
    CoefficientVector second_price{std::vector<double>(s, 0.0)};
    second_price.alphas[1] = 1.0;
    out.push_back(second_price);
    for (int k = 3; k <= s; ++k) {
        CoefficientVector v{std::vector<double>(s, 0.0)};
        double weight = 1.0 / double(k - 1);
        // alpha_1 is built by the same product the residual subtracts, so the
        // residual of every vertex is exactly 0.0 in doubles.
        v.alphas[0] = double(k - 2) * weight;
        v.alphas[static_cast<size_t>(k - 1)] = weight;
        out.push_back(v);
    }
    return out;
}

CoefficientVector minimize_alpha2(int n, int s) {
    auto vertices = enumerate_truthful_vertices(n, s);
    CoefficientVector best = vertices.front();
    for (const auto& v : vertices) {
        if (v.alpha(2) < best.alpha(2)) best = v;
    }
    return best;
}

double truthful_integral_residual(const CoefficientVector& cv, int n,
                                  const Distribution& valuation, double a,
                                  const QuadOptions& opts) {
    cv.validate();
    check_ns(n, cv.s());
    if (!(a > 0.0 && a <= 1.0)) {
        throw domain_error("truthful_integral_residual: a=" + format_double(a) +
                           " outside (0,1]");
    }
    double tail_weight = 0.0;
    std::vector<std::pair<int, double>> terms;
    for (int k = 3; k <= cv.s(); ++k) {
        if (cv.alpha(k) != 0.0) {
            tail_weight += cv.alpha(k);
            terms.emplace_back(k, cv.alpha(k) * overbid_gamma(n, k));
        }
    }
    double qa = valuation.quantile(a);
    double r = tail_weight * double(n - 1) * qa * std::pow(a, n - 2);
    if (!terms.empty()) {
        double a_lo = valuation.cdf(valuation.support_lo());
        auto integrand = [&](double u) {
            double kernel = 0.0;
            for (const auto& [k, w] : terms) {
                kernel += w * std::pow(u, n - k) * std::pow(a - u, k - 3);
            }
            return valuation.quantile(u) * kernel;
        };
        r -= integrate(integrand, a_lo, a, opts).value;
    }
    r -= cv.alpha(1) * std::pow(a, n - 1) * valuation.quantile_derivative(a, 1);
    return r;
}

TruthfulnessReport verify_truthfulness(int n, const CoefficientVector& cv,
                                       const Distribution& valuation,
                                       const TruthfulnessOptions& opts) {
    cv.validate();
    check_ns(n, cv.s());

    TruthfulnessReport rep;
    rep.n = n;
    rep.alphas = cv;
    rep.uniform_condition_residual = truthful_condition_residual(cv, n);

    bool unbounded = !valuation.bounded_support();
    double margin = valuation.quantile_derivative_margin(1);
    for (double a : {0.25, 0.5, 0.75, 1.0}) {
        double a_used = a;
        if (unbounded && a_used > 1.0 - 1e-3) a_used = 1.0 - 1e-3;
        if (margin > 0.0 && a_used > 1.0 - margin) a_used = 1.0 - margin;
        TruthfulnessRow row;
        row.a = a_used;
        row.residual = truthful_integral_residual(cv, n, valuation, a_used, opts.quad);
        double qa = valuation.quantile(a_used);
        double q1 = valuation.quantile_derivative(a_used, 1);
        double tail_weight = 0.0;
        for (int k = 3; k <= cv.s(); ++k) tail_weight += cv.alpha(k);
        row.scale = tail_weight * double(n - 1) * qa * std::pow(a_used, n - 2) +
                    cv.alpha(1) * std::pow(a_used, n - 1) * q1;
        if (row.scale < 1e-300) row.scale = 1.0;
        row.relative = std::fabs(row.residual) / row.scale;
        rep.max_relative_integral_residual =
            std::max(rep.max_relative_integral_residual, row.relative);
        rep.integral_rows.push_back(row);
        if (a_used != a) {
            rep.notes.push_back("residual grid point a=" + format_double(a) + " evaluated at a=" +
                                format_double(a_used));
        }
    }

    AuctionSpec spec{n, cv, valuation};
    rep.best_response_check =
        verify_equilibrium(spec, Strategy::truthful(valuation), {}, opts.gain_tol, opts.quad);
    rep.truthful = rep.max_relative_integral_residual <= opts.integral_rel_tol &&
                   rep.best_response_check.passed;
    if (valuation.family() == "uniform01" &&
        std::fabs(rep.uniform_condition_residual) > opts.condition_tol) {
        rep.truthful = false;
    }
    return rep;
}

nlohmann::json TruthfulnessReport::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : integral_rows) {
        rows.push_back(
            {{"a", r.a}, {"residual", r.residual}, {"scale", r.scale}, {"relative", r.relative}});
    }
    return {{"n", n},
            {"alphas", alphas.alphas},
            {"uniform_condition_residual", uniform_condition_residual},
            {"integral_rows", rows},
            {"max_relative_integral_residual", max_relative_integral_residual},
            {"best_response_check", best_response_check.to_json()},
            {"truthful", truthful},
            {"notes", notes}};
}

} // namespace kprice
