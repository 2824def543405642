#include "kprice/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kprice/numerics.hpp"
#include "kprice/rational.hpp"

namespace kprice {

void AuctionSpec::validate() const {
    if (n < 2) throw invalid_argument_error("auction: need n >= 2 bidders, got " + std::to_string(n));
    if (is_kprice()) {
        int kk = std::get<KPrice>(payment).k;
        if (kk < 2 || kk > n) {
            throw invalid_argument_error("k-price rule: need 2 <= k <= n, got k=" +
                                         std::to_string(kk) + ", n=" + std::to_string(n));
        }
    } else {
        const auto& cv = std::get<CoefficientVector>(payment);
        cv.validate();
        if (cv.s() > n) {
            throw invalid_argument_error("combination rule: " + std::to_string(cv.s()) +
                                         " weights but only " + std::to_string(n) + " bids");
        }
    }
}

int AuctionSpec::k() const {
    if (!is_kprice()) throw invalid_argument_error("auction: payment rule is a combination, not k-price");
    return std::get<KPrice>(payment).k;
}

const CoefficientVector& AuctionSpec::coefficients() const {
    if (is_kprice()) throw invalid_argument_error("auction: payment rule is k-price, not a combination");
    return std::get<CoefficientVector>(payment);
}

std::vector<std::string> AuctionSpec::notes() const {
    std::vector<std::string> out;
    if (is_kprice() && k() == n) out.push_back("n == k: the winner pays the lowest bid");
    return out;
}

nlohmann::json AuctionSpec::payment_json() const {
    if (is_kprice()) return {{"rule", "kprice"}, {"k", k()}};
    return {{"rule", "combination"}, {"alphas", coefficients().alphas}};
}

// ---------------------------------------------------------------------------
// Strategy

struct Strategy::Impl {
    virtual ~Impl() = default;
    virtual double bid_at_value(double v) const = 0;
    virtual double bid_at_quantile(double a) const = 0;
    virtual const std::optional<Distribution>& dist() const = 0;
    virtual std::vector<std::pair<double, double>> knots() const { return {}; }
    virtual nlohmann::json descriptor() const = 0;
    virtual void save_csv(const std::string& path, int grid_points) const = 0;
};

namespace {

constexpr double kGridLo = 1e-4;
constexpr double kGridHi = 1.0 - 1e-4;

void write_bid_csv(const std::string& path, const std::vector<double>& vs,
                   const std::vector<double>& bids) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write strategy CSV: " + path);
    out << "v,bid\n";
    for (size_t i = 0; i < vs.size(); ++i) {
        out << format_double(vs[i]) << ',' << format_double(bids[i]) << '\n';
    }
    if (!out) throw io_error("short write to strategy CSV: " + path);
}

struct TruthfulImpl final : Strategy::Impl {
    std::optional<Distribution> d;
    explicit TruthfulImpl(std::optional<Distribution> dd) : d(std::move(dd)) {}

    double bid_at_value(double v) const override { return v; }
    double bid_at_quantile(double a) const override {
        if (!d) throw invalid_argument_error("truthful strategy: no distribution attached");
        return d->quantile(a);
    }
    const std::optional<Distribution>& dist() const override { return d; }
    nlohmann::json descriptor() const override {
        nlohmann::json j{{"type", "truthful"}};
        if (d) j["distribution"] = d->descriptor();
        return j;
    }
    void save_csv(const std::string& path, int grid_points) const override {
        if (!d) throw invalid_argument_error("truthful strategy: no distribution to sample");
        std::vector<double> vs, bids;
        for (int i = 0; i < grid_points; ++i) {
            double a = kGridLo + (kGridHi - kGridLo) * i / double(grid_points - 1);
            vs.push_back(d->quantile(a));
            bids.push_back(vs.back());
        }
        write_bid_csv(path, vs, bids);
    }
};

struct TableImpl final : Strategy::Impl {
    std::vector<double> vs, bids;
    std::optional<Distribution> d;

    TableImpl(std::vector<double> v, std::vector<double> b, std::optional<Distribution> dd)
        : vs(std::move(v)), bids(std::move(b)), d(std::move(dd)) {
        if (vs.size() != bids.size() || vs.size() < 2) {
            throw invalid_argument_error("strategy table: need matching v/bid columns with >= 2 rows");
        }
        for (size_t i = 1; i < vs.size(); ++i) {
            if (!(vs[i] > vs[i - 1])) {
                throw invalid_argument_error("strategy table: v column not strictly increasing at row " +
                                             std::to_string(i));
            }
        }
    }

    double bid_at_value(double v) const override {
        size_t hi = static_cast<size_t>(std::upper_bound(vs.begin(), vs.end(), v) - vs.begin());
        size_t i = hi == 0 ? 0 : (hi >= vs.size() ? vs.size() - 2 : hi - 1);
        double w = (v - vs[i]) / (vs[i + 1] - vs[i]);
        return bids[i] + w * (bids[i + 1] - bids[i]);
    }
    double bid_at_quantile(double a) const override {
        if (!d) throw invalid_argument_error("table strategy: no distribution attached");
        return bid_at_value(d->quantile(a));
    }
    const std::optional<Distribution>& dist() const override { return d; }
    std::vector<std::pair<double, double>> knots() const override {
        std::vector<std::pair<double, double>> out;
        out.reserve(vs.size());
        for (size_t i = 0; i < vs.size(); ++i) out.emplace_back(vs[i], bids[i]);
        return out;
    }
    nlohmann::json descriptor() const override {
        nlohmann::json j{{"type", "table"}, {"points", vs.size()},
                         {"v_lo", vs.front()}, {"v_hi", vs.back()}};
        if (d) j["distribution"] = d->descriptor();
        return j;
    }
    void save_csv(const std::string& path, int) const override { write_bid_csv(path, vs, bids); }
};

enum class Form { leibniz, three_price, four_price };

struct ClosedFormImpl final : Strategy::Impl {
    int n, k;
    Form form;
    std::optional<Distribution> d;

    ClosedFormImpl(int nn, int kk, Form f, Distribution dd)
        : n(nn), k(kk), form(f), d(std::move(dd)) {}

    double eval_quantile(double a) const {
        const Distribution& dist = *d;
        if (a <= 0.0) return dist.quantile(0.0);
        switch (form) {
        case Form::leibniz:
            return equilibrium_bid_at_quantile(dist, n, k, a);
        case Form::three_price:
        case Form::four_price:
            return eval_value(dist.quantile(a));
        }
        return 0.0;
    }

    double eval_value(double v) const {
        const Distribution& dist = *d;
        if (v <= dist.support_lo()) return dist.support_lo();
        switch (form) {
        case Form::leibniz:
            return equilibrium_bid_at_quantile(dist, n, k, dist.cdf(v));
        case Form::three_price: {
            double F = dist.cdf(v);
            double f = dist.pdf(v);
            return v + F / ((n - 2) * f);
        }
        case Form::four_price: {
            double F = dist.cdf(v);
            double f = dist.pdf(v);
            double fp = dist.pdf_derivative(v);
            return v + 2.0 * F / ((n - 3) * f) -
                   F * F * fp / (double(n - 2) * double(n - 3) * f * f * f);
        }
        }
        return 0.0;
    }

    double bid_at_value(double v) const override { return eval_value(v); }
    double bid_at_quantile(double a) const override { return eval_quantile(a); }
    const std::optional<Distribution>& dist() const override { return d; }
    nlohmann::json descriptor() const override {
        const char* name = form == Form::leibniz     ? "kprice_closed_form"
                           : form == Form::three_price ? "three_price_fast_path"
                                                       : "four_price_fast_path";
        return {{"type", "closed_form"},
                {"formula", name},
                {"n", n},
                {"k", k},
                {"distribution", d->descriptor()}};
    }
    void save_csv(const std::string& path, int grid_points) const override {
        std::vector<double> vs, bids;
        vs.reserve(grid_points);
        bids.reserve(grid_points);
        for (int i = 0; i < grid_points; ++i) {
            double a = kGridLo + (kGridHi - kGridLo) * i / double(grid_points - 1);
            vs.push_back(d->quantile(a));
            bids.push_back(eval_quantile(a));
        }
        write_bid_csv(path, vs, bids);
    }
};

} // namespace

Strategy Strategy::truthful(std::optional<Distribution> valuation) {
    return Strategy(std::make_shared<TruthfulImpl>(std::move(valuation)));
}

Strategy Strategy::from_table(std::vector<double> values, std::vector<double> bids,
                              std::optional<Distribution> valuation) {
    return Strategy(std::make_shared<TableImpl>(std::move(values), std::move(bids),
                                                std::move(valuation)));
}

Strategy Strategy::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open strategy CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw invalid_argument_error(path + ": empty file");
    auto strip = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
        return s;
    };
    if (strip(line) != "v,bid") {
        throw invalid_argument_error(path + ": expected header 'v,bid', got '" + strip(line) + "'");
    }
    std::vector<double> vs, bids;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string left, right;
        if (!std::getline(row, left, ',') || !std::getline(row, right)) {
            throw invalid_argument_error(path + ":" + std::to_string(lineno) +
                                         ": expected two comma-separated values");
        }
        try {
            vs.push_back(std::stod(left));
            bids.push_back(std::stod(right));
        } catch (const std::exception&) {
            throw invalid_argument_error(path + ":" + std::to_string(lineno) +
                                         ": cannot parse row '" + line + "'");
        }
    }
    return from_table(std::move(vs), std::move(bids));
}

double Strategy::operator()(double value) const { return impl_->bid_at_value(value); }
double Strategy::at_quantile(double a) const { return impl_->bid_at_quantile(a); }
const std::optional<Distribution>& Strategy::valuation_dist() const { return impl_->dist(); }
std::vector<std::pair<double, double>> Strategy::knots() const { return impl_->knots(); }
nlohmann::json Strategy::descriptor() const { return impl_->descriptor(); }
void Strategy::save_csv(const std::string& path, int grid_points) const {
    if (grid_points < 2) throw invalid_argument_error("save_csv: need at least 2 grid points");
    impl_->save_csv(path, grid_points);
}

// ---------------------------------------------------------------------------
// Solvers

double equilibrium_bid_at_quantile(const Distribution& valuation, int n, int k, double a) {
    if (a <= 0.0) return valuation.quantile(0.0);
    double sum = 0.0;
    double ratio = 1.0;
    for (int j = 0; j <= k - 2; ++j) {
        if (j > 0) ratio /= double(n - k + j);
        double c = static_cast<double>(binomial(k - 2, j)) * ratio;
        sum += c * std::pow(a, j) * valuation.quantile_derivative(a, j);
    }
    return sum;
}

namespace {

Strategy solve_with(const AuctionSpec& spec, Form form, int max_order) {
    spec.validate();
    const Distribution& d = spec.valuation;
    int n = spec.n;
    int k = spec.k();
    if (max_order > d.max_quantile_order()) {
        throw invalid_argument_error("equilibrium: needs quantile derivatives up to order " +
                                     std::to_string(max_order) + ", distribution supports " +
                                     std::to_string(d.max_quantile_order()));
    }
    double margin = d.quantile_derivative_margin(max_order);
    if (margin == 0.0) {
        return Strategy(std::make_shared<ClosedFormImpl>(n, k, form, d));
    }
    // Tabulated quantile: sample the formula inside the stencil margins and
    // hand back a table anchored at the lower support edge.
    ClosedFormImpl eval(n, k, form, d);
    double a_lo = std::max(kGridLo, margin);
    double a_hi = std::min(kGridHi, 1.0 - margin);
    if (!(a_lo < a_hi)) {
        throw numeric_error("equilibrium: finite-difference margin " + format_double(margin) +
                            " leaves no usable quantile range");
    }
    const int points = 2049;
    std::vector<double> vs, bids;
    vs.reserve(points + 1);
    bids.reserve(points + 1);
    double v_lo = d.support_lo();
    for (int i = 0; i < points; ++i) {
        double a = a_lo + (a_hi - a_lo) * i / double(points - 1);
        double v = d.quantile(a);
        if (i == 0 && v > v_lo) {
            vs.push_back(v_lo);
            bids.push_back(v_lo);
        }
        vs.push_back(v);
        bids.push_back(eval.eval_quantile(a));
    }
    return Strategy::from_table(std::move(vs), std::move(bids), d);
}

} // namespace

Strategy solve_closed_form(const AuctionSpec& spec) {
    return solve_with(spec, Form::leibniz, spec.k() - 2);
}

Strategy three_price_formula(const AuctionSpec& spec) {
    if (!spec.is_kprice() || spec.k() != 3) {
        throw invalid_argument_error("three_price_formula: payment rule must be k-price with k=3");
    }
    return solve_with(spec, Form::three_price, 2);
}

Strategy four_price_formula(const AuctionSpec& spec) {
    if (!spec.is_kprice() || spec.k() != 4) {
        throw invalid_argument_error("four_price_formula: payment rule must be k-price with k=4");
    }
    return solve_with(spec, Form::four_price, 2);
}

double uniform_slope(int n, int k) {
    if (k < 2 || k > n) {
        throw invalid_argument_error("uniform_slope: need 2 <= k <= n, got k=" + std::to_string(k) +
                                     ", n=" + std::to_string(n));
    }
    return double(n - 1) / double(n - k + 1);
}

double polynomial_slope_gamma(double alpha, int n, int k) {
    if (!(alpha > 0.0)) throw invalid_argument_error("polynomial_slope_gamma: alpha must be positive");
    if (k < 2 || k > n) {
        throw invalid_argument_error("polynomial_slope_gamma: need 2 <= k <= n");
    }
    double ia = 1.0 / alpha;
    return std::exp(std::lgamma(n - k + 1.0) + std::lgamma(n - 1.0 + ia) -
                    std::lgamma(n - k + 1.0 + ia) - std::lgamma(n - 1.0));
}

double polynomial_slope_product(int m, int n, int k) {
    if (m < 1) throw invalid_argument_error("polynomial_slope_product: need integer m >= 1");
    if (k < 2 || k > n) {
        throw invalid_argument_error("polynomial_slope_product: need 2 <= k <= n");
    }
    double r = 1.0;
    for (int i = 0; i <= k - 3; ++i) r *= double(n - 2 + m - i) / double(n - 2 - i);
    return r;
}

MonotonicityReport check_existence(const Strategy& strategy, int grid_size) {
    if (grid_size < 2) throw invalid_argument_error("check_existence: need at least 2 grid points");
    MonotonicityReport rep;
    rep.increasing = true;
    rep.min_increment = std::numeric_limits<double>::infinity();

    std::vector<std::pair<double, double>> samples;
    if (strategy.valuation_dist()) {
        samples.reserve(grid_size);
        for (int i = 0; i < grid_size; ++i) {
            double a = kGridLo + (kGridHi - kGridLo) * i / double(grid_size - 1);
            samples.emplace_back(a, strategy.at_quantile(a));
        }
    } else {
        samples = strategy.knots();
        if (samples.empty()) {
            throw invalid_argument_error(
                "check_existence: strategy has neither a distribution nor a table");
        }
        rep.notes.push_back("no distribution attached: scanned table knots, positions are values");
    }
    rep.grid_size = static_cast<int>(samples.size());
    for (size_t i = 1; i < samples.size(); ++i) {
        double inc = samples[i].second - samples[i - 1].second;
        rep.min_increment = std::min(rep.min_increment, inc);
        if (inc <= 0.0 && !rep.first_violation_a) {
            rep.increasing = false;
            rep.first_violation_a = samples[i - 1].first;
        }
    }
    return rep;
}

nlohmann::json MonotonicityReport::to_json() const {
    nlohmann::json j{{"increasing", increasing},
                     {"grid_size", grid_size},
                     {"min_increment", min_increment},
                     {"notes", notes}};
    j["first_violation_a"] =
        first_violation_a ? nlohmann::json(*first_violation_a) : nlohmann::json(nullptr);
    return j;
}

} // namespace kprice
