#include "kprice/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "kprice/numerics.hpp"
#include "kprice/rational.hpp"

namespace kprice {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_unit_interval(double a, const char* who) {
    if (!(a >= 0.0 && a <= 1.0)) {
        throw domain_error(std::string(who) + ": quantile argument " + format_double(a) +
                           " outside [0,1]");
    }
}

struct Uniform01 final : Distribution::Impl {
    double cdf(double x) const override { return std::clamp(x, 0.0, 1.0); }
    double pdf(double x) const override { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; }
    double pdf_derivative(double) const override { return 0.0; }
    double quantile(double a) const override {
        check_unit_interval(a, "uniform01");
        return a;
    }
    double quantile_derivative(double a, int order) const override {
        check_unit_interval(a, "uniform01");
        if (order == 0) return a;
        return order == 1 ? 1.0 : 0.0;
    }
    int max_quantile_order() const override { return 64; }
    double support_lo() const override { return 0.0; }
    double support_hi() const override { return 1.0; }
    std::string family() const override { return "uniform01"; }
    nlohmann::json descriptor() const override { return {{"family", "uniform01"}}; }
};

struct Polynomial final : Distribution::Impl {
    double alpha;
    explicit Polynomial(double a) : alpha(a) {}

    double cdf(double x) const override {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return std::pow(x, alpha);
    }
    double pdf(double x) const override {
        if (x < 0.0 || x > 1.0) return 0.0;
        return alpha * std::pow(x, alpha - 1.0);
    }
    double pdf_derivative(double x) const override {
        if (x < 0.0 || x > 1.0) return 0.0;
        return alpha * (alpha - 1.0) * std::pow(x, alpha - 2.0);
    }
    double quantile(double a) const override {
        check_unit_interval(a, "polynomial");
        return std::pow(a, 1.0 / alpha);
    }
    double quantile_derivative(double a, int order) const override {
        check_unit_interval(a, "polynomial");
        if (order == 0) return quantile(a);
        double coeff = falling_product(1.0 / alpha, order);
        if (coeff == 0.0) return 0.0;
        return coeff * std::pow(a, 1.0 / alpha - order);
    }
    int max_quantile_order() const override { return 64; }
    double support_lo() const override { return 0.0; }
    double support_hi() const override { return 1.0; }
    std::string family() const override { return "polynomial"; }
    nlohmann::json descriptor() const override {
        return {{"family", "polynomial"}, {"alpha", alpha}};
    }
};

struct Exponential final : Distribution::Impl {
    double rate;
    explicit Exponential(double r) : rate(r) {}

    double cdf(double x) const override { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); }
    double pdf(double x) const override { return x < 0.0 ? 0.0 : rate * std::exp(-rate * x); }
    double pdf_derivative(double x) const override {
        return x < 0.0 ? 0.0 : -rate * rate * std::exp(-rate * x);
    }
    double quantile(double a) const override {
        check_unit_interval(a, "exponential");
        if (a == 1.0) throw domain_error("exponential: quantile(1) is infinite");
        return -std::log1p(-a) / rate;
    }
    double quantile_derivative(double a, int order) const override {
        check_unit_interval(a, "exponential");
        if (order == 0) return quantile(a);
        if (a == 1.0) throw domain_error("exponential: quantile derivatives blow up at a=1");
        double r = 1.0 / (rate * (1.0 - a));
        for (int i = 1; i < order; ++i) r *= i / (1.0 - a);
        return r;
    }
    int max_quantile_order() const override { return 64; }
    double support_lo() const override { return 0.0; }
    double support_hi() const override { return kInf; }
    std::string family() const override { return "exponential"; }
    nlohmann::json descriptor() const override {
        return {{"family", "exponential"}, {"rate", rate}};
    }
};

struct Tabulated final : Distribution::Impl {
    std::vector<double> a, q;
    std::string source;
    double h;

    Tabulated(std::vector<double> av, std::vector<double> qv, std::string src)
        : a(std::move(av)), q(std::move(qv)), source(std::move(src)) {
        if (a.size() != q.size()) {
            throw invalid_argument_error("tabulated quantile: column lengths differ (" +
                                         std::to_string(a.size()) + " vs " +
                                         std::to_string(q.size()) + ")");
        }
        if (a.size() < 2) throw invalid_argument_error("tabulated quantile: need at least 2 rows");
        double spacing = 0.0;
        for (size_t i = 0; i < a.size(); ++i) {
            if (!(a[i] >= 0.0 && a[i] <= 1.0)) {
                throw invalid_argument_error("tabulated quantile: a[" + std::to_string(i) + "]=" +
                                             format_double(a[i]) + " outside [0,1]");
            }
            if (i > 0) {
                if (!(a[i] > a[i - 1])) {
                    throw invalid_argument_error(
                        "tabulated quantile: a column not strictly increasing at row " +
                        std::to_string(i));
                }
                if (!(q[i] > q[i - 1])) {
                    throw invalid_argument_error(
                        "tabulated quantile: q column not strictly increasing at row " +
                        std::to_string(i));
                }
                spacing = std::max(spacing, a[i] - a[i - 1]);
            }
        }
        h = std::max(1e-3, 10.0 * spacing);
    }

    size_t segment(double t) const {
        auto it = std::upper_bound(a.begin(), a.end(), t);
        size_t i = static_cast<size_t>(it - a.begin());
        if (i == 0) return 0;
        if (i >= a.size()) return a.size() - 2;
        return i - 1;
    }

    double interp(double t) const {
        size_t i = segment(t);
        double w = (t - a[i]) / (a[i + 1] - a[i]);
        return q[i] + w * (q[i + 1] - q[i]);
    }

    double cdf(double x) const override {
        if (x <= q.front()) return a.front();
        if (x >= q.back()) return a.back();
        auto it = std::upper_bound(q.begin(), q.end(), x);
        size_t i = static_cast<size_t>(it - q.begin()) - 1;
        double w = (x - q[i]) / (q[i + 1] - q[i]);
        return a[i] + w * (a[i + 1] - a[i]);
    }
    double pdf(double x) const override { return 1.0 / quantile_derivative(cdf(x), 1); }
    double pdf_derivative(double x) const override {
        double t = cdf(x);
        double d1 = quantile_derivative(t, 1);
        double d2 = quantile_derivative(t, 2);
        return -d2 / (d1 * d1 * d1);
    }
    double quantile(double t) const override {
        check_unit_interval(t, "tabulated quantile");
        if (t < a.front() || t > a.back()) {
            throw domain_error("tabulated quantile: a=" + format_double(t) +
                               " outside the tabulated range [" + format_double(a.front()) + "," +
                               format_double(a.back()) + "]");
        }
        return interp(t);
    }
    double quantile_derivative(double t, int order) const override {
        if (order == 0) return quantile(t);
        if (order > max_quantile_order()) {
            throw invalid_argument_error("tabulated quantile: derivative order " +
                                         std::to_string(order) + " above supported maximum 4");
        }
        check_unit_interval(t, "tabulated quantile");
        double margin = h * order;
        double lo = a.front() + margin;
        double hi = a.back() - margin;
        if (t < lo || t > hi) {
            throw numeric_error("tabulated quantile: a=" + format_double(t) +
                                " too close to the table edge for an order-" +
                                std::to_string(order) + " stencil; needs a in [" +
                                format_double(lo) + "," + format_double(hi) + "]");
        }
        return central_difference([this](double u) { return interp(u); }, t, order, h);
    }
    int max_quantile_order() const override { return 4; }
    double quantile_derivative_margin(int order) const override { return h * order; }
    double support_lo() const override { return q.front(); }
    double support_hi() const override { return q.back(); }
    std::string family() const override { return "tabulated_quantile"; }
    nlohmann::json descriptor() const override {
        nlohmann::json d{{"family", "tabulated_quantile"},
                         {"points", a.size()},
                         {"a_lo", a.front()},
                         {"a_hi", a.back()},
                         {"fd_step", h}};
        if (!source.empty()) d["source"] = source;
        return d;
    }
};

} // namespace

Distribution Distribution::uniform01() { return Distribution(std::make_shared<Uniform01>()); }

Distribution Distribution::polynomial(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw invalid_argument_error("polynomial distribution: alpha must be positive, got " +
                                     format_double(alpha));
    }
    return Distribution(std::make_shared<Polynomial>(alpha));
}

Distribution Distribution::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw invalid_argument_error("exponential distribution: rate must be positive, got " +
                                     format_double(rate));
    }
    return Distribution(std::make_shared<Exponential>(rate));
}

Distribution Distribution::tabulated_quantile(std::vector<double> a, std::vector<double> q,
                                              std::string source) {
    return Distribution(std::make_shared<Tabulated>(std::move(a), std::move(q), std::move(source)));
}

Distribution Distribution::load_quantile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open quantile table: " + path);
    std::string line;
    if (!std::getline(in, line)) throw invalid_argument_error(path + ": empty file");
    auto strip = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
        size_t i = s.find_first_not_of(" \t");
        return i == std::string::npos ? std::string() : s.substr(i);
    };
    if (strip(line) != "a,q") {
        throw invalid_argument_error(path + ": expected header 'a,q', got '" + strip(line) + "'");
    }
    std::vector<double> a, q;
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
            a.push_back(std::stod(left));
            q.push_back(std::stod(right));
        } catch (const std::exception&) {
            throw invalid_argument_error(path + ":" + std::to_string(lineno) +
                                         ": cannot parse row '" + line + "'");
        }
    }
    return tabulated_quantile(std::move(a), std::move(q), path);
}

Distribution Distribution::parse(const std::string& text) {
    if (text == "uniform" || text == "uniform01") return uniform01();
    auto split = text.find(':');
    std::string head = text.substr(0, split);
    std::string tail = split == std::string::npos ? "" : text.substr(split + 1);
    try {
        if (head == "poly" && !tail.empty()) return polynomial(std::stod(tail));
        if (head == "exp" && !tail.empty()) return exponential(std::stod(tail));
    } catch (const invalid_argument_error&) {
        throw;
    } catch (const std::exception&) {
        throw invalid_argument_error("distribution '" + text + "': bad parameter '" + tail + "'");
    }
    if (head == "table" && !tail.empty()) return load_quantile_csv(tail);
    throw invalid_argument_error(
        "unknown distribution '" + text +
        "'; expected uniform | poly:<alpha> | exp:<rate> | table:<csv path>");
}

bool Distribution::bounded_support() const { return std::isfinite(support_hi()); }

} // namespace kprice
