#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "kprice/errors.hpp"

namespace kprice {

// A valuation (or bid) distribution: CDF/PDF on the value side plus the
// quantile function q and its derivatives, which drive the equilibrium
// formulas. Closed-form families expose analytic derivatives; tabulated
// quantiles use central differences with one Richardson step.
class Distribution {
public:
    struct Impl {
        virtual ~Impl() = default;
        virtual double cdf(double x) const = 0;
        virtual double pdf(double x) const = 0;
        virtual double pdf_derivative(double x) const = 0;
        virtual double quantile(double a) const = 0;
        virtual double quantile_derivative(double a, int order) const = 0;
        virtual int max_quantile_order() const = 0;
        virtual double quantile_derivative_margin(int) const { return 0.0; }
        virtual double support_lo() const = 0;
        virtual double support_hi() const = 0;
        virtual std::string family() const = 0;
        virtual nlohmann::json descriptor() const = 0;
    };

    static Distribution uniform01();
    static Distribution polynomial(double alpha);
    static Distribution exponential(double rate);
    static Distribution tabulated_quantile(std::vector<double> a, std::vector<double> q,
                                           std::string source = "");
    static Distribution load_quantile_csv(const std::string& path);

    // Mini-language used by the CLI: uniform | poly:<alpha> | exp:<rate> |
    // table:<csv path>.
    static Distribution parse(const std::string& text);

    double cdf(double x) const { return impl_->cdf(x); }
    double pdf(double x) const { return impl_->pdf(x); }
    double pdf_derivative(double x) const { return impl_->pdf_derivative(x); }
    double quantile(double a) const { return impl_->quantile(a); }

    // order 0 is the quantile itself. Orders above max_quantile_order(), or
    // points too close to a tabulated boundary for the stencil, throw.
    double quantile_derivative(double a, int order) const {
        return impl_->quantile_derivative(a, order);
    }
    int max_quantile_order() const { return impl_->max_quantile_order(); }

    // 0 for analytic families. Tabulated quantiles cannot differentiate
    // closer than this to the table edges; callers building grids should
    // stay inside [a_lo + margin, a_hi - margin].
    double quantile_derivative_margin(int order) const {
        return impl_->quantile_derivative_margin(order);
    }

    double support_lo() const { return impl_->support_lo(); }
    double support_hi() const { return impl_->support_hi(); }
    bool bounded_support() const;

    std::string family() const { return impl_->family(); }
    nlohmann::json descriptor() const { return impl_->descriptor(); }

private:
    explicit Distribution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

} // namespace kprice
