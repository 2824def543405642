#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "kprice/errors.hpp"

namespace kprice {

// Weights of a combination-price rule: the winner pays
// sum_k alphas[k-1] * (k-th highest bid). Index 0 is the first-price weight.
struct CoefficientVector {
    std::vector<double> alphas;

    int s() const { return static_cast<int>(alphas.size()); }

    // 1-based price index; 0 past the end.
    double alpha(int k) const {
        return (k >= 1 && k <= s()) ? alphas[static_cast<size_t>(k - 1)] : 0.0;
    }

    void validate() const {
        if (s() < 2) {
            throw invalid_argument_error("coefficient vector: need at least 2 entries, got " +
                                         std::to_string(s()));
        }
        double sum = 0.0;
        for (int k = 1; k <= s(); ++k) {
            double a = alpha(k);
            if (!(a >= 0.0) || !std::isfinite(a)) {
                throw invalid_argument_error("coefficient vector: alpha_" + std::to_string(k) +
                                             " must be a finite nonnegative number");
            }
            sum += a;
        }
        if (std::fabs(sum - 1.0) > 1e-12) {
            throw invalid_argument_error("coefficient vector: weights sum to " +
                                         std::to_string(sum) + ", expected 1");
        }
    }

    nlohmann::json to_json(int n) const { return {{"n", n}, {"alphas", alphas}}; }

    static std::pair<int, CoefficientVector> from_json(const nlohmann::json& j) {
        if (!j.contains("n") || !j.contains("alphas")) {
            throw invalid_argument_error("coefficient vector JSON: need keys 'n' and 'alphas'");
        }
        CoefficientVector cv{j.at("alphas").get<std::vector<double>>()};
        cv.validate();
        return {j.at("n").get<int>(), cv};
    }
};

} // namespace kprice
