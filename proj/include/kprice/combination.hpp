#pragma once

#include <vector>

#include "kprice/payoff.hpp"

namespace kprice {

// Residual of the linear condition under which truthful bidding is an
// equilibrium for uniform valuations:
//   alpha_1 - sum_{k=3}^{s} (k-2) alpha_k.
// Zero means the first-price weight exactly offsets the overbidding pull of
// the below-second-price weights. Exactly representable inputs give an
// exactly zero residual.
double truthful_condition_residual(const CoefficientVector& cv, int n);

// Vertices of the truthful polytope {alpha >= 0, sum = 1, condition = 0}:
// the pure second-price rule, then one vertex per support {1, k} for
// k = 3..s with alpha_1 = (k-2)/(k-1), alpha_k = 1/(k-1).
std::vector<CoefficientVector> enumerate_truthful_vertices(int n, int s);

// The enumeration-order-first vertex minimizing alpha_2 (zero once s >= 3).
CoefficientVector minimize_alpha2(int n, int s);

// First-order condition residual for truth-telling at valuation quantile a,
// for a general valuation distribution with quantile q:
//   R(a) = sum_{k=3}^{s} alpha_k [ (n-1) q(a) a^{n-2}
//            - gamma_k integral_0^a q(u) u^{n-k} (a-u)^{k-3} du ]
//          - alpha_1 a^{n-1} q'(a),
//   gamma_k = (n-1)!/((n-k)!(k-3)!).
// Truthful bidding is an equilibrium exactly when R vanishes for all a; on
// the uniform distribution this reduces to the linear condition above.
double truthful_integral_residual(const CoefficientVector& cv, int n,
                                  const Distribution& valuation, double a,
                                  const QuadOptions& opts = {});

struct TruthfulnessRow {
    double a = 0.0;
    double residual = 0.0;
    double scale = 0.0;
    double relative = 0.0;
};

struct TruthfulnessOptions {
    double condition_tol = 1e-12;
    double integral_rel_tol = 1e-6;
    double gain_tol = 1e-5;
    QuadOptions quad;
};

struct TruthfulnessReport {
    int n = 0;
    CoefficientVector alphas;
    double uniform_condition_residual = 0.0;
    std::vector<TruthfulnessRow> integral_rows;
    double max_relative_integral_residual = 0.0;
    EquilibriumReport best_response_check;
    bool truthful = false;
    std::vector<std::string> notes;
    nlohmann::json to_json() const;
};

// Three independent angles on the same question: the first-order residual at
// a in {0.25, 0.5, 0.75, 1.0} (capped below 1 for unbounded supports), a
// best-response scan against truthful opponents, and (reported, not gating
// for non-uniform valuations) the uniform linear condition. The verdict
// requires the residuals and the best-response check to pass.
TruthfulnessReport verify_truthfulness(int n, const CoefficientVector& cv,
                                       const Distribution& valuation,
                                       const TruthfulnessOptions& opts = {});

} // namespace kprice
