#pragma once

#include <cmath>
#include <stdexcept>

#include "hedgelab/market.hpp"
#include "hedgelab/power_assets.hpp"

namespace hedgelab {

// Execution-friction parameter: traded drift scales by (1-eps), traded
// volatility by (1+eps), for both the stock and the power contract.
struct FrictionParams {
    double epsilon = 0.0;

    FrictionParams() = default;
    explicit FrictionParams(double eps) : epsilon(eps) { validate(); }
    void validate() const {
        if (epsilon < 0.0 || epsilon >= 1.0)
            throw std::invalid_argument("FrictionParams: epsilon must be in [0,1)");
    }
};

// Drift and volatility of the bond-free power contract V = S^delta.
inline double power_contract_mu(const MarketParams& params) {
    const double d = delta_exponent(params);
    return d * params.mu + 0.5 * d * (d - 1.0) * params.sigma * params.sigma;
}
inline double power_contract_sigma(const MarketParams& params) {
    return delta_exponent(params) * params.sigma;
}

namespace detail {
// Shared ratio [mu muV (1-e) - sigma sigmaV (1+e)] / [muV^2 (1-e)^2 + sigmaV^2 (1+e)^2].
inline double friction_ratio(const MarketParams& params, double eps) {
    const double muV = power_contract_mu(params);
    const double sigV = power_contract_sigma(params);
    const double den = muV * muV * (1.0 - eps) * (1.0 - eps) +
                       sigV * sigV * (1.0 + eps) * (1.0 + eps);
    if (den == 0.0) throw std::invalid_argument("degenerate power asset");
    return (params.mu * muV * (1.0 - eps) - params.sigma * sigV * (1.0 + eps)) / den;
}
}  // namespace detail

// Quadratic hedging-error objective in the power-contract position c:
//   phi(c) = (a sigma eps S + c sigmaV (1+eps) V)^2 + (-a mu eps S + c muV (1-eps) V)^2
inline double friction_error(double a, double c, const MarketParams& params,
                             const FrictionParams& friction, double S, double V) {
    const double eps = friction.epsilon;
    const double muV = power_contract_mu(params);
    const double sigV = power_contract_sigma(params);
    const double d1 = a * params.sigma * eps * S + c * sigV * (1.0 + eps) * V;
    const double d2 = -a * params.mu * eps * S + c * muV * (1.0 - eps) * V;
    return d1 * d1 + d2 * d2;
}

// Exact minimizer of friction_error in c. Vanishes at eps = 0 and at a = 0.
inline double friction_optimal_units(double a, const MarketParams& params,
                                     const FrictionParams& friction, double S, double V) {
    friction.validate();
    if (!(V > 0.0)) throw std::invalid_argument("friction_optimal_units: V must be > 0");
    return a * friction.epsilon * S * detail::friction_ratio(params, friction.epsilon) / V;
}

// The theta(t, eps) multiplier as displayed (no 1/V factor); c = a * theta
// under that reading. Kept for side-by-side comparison with the minimizer.
inline double friction_theta_literal(const MarketParams& params, const FrictionParams& friction,
                                     double S) {
    friction.validate();
    return friction.epsilon * S * detail::friction_ratio(params, friction.epsilon);
}

// Friction cost rate entering the priced drift as r + Gamma. This is the
// version induced by the exact minimizer: it is constant in x and vanishes at
// eps = 0, so the priced equation reduces to the frictionless one.
inline double friction_gamma_corrected(const MarketParams& params, const FrictionParams& friction) {
    friction.validate();
    const double eps = friction.epsilon;
    const double rho = detail::friction_ratio(params, eps);
    const double muV = power_contract_mu(params);
    const double sigV = power_contract_sigma(params);
    const double psi_c =
        params.sigma / ((1.0 + eps) * (params.sigma + eps * rho * sigV));
    return params.mu - params.r -
           psi_c * ((params.mu * (1.0 - eps) - params.r) +
                    eps * rho * (muV * (1.0 - eps) - params.r));
}

// The displayed cost rate, evaluated literally; x-dependent and nonzero at
// eps = 0.
inline double friction_gamma_literal(const MarketParams& params, const FrictionParams& friction,
                                     double x) {
    friction.validate();
    const double eps = friction.epsilon;
    const double muV = power_contract_mu(params);
    const double sigV = power_contract_sigma(params);
    const double d = delta_exponent(params);
    const double theta = friction_theta_literal(params, friction, x);
    const double V = std::pow(x, d);
    const double psi = params.sigma * x /
                       (params.sigma * (1.0 + eps) * x + theta * sigV * (1.0 + eps) * V);
    const double xd1 = std::pow(x, d - 1.0);
    return params.mu - params.r +
           psi * (1.0 - params.mu * (1.0 - eps) + params.r * theta * xd1 -
                  theta * muV * (1.0 - eps) * xd1);
}

}  // namespace hedgelab
