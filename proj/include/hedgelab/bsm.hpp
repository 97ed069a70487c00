#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hedgelab/market.hpp"
#include "hedgelab/math.hpp"

namespace hedgelab {

// Closed-form European call/put value. The put comes from parity, so
// C - P = S0 - K e^{-rT} holds to the last bit by construction.
inline double bsm_closed_form(const MarketParams& params, const PayoffSpec& payoff,
                              double S0, double T) {
    if (payoff.kind == PayoffKind::custom)
        throw std::invalid_argument("bsm_closed_form: no closed form for custom payoffs");
    if (!(S0 > 0.0)) throw std::invalid_argument("bsm_closed_form: S0 must be > 0");
    if (!(T > 0.0)) throw std::invalid_argument("bsm_closed_form: T must be > 0");
    const double K = payoff.strike;
    const double r = params.r;
    const double sig = params.sigma;
    const double df = std::exp(-r * T);

    double call;
    const double vol_sqrt_t = sig * std::sqrt(T);
    if (vol_sqrt_t < 1e-14) {
        call = std::max(S0 - K * df, 0.0);  // deterministic forward
    } else {
        const double d1 = (std::log(S0 / K) + (r + 0.5 * sig * sig) * T) / vol_sqrt_t;
        const double d2 = d1 - vol_sqrt_t;
        call = S0 * norm_cdf(d1) - K * df * norm_cdf(d2);
    }
    if (payoff.kind == PayoffKind::call) return call;
    return call - S0 + K * df;
}

// Spot delta of the closed-form value (call: N(d1)).
inline double bsm_delta(const MarketParams& params, const PayoffSpec& payoff,
                        double S0, double T) {
    if (payoff.kind == PayoffKind::custom)
        throw std::invalid_argument("bsm_delta: no closed form for custom payoffs");
    if (!(T > 0.0)) {
        const double intrinsic_up = payoff.kind == PayoffKind::call;
        return intrinsic_up ? (S0 > payoff.strike ? 1.0 : 0.0)
                            : (S0 < payoff.strike ? -1.0 : 0.0);
    }
    const double vol_sqrt_t = params.sigma * std::sqrt(T);
    if (vol_sqrt_t < 1e-14) {
        const double fwd = S0 - payoff.strike * std::exp(-params.r * T);
        if (payoff.kind == PayoffKind::call) return fwd > 0.0 ? 1.0 : 0.0;
        return fwd < 0.0 ? -1.0 : 0.0;
    }
    const double d1 =
        (std::log(S0 / payoff.strike) + (params.r + 0.5 * params.sigma * params.sigma) * T) /
        vol_sqrt_t;
    if (payoff.kind == PayoffKind::call) return norm_cdf(d1);
    return norm_cdf(d1) - 1.0;
}

}  // namespace hedgelab
