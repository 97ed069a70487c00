#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hedgelab/market.hpp"
#include "hedgelab/power_assets.hpp"

namespace hedgelab {

// Recombining binomial tree with up/down factors e^{+-sigma sqrt(dt)}.
struct CrrTree {
    MarketParams params;
    double S0 = 0.0;
    double T = 0.0;
    int n_steps = 0;
    double dt = 0.0;
    double u = 0.0;
    double d = 0.0;

    double node_price(int level, int down_moves) const {
        return S0 * std::pow(u, level - down_moves) * std::pow(d, down_moves);
    }
};

inline CrrTree crr_build(const MarketParams& params, double S0, double T, int n_steps) {
    params.validate();
    if (!(S0 > 0.0)) throw std::invalid_argument("crr_build: S0 must be > 0");
    if (!(T > 0.0)) throw std::invalid_argument("crr_build: T must be > 0");
    if (n_steps < 1) throw std::invalid_argument("crr_build: n_steps must be >= 1");
    CrrTree t;
    t.params = params;
    t.S0 = S0;
    t.T = T;
    t.n_steps = n_steps;
    t.dt = T / n_steps;
    t.u = std::exp(params.sigma * std::sqrt(t.dt));
    t.d = 1.0 / t.u;
    return t;
}

// One-step hedge in the stock and the bond-free power contract S^delta: the
// pair that zeroes the portfolio Y - d1*S - dd*S^delta in both successor
// states.
struct HedgePair {
    double delta_stock = 0.0;
    double delta_power = 0.0;
};

inline HedgePair crr_hedge_weights(double Y_up, double Y_dn, double S_up, double S_dn,
                                   double delta) {
    const double su_d = std::pow(S_up, delta);
    const double sd_d = std::pow(S_dn, delta);
    const double den = S_up * sd_d - su_d * S_dn;
    if (den == 0.0 || !std::isfinite(den))
        throw std::invalid_argument("crr_hedge_weights: degenerate successor states");
    HedgePair h;
    h.delta_stock = (Y_up * sd_d - Y_dn * su_d) / den;
    h.delta_power = (S_up * Y_dn - S_dn * Y_up) / den;
    return h;
}

// The displayed first-order risk-neutral weight 1/2 + (r - sigma^2/2)/(2 sigma) sqrt(dt).
inline double crr_q_first_order(const MarketParams& params, double dt) {
    return 0.5 +
           (params.r - 0.5 * params.sigma * params.sigma) / (2.0 * params.sigma) * std::sqrt(dt);
}

// Exact one-step measure of the bondless market: the unique (q, disc) that
// reprices both traded assets S and S^delta. Its recursion is algebraically
// identical to zeroing the stock + S^delta hedge at every node; the
// first-order q above is its sqrt(dt) expansion.
struct CrrMeasure {
    double q = 0.0;
    double disc = 0.0;
};

inline CrrMeasure crr_exact_q(const CrrTree& tree) {
    const double delta = delta_exponent(tree.params);
    const double u = tree.u, d = tree.d;
    const double ud = std::pow(u, delta), dd = std::pow(d, delta);
    const double den = (u - d) - (ud - dd);
    if (den == 0.0) throw std::runtime_error("lattice arbitrage violated");
    CrrMeasure m;
    m.q = (dd - d) / den;
    const double growth = m.q * u + (1.0 - m.q) * d;
    if (!(m.q > 0.0 && m.q < 1.0) || !(growth > 0.0))
        throw std::runtime_error("lattice arbitrage violated");
    m.disc = 1.0 / growth;
    return m;
}

enum class CrrMethod {
    risk_neutral_q,  // exact bondless measure
    v_hedge,         // per-node stock + S^delta portfolio zeroing
    risk_neutral_q_first_order,  // displayed q with e^{-r dt} discounting
};

// Backward induction; returns every level of node values (level k holds k+1
// entries, level 0 is the price).
inline std::vector<std::vector<double>> crr_solve(const CrrTree& tree, const PayoffSpec& payoff,
                                                  CrrMethod method) {
    const int n = tree.n_steps;
    std::vector<std::vector<double>> levels(static_cast<std::size_t>(n) + 1);
    auto& terminal = levels[static_cast<std::size_t>(n)];
    terminal.resize(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) terminal[static_cast<std::size_t>(j)] = payoff(tree.node_price(n, j));

    double q = 0.0, disc = 0.0;
    const double delta = delta_exponent(tree.params);
    if (method == CrrMethod::risk_neutral_q) {
        const CrrMeasure m = crr_exact_q(tree);
        q = m.q;
        disc = m.disc;
    } else if (method == CrrMethod::risk_neutral_q_first_order) {
        q = crr_q_first_order(tree.params, tree.dt);
        if (!(q > 0.0 && q < 1.0)) throw std::runtime_error("lattice arbitrage violated");
        disc = std::exp(-tree.params.r * tree.dt);
    }

    for (int k = n - 1; k >= 0; --k) {
        auto& cur = levels[static_cast<std::size_t>(k)];
        const auto& next = levels[static_cast<std::size_t>(k) + 1];
        cur.resize(static_cast<std::size_t>(k) + 1);
        for (int j = 0; j <= k; ++j) {
            const double Y_up = next[static_cast<std::size_t>(j)];
            const double Y_dn = next[static_cast<std::size_t>(j) + 1];
            if (method == CrrMethod::v_hedge) {
                const double S = tree.node_price(k, j);
                const HedgePair h = crr_hedge_weights(Y_up, Y_dn, S * tree.u, S * tree.d, delta);
                cur[static_cast<std::size_t>(j)] =
                    h.delta_stock * S + h.delta_power * std::pow(S, delta);
            } else {
                cur[static_cast<std::size_t>(j)] = disc * (q * Y_up + (1.0 - q) * Y_dn);
            }
        }
    }
    return levels;
}

inline double crr_price(const CrrTree& tree, const PayoffSpec& payoff, CrrMethod method) {
    return crr_solve(tree, payoff, method)[0][0];
}

}  // namespace hedgelab
