#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hedgelab/bsm.hpp"
#include "hedgelab/friction.hpp"
#include "hedgelab/jumpdiff.hpp"
#include "hedgelab/market.hpp"
#include "hedgelab/paths.hpp"
#include "hedgelab/pde1d.hpp"
#include "hedgelab/pde2d.hpp"
#include "hedgelab/power_assets.hpp"

namespace hedgelab {

// Option value and sensitivities queried along simulated paths, either from
// the closed form or from a finite-difference surface (sensitivities by
// central differences on the surface, never by re-solving).
struct PricingSource {
    std::function<double(double S, double y, double t)> value;
    std::function<double(double S, double y, double t)> delta_x;
    std::function<double(double S, double y, double t)> delta_y;  // 2D only
    double x_lo = 0.0;
    double x_hi = 0.0;
    bool two_dim = false;

    static PricingSource closed_form(const MarketParams& params, const PayoffSpec& payoff,
                                     double T) {
        PricingSource src;
        src.value = [params, payoff, T](double S, double, double t) {
            const double tau = T - t;
            if (tau <= 0.0) return payoff(S);
            return bsm_closed_form(params, payoff, S, tau);
        };
        src.delta_x = [params, payoff, T](double S, double, double t) {
            return bsm_delta(params, payoff, S, std::max(T - t, 0.0));
        };
        src.x_lo = 0.0;
        src.x_hi = std::numeric_limits<double>::infinity();
        return src;
    }

    static PricingSource from_surface(const Surface1D& surface) {
        PricingSource src;
        src.value = [&surface](double S, double, double t) { return surface.value_at(S, t); };
        src.delta_x = [&surface](double S, double, double t) { return surface.delta_at(S, t); };
        src.x_lo = surface.x_min();
        src.x_hi = surface.x_max();
        return src;
    }

    static PricingSource from_surface(const Surface2D& surface) {
        PricingSource src;
        src.value = [&surface](double S, double y, double t) {
            return surface.value_at(S, y, t);
        };
        src.delta_x = [&surface](double S, double y, double t) {
            return surface.delta_x_at(S, y, t);
        };
        src.delta_y = [&surface](double S, double y, double t) {
            return surface.delta_y_at(S, y, t);
        };
        src.x_lo = surface.x_min();
        src.x_hi = surface.x_max();
        src.two_dim = true;
        return src;
    }
};

// Stock-and-power-contract replication weights: a stock units and b units of
// V = S^delta reproduce the option value, a S + b S^delta = Y.
struct Prop2Weights {
    double stock_units = 0.0;
    double power_units = 0.0;
};

inline Prop2Weights prop2_weights(double Y, double dY_dx, double S, double delta) {
    if (delta == 1.0) throw std::invalid_argument("prop2_weights: delta must differ from 1");
    Prop2Weights w;
    w.stock_units = dY_dx / (1.0 - delta) - delta / (1.0 - delta) * Y / S;
    w.power_units = std::pow(S, 1.0 - delta) / (1.0 - delta) * (Y / S - dY_dx);
    return w;
}

enum class StrategyKind {
    stock_bond,
    stock_power,
    stock_bond_power_friction,
    stock_power_jumpbond,
    sv_stock_bond_volindex,
};

struct StrategySpec {
    StrategyKind kind = StrategyKind::stock_bond;
    int rebalance_every = 1;
    MarketParams market;
    FrictionParams friction;       // stock_bond_power_friction
    JumpParams jump;               // stock_power_jumpbond
    double jump_bond_m = 0.0;      // drift of the jump bond (r for the traded one)
    double jump_bond_M0 = 1.0;

    void validate() const {
        if (rebalance_every < 1)
            throw std::invalid_argument("StrategySpec: rebalance_every must be >= 1");
        market.validate();
    }
};

struct HedgeReport {
    std::vector<double> terminal_errors;  // payoff(S_T) - portfolio_T per path
    double mean = 0.0;
    double rms = 0.0;
    double max_abs = 0.0;
    double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
    std::vector<double> port_trace0;  // portfolio values along path 0
};

namespace detail {

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= sorted.size()) return sorted.back();
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * sorted[i] + w * sorted[i + 1];
}

inline void check_coverage(const PathSet& paths, const PricingSource& pricing) {
    if (!std::isfinite(pricing.x_hi)) return;
    const auto& S = paths.channel("S");
    std::size_t outside = 0;
    double lo = S[0], hi = S[0];
    for (double s : S) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
        if (s < pricing.x_lo || s > pricing.x_hi) ++outside;
    }
    if (outside > 0)
        throw std::runtime_error(
            "backtest_hedge: pricing surface does not cover path range: " +
            std::to_string(outside) + " of " + std::to_string(S.size()) +
            " nodes outside [" + std::to_string(pricing.x_lo) + ", " +
            std::to_string(pricing.x_hi) + "], path range [" + std::to_string(lo) + ", " +
            std::to_string(hi) + "]");
}

}  // namespace detail

// Self-financing backtest: holdings are set at each rebalance node from the
// strategy's weight formulas and the portfolio rolls forward at realized
// asset returns; the budget is enforced by making the last instrument the
// residual. Reported error is payoff(S_T) minus the terminal portfolio.
inline HedgeReport backtest_hedge(const StrategySpec& strategy, const PathSet& paths,
                                  const PayoffSpec& payoff, const PricingSource& pricing) {
    strategy.validate();
    detail::check_coverage(paths, pricing);
    const auto& S = paths.channel("S");
    const bool has_v_channel = paths.has_channel("V");
    const std::vector<double>* vol_index =
        (strategy.kind == StrategyKind::sv_stock_bond_volindex)
            ? &paths.channel("V")
            : (has_v_channel ? &paths.channel("V") : nullptr);
    if (strategy.kind == StrategyKind::sv_stock_bond_volindex && !pricing.two_dim)
        throw std::invalid_argument("backtest_hedge: volatility strategy needs a 2D surface");

    const TimeGrid& grid = paths.grid();
    const std::size_t nn = paths.n_nodes();
    const double dt = grid.dt();
    const double r = strategy.market.r;
    const double delta = delta_exponent(strategy.market);
    const double eps = strategy.friction.epsilon;
    const double mu = strategy.market.mu, sig = strategy.market.sigma;
    const double muV = (strategy.kind == StrategyKind::stock_bond_power_friction)
                           ? power_contract_mu(strategy.market)
                           : 0.0;
    const double sigV = (strategy.kind == StrategyKind::stock_bond_power_friction)
                            ? power_contract_sigma(strategy.market)
                            : 0.0;

    // jump-bond leg shares the marks of the stock paths
    std::vector<double> const* jump_bond = nullptr;
    std::vector<double> const* z_state = nullptr;
    PathSet bond_paths;
    if (strategy.kind == StrategyKind::stock_power_jumpbond) {
        bond_paths = jump_bond_path(JumpBondParams{strategy.jump_bond_m}, paths,
                                    strategy.jump_bond_M0);
        jump_bond = &bond_paths.channel("M");
        if (paths.has_channel("z")) z_state = &paths.channel("z");
    }

    const std::size_t n_paths = paths.n_paths();
    HedgeReport report;
    report.terminal_errors.resize(n_paths);

    for (std::size_t p = 0; p < n_paths; ++p) {
        const double* Sp = &S[p * nn];
        const double* Vp = vol_index ? &(*vol_index)[p * nn] : nullptr;
        const double* Mp = jump_bond ? &(*jump_bond)[p * nn] : nullptr;
        const double* Zp = z_state ? &(*z_state)[p * nn] : nullptr;

        double port = pricing.value(Sp[0], Vp ? Vp[0] : 0.0, grid.t0);
        double a = 0.0, b = 0.0, c = 0.0, mh = 0.0;  // stock/bond-or-power/extra/jump-bond units
        for (std::size_t k = 0; k + 1 < nn; ++k) {
            const double t = grid.node(static_cast<int>(k));
            const double beta = std::exp(r * (t - grid.t0));
            if (k % static_cast<std::size_t>(strategy.rebalance_every) == 0) {
                const double y_here = Vp ? Vp[k] : 0.0;
                const double Y = pricing.value(Sp[k], y_here, t);
                const double dx = pricing.delta_x(Sp[k], y_here, t);
                switch (strategy.kind) {
                    case StrategyKind::stock_bond: {
                        a = dx;
                        b = (port - a * Sp[k]) / beta;
                        break;
                    }
                    case StrategyKind::stock_power: {
                        const Prop2Weights w = prop2_weights(Y, dx, Sp[k], delta);
                        a = w.stock_units;
                        b = (port - a * Sp[k]) / std::pow(Sp[k], delta);
                        break;
                    }
                    case StrategyKind::stock_bond_power_friction: {
                        const double V = std::pow(Sp[k], delta);
                        const double rho = detail::friction_ratio(strategy.market, eps);
                        const double psi_c = sig / ((1.0 + eps) * (sig + eps * rho * sigV));
                        a = dx * psi_c;
                        c = friction_optimal_units(a, strategy.market, strategy.friction, Sp[k], V);
                        b = (port - a * Sp[k] - c * V) / beta;
                        break;
                    }
                    case StrategyKind::stock_power_jumpbond: {
                        const double V = std::pow(Sp[k], delta);
                        const double z = Zp ? Zp[k] : 1.0;
                        const double psi = strategy.jump.psi;
                        const double Ypsix = pricing.value(
                            std::min(std::max(Sp[k] * (1.0 + z * (psi - 1.0)), pricing.x_lo),
                                     pricing.x_hi),
                            0.0, t);
                        const double jumpY = Ypsix - Y;
                        // jump-bond units from the displayed hedge formula
                        // (derivative-in-z term is zero for a price-only surface)
                        mh = jumpY / ((psi - 1.0) * Mp[k]) -
                             (1.0 / delta) * dx * Sp[k] * std::pow(z, delta) *
                                 (std::pow(psi, delta) - 1.0) / ((psi - 1.0) * Mp[k]);
                        // remaining two holdings: match diffusion and jump exposure
                        const double dSj = Sp[k] * z * (psi - 1.0);
                        const double dVj =
                            V * (std::pow(1.0 + z * (psi - 1.0), delta) - 1.0);
                        const double dMj = Mp[k] * (psi - 1.0);
                        // c1 + c2 delta S^{delta-1} = dx ; c1 dSj + c2 dVj = jumpY - mh dMj
                        const double a11 = 1.0, a12 = delta * std::pow(Sp[k], delta - 1.0);
                        const double a21 = dSj, a22 = dVj;
                        const double r1 = dx, r2 = jumpY - mh * dMj;
                        const double det = a11 * a22 - a12 * a21;
                        if (std::abs(det) < 1e-14)
                            throw std::runtime_error("backtest_hedge: singular jump hedge system");
                        a = (r1 * a22 - a12 * r2) / det;
                        c = (a11 * r2 - r1 * a21) / det;
                        b = (port - a * Sp[k] - c * V - mh * Mp[k]) / beta;
                        break;
                    }
                    case StrategyKind::sv_stock_bond_volindex: {
                        a = dx;
                        c = pricing.delta_y(Sp[k], y_here, t);
                        b = (port - a * Sp[k] - c * Vp[k]) / beta;
                        break;
                    }
                }
            }
            // roll forward at realized returns
            const double beta_next = std::exp(r * (t + dt - grid.t0));
            switch (strategy.kind) {
                case StrategyKind::stock_bond:
                    port += a * (Sp[k + 1] - Sp[k]) + b * (beta_next - beta);
                    break;
                case StrategyKind::stock_power:
                    port += a * (Sp[k + 1] - Sp[k]) +
                            b * (std::pow(Sp[k + 1], delta) - std::pow(Sp[k], delta));
                    break;
                case StrategyKind::stock_bond_power_friction: {
                    // executed returns carry the friction-scaled dynamics,
                    // driven by the realized Brownian increment
                    double zshock = 0.0;
                    if (sig > 0.0)
                        zshock = (std::log(Sp[k + 1] / Sp[k]) - (mu - 0.5 * sig * sig) * dt) /
                                 (sig * std::sqrt(dt));
                    const double rs =
                        std::exp((mu * (1.0 - eps) - 0.5 * sig * sig * (1.0 + eps) * (1.0 + eps)) * dt +
                                 sig * (1.0 + eps) * std::sqrt(dt) * zshock) - 1.0;
                    const double rv =
                        std::exp((muV * (1.0 - eps) - 0.5 * sigV * sigV * (1.0 + eps) * (1.0 + eps)) * dt +
                                 sigV * (1.0 + eps) * std::sqrt(dt) * zshock) - 1.0;
                    const double V = std::pow(Sp[k], delta);
                    port += a * Sp[k] * rs + c * V * rv + b * (beta_next - beta);
                    break;
                }
                case StrategyKind::stock_power_jumpbond: {
                    const double V0 = std::pow(Sp[k], delta);
                    const double V1 = std::pow(Sp[k + 1], delta);
                    port += a * (Sp[k + 1] - Sp[k]) + c * (V1 - V0) +
                            mh * (Mp[k + 1] - Mp[k]) + b * (beta_next - beta);
                    break;
                }
                case StrategyKind::sv_stock_bond_volindex:
                    port += a * (Sp[k + 1] - Sp[k]) + c * (Vp[k + 1] - Vp[k]) +
                            b * (beta_next - beta);
                    break;
            }
            if (p == 0) {
                if (k == 0) report.port_trace0.push_back(
                    pricing.value(Sp[0], Vp ? Vp[0] : 0.0, grid.t0));
                report.port_trace0.push_back(port);
            }
        }
        report.terminal_errors[p] = payoff(Sp[nn - 1]) - port;
    }

    double sum = 0.0, sumsq = 0.0, mx = 0.0;
    for (double e : report.terminal_errors) {
        sum += e;
        sumsq += e * e;
        mx = std::max(mx, std::abs(e));
    }
    const double n = static_cast<double>(n_paths);
    report.mean = sum / n;
    report.rms = std::sqrt(sumsq / n);
    report.max_abs = mx;
    std::vector<double> sorted = report.terminal_errors;
    std::sort(sorted.begin(), sorted.end());
    report.q05 = detail::quantile_sorted(sorted, 0.05);
    report.q25 = detail::quantile_sorted(sorted, 0.25);
    report.q50 = detail::quantile_sorted(sorted, 0.50);
    report.q75 = detail::quantile_sorted(sorted, 0.75);
    report.q95 = detail::quantile_sorted(sorted, 0.95);
    return report;
}

}  // namespace hedgelab
