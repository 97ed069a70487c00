#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hedgelab/market.hpp"
#include "hedgelab/paths.hpp"

namespace hedgelab {

// Bond exponent that makes the discounted price S^zeta * beta^gamma a
// Q-martingale, i.e. makes the power contract tradable.
inline double gamma_exponent(double zeta, const MarketParams& params) {
    params.validate();
    if (params.r == 0.0) throw std::invalid_argument("gamma undefined at zero rate");
    return (1.0 - zeta) / params.r * (params.r + 0.5 * zeta * params.sigma * params.sigma);
}

// The bond-free exponent: gamma_exponent(delta) == 0, so S^delta trades on
// its own.
inline double delta_exponent(const MarketParams& params) {
    params.validate();
    return -2.0 * params.r / (params.sigma * params.sigma);
}

// Multi-asset bond-free exponent for asset i: -2r / sum_j sigma_{ij}^2.
// Reduces to delta_exponent when d == 1.
inline double multi_delta_exponent(int i, const MultiAssetParams& params) {
    params.validate();
    if (i < 0 || i >= params.dimension())
        throw std::invalid_argument("multi_delta_exponent: asset index out of range");
    double norm2 = 0.0;
    for (double s : params.sigma[static_cast<std::size_t>(i)]) norm2 += s * s;
    if (!(norm2 > 0.0))
        throw std::invalid_argument("multi_delta_exponent: zero volatility row");
    return -2.0 * params.r / norm2;
}

// A tradable perpetual power contract: price S_t^zeta * beta_t^gamma. The
// gamma is pinned to the market at construction. `bond_free` marks the
// infinite-order member S^delta (gamma == 0).
struct PowerAsset {
    double zeta = 1.0;
    double gamma = 0.0;
    bool bond_free = false;

    static PowerAsset make(double zeta, const MarketParams& params) {
        PowerAsset a;
        a.zeta = zeta;
        a.gamma = gamma_exponent(zeta, params);
        a.bond_free = std::abs(a.gamma) < 1e-14;
        return a;
    }
    static PowerAsset bond_free_asset(const MarketParams& params) {
        PowerAsset a;
        a.zeta = delta_exponent(params);
        a.gamma = 0.0;
        a.bond_free = true;
        return a;
    }
};

// Ladder index: order 0 is the bond, order 1 the stock, order n >= 2 the
// contract with price S^{-n} beta^{gamma(-n)}, and infinite order is S^delta.
struct BasicAssetOrder {
    int n = 0;
    bool infinite = false;

    static BasicAssetOrder order(int n) {
        if (n < 0) throw std::invalid_argument("BasicAssetOrder: n must be >= 0");
        return BasicAssetOrder{n, false};
    }
    static BasicAssetOrder infinite_order() { return BasicAssetOrder{0, true}; }

    PowerAsset to_power_asset(const MarketParams& params) const {
        if (infinite) return PowerAsset::bond_free_asset(params);
        if (n == 0) return PowerAsset{0.0, 1.0, false};  // the bond: V = beta
        return PowerAsset::make(static_cast<double>(-n), params);
    }
};

// Price trajectory V_t = S_t^zeta * e^{r gamma (t - t0)} along simulated stock
// paths. Adds channel "V".
inline PathSet power_asset_path(const PowerAsset& asset, const PathSet& stock_paths, double r) {
    const auto& S = stock_paths.channel("S");
    PathSet out(stock_paths.grid(), stock_paths.n_paths(), stock_paths.seed(),
                stock_paths.path_begin());
    auto& V = out.add_channel("V");
    const std::size_t nn = out.n_nodes();
    const TimeGrid& g = stock_paths.grid();
    std::vector<double> bond_factor(nn);
    for (std::size_t k = 0; k < nn; ++k)
        bond_factor[k] = std::exp(r * asset.gamma * (g.node(static_cast<int>(k)) - g.t0));
    for (std::size_t p = 0; p < stock_paths.n_paths(); ++p) {
        for (std::size_t k = 0; k < nn; ++k) {
            const double s = S[p * nn + k];
            if (!(s > 0.0))
                throw std::invalid_argument("power_asset_path: nonpositive stock value");
            V[p * nn + k] = std::pow(s, asset.zeta) * bond_factor[k];
        }
    }
    return out;
}

inline PathSet power_asset_path(const BasicAssetOrder& order, const PathSet& stock_paths,
                                double r, const MarketParams& params) {
    return power_asset_path(order.to_power_asset(params), stock_paths, r);
}

// Static replication of V^{(zeta)} with the stock and bond: a shares plus b
// bond units reproduce the contract value exactly at every instant.
struct ReplicationWeights {
    double stock_units = 0.0;
    double bond_units = 0.0;
};

inline ReplicationWeights replication_weights(double zeta, double S, double beta,
                                              const MarketParams& params) {
    if (!(S > 0.0)) throw std::invalid_argument("replication_weights: S must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("replication_weights: beta must be > 0");
    const double gamma = gamma_exponent(zeta, params);
    const double V = std::pow(S, zeta) * std::pow(beta, gamma);
    const double a = zeta * std::pow(S, zeta - 1.0) * std::pow(beta, gamma);
    return {a, (V - a * S) / beta};
}

// Step exponent of the alternative traded contract V^{(*)} built from the
// last two lattice prices.
inline double crr_vstar_exponent(double S_k, double S_km1, double r, double dt) {
    if (S_k == S_km1) throw std::invalid_argument("exponent undefined on flat step");
    return -r * S_k * dt / (S_k - S_km1);
}

struct MartingaleStat {
    double mean_excess = 0.0;  // mean of V_T/beta_T - V_0
    double std_error = 0.0;
    double z_score = 0.0;
};

// Monte Carlo martingale check: discounted terminal value against the initial
// value. Paths must have been simulated under Q. |z| <= 3 is the pass line
// used by the tests.
inline MartingaleStat martingale_statistic(const PathSet& asset_paths,
                                           const std::string& channel_name, double r) {
    if (asset_paths.n_paths() < 2)
        throw std::invalid_argument("martingale_statistic: need at least 2 paths");
    const auto& V = asset_paths.channel(channel_name);
    const std::size_t nn = asset_paths.n_nodes();
    const double T = asset_paths.grid().T - asset_paths.grid().t0;
    const double df = std::exp(-r * T);
    const std::size_t n = asset_paths.n_paths();

    double mean = 0.0;
    for (std::size_t p = 0; p < n; ++p)
        mean += V[p * nn + nn - 1] * df - V[p * nn];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double e = V[p * nn + nn - 1] * df - V[p * nn];
        ss += (e - mean) * (e - mean);
    }
    const double se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    MartingaleStat stat;
    stat.mean_excess = mean;
    stat.std_error = se;
    stat.z_score = (se > 0.0) ? mean / se : 0.0;
    return stat;
}

inline MartingaleStat martingale_statistic(const PathSet& asset_paths, double r) {
    return martingale_statistic(asset_paths, asset_paths.has_channel("V") ? "V" : "S", r);
}

}  // namespace hedgelab
