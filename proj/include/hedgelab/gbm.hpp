#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hedgelab/market.hpp"
#include "hedgelab/parallel.hpp"
#include "hedgelab/paths.hpp"
#include "hedgelab/rng.hpp"

namespace hedgelab {

// Riskless bond level e^{r (t - t0)} on the grid nodes, normalized to 1 at t0.
inline std::vector<double> bond_path(double r, const TimeGrid& grid) {
    std::vector<double> beta(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) beta[i] = std::exp(r * (grid.node(i) - grid.t0));
    return beta;
}

// Geometric Brownian motion with exact lognormal stepping; no discretization
// bias enters the martingale tests. Channel "S".
inline PathSet simulate_gbm(const MarketParams& params, double S0, const TimeGrid& grid,
                            std::size_t n_paths, SeedSpec seed, Measure measure,
                            std::uint64_t path_begin = 0) {
    params.validate();
    grid.validate();
    if (!(S0 > 0.0)) throw std::invalid_argument("simulate_gbm: S0 must be > 0");
    const double drift = (measure == Measure::P) ? params.mu : params.r;
    const double dt = grid.dt();
    const double step_drift = (drift - 0.5 * params.sigma * params.sigma) * dt;
    const double step_vol = params.sigma * std::sqrt(dt);

    PathSet out(grid, n_paths, seed, path_begin);
    auto& S = out.add_channel("S");
    const std::size_t nn = out.n_nodes();
    parallel_for(n_paths, [&](std::size_t p) {
        CounterStream z(seed, path_begin + p, channel::diffusion0);
        double s = S0;
        S[p * nn] = s;
        for (std::size_t k = 1; k < nn; ++k) {
            s *= std::exp(step_drift + step_vol * z.next_normal());
            S[p * nn + k] = s;
        }
    });
    return out;
}

}  // namespace hedgelab
