#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hedgelab/market.hpp"
#include "hedgelab/parallel.hpp"
#include "hedgelab/paths.hpp"
#include "hedgelab/rng.hpp"

namespace hedgelab {

// Map from the volatility state to the stock volatility. The model papers
// over sigma(.) so the common choices are presets; anything else goes through
// `custom`.
struct SigmaSpec {
    enum class Kind { exp_y, abs_y, sqrtplus_y, custom };
    Kind kind = Kind::exp_y;
    std::function<double(double)> fn;

    static SigmaSpec exp_y() { return {Kind::exp_y, {}}; }
    static SigmaSpec abs_y() { return {Kind::abs_y, {}}; }
    static SigmaSpec sqrtplus_y() { return {Kind::sqrtplus_y, {}}; }
    static SigmaSpec custom(std::function<double(double)> f) {
        return {Kind::custom, std::move(f)};
    }

    double operator()(double y) const {
        switch (kind) {
            case Kind::exp_y: return std::exp(y);
            case Kind::abs_y: return std::abs(y);
            case Kind::sqrtplus_y: return std::sqrt(std::max(y, 0.0));
            case Kind::custom: return fn(y);
        }
        throw std::logic_error("SigmaSpec: unknown kind");
    }
};

// Mean-reverting Ornstein-Uhlenbeck volatility state with correlated stock
// driver.
struct SvParams {
    double alpha = 1.0;   // mean reversion, > 0
    double m = 0.0;       // long-run level
    double phi = 0.0;     // vol of the state, >= 0
    double rho = 0.0;     // corr(stock, state), |rho| < 1
    SigmaSpec sigma_fn = SigmaSpec::exp_y();

    void validate() const {
        if (!(alpha > 0.0)) throw std::invalid_argument("SvParams: alpha must be > 0");
        if (phi < 0.0) throw std::invalid_argument("SvParams: phi must be >= 0");
        if (!(rho > -1.0 && rho < 1.0))
            throw std::invalid_argument("SvParams: rho must be in (-1,1)");
    }
};

// Stochastic-volatility paths. The state V is stepped by its exact Gaussian
// transition (OU under P; linear r*V-drift dynamics once the index trades
// under Q), the stock by a lognormal step with sigma(V) frozen over the step.
// Channels S and V.
inline PathSet simulate_sv(const SvParams& params, double mu, double S0, double V0,
                           const TimeGrid& grid, std::size_t n_paths, SeedSpec seed,
                           Measure measure, double r = 0.0, std::uint64_t path_begin = 0) {
    params.validate();
    grid.validate();
    if (!(S0 > 0.0)) throw std::invalid_argument("simulate_sv: S0 must be > 0");
    const double dt = grid.dt();
    const double sqdt = std::sqrt(dt);
    // exact transition of the state over dt
    double v_decay, v_shift_coef, v_noise;
    if (measure == Measure::P) {
        v_decay = std::exp(-params.alpha * dt);
        v_shift_coef = params.m * (1.0 - v_decay);
        v_noise = params.phi * std::sqrt((1.0 - v_decay * v_decay) / (2.0 * params.alpha));
    } else {
        v_decay = std::exp(r * dt);
        v_shift_coef = 0.0;
        v_noise = (r != 0.0)
                      ? params.phi * std::sqrt((v_decay * v_decay - 1.0) / (2.0 * r))
                      : params.phi * sqdt;
    }
    const double stock_drift = (measure == Measure::P) ? mu : r;
    const double rho_perp = std::sqrt(1.0 - params.rho * params.rho);

    PathSet out(grid, n_paths, seed, path_begin);
    auto& S = out.add_channel("S");
    auto& V = out.add_channel("V");
    const std::size_t nn = out.n_nodes();
    parallel_for(n_paths, [&](std::size_t p) {
        const std::uint64_t gp = path_begin + p;
        CounterStream zs(seed, gp, channel::diffusion0);
        CounterStream zv(seed, gp, channel::diffusion1);
        double s = S0, v = V0;
        S[p * nn] = s;
        V[p * nn] = v;
        for (std::size_t k = 1; k < nn; ++k) {
            const double g1 = zs.next_normal();
            const double g2 = params.rho * g1 + rho_perp * zv.next_normal();
            const double sig = params.sigma_fn(v);
            s *= std::exp((stock_drift - 0.5 * sig * sig) * dt + sig * sqdt * g1);
            v = v * v_decay + v_shift_coef + v_noise * g2;
            S[p * nn + k] = s;
            V[p * nn + k] = v;
        }
    });
    return out;
}

struct SvHedgeWeights {
    double stock_units = 0.0;
    double bond_units = 0.0;
    double vol_index_units = 0.0;
};

// Complete-market hedge with the traded volatility index:
// a = dY/dx, c = dY/dy, b the bond residual, so a S + b beta + c V = Y exactly.
inline SvHedgeWeights sv_hedge_weights(double Y, double dY_dx, double dY_dy, double S, double V,
                                       double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("sv_hedge_weights: beta must be > 0");
    SvHedgeWeights w;
    w.stock_units = dY_dx;
    w.vol_index_units = dY_dy;
    w.bond_units = (Y - dY_dx * S - dY_dy * V) / beta;
    return w;
}

// Premium inputs for the CCAPM-flavored drift packs; constants here, supplied
// as estimated/external quantities.
struct PremiumSpec {
    double eta = 0.0;           // own drift of the vol index
    double beta_v_mvol = 0.0;   // loading on the vol-market premium
    double beta_v_m = 0.0;      // loading on the market premium
    double theta_m = 0.0;       // market risk premium
    double theta_v = 0.0;       // volatility risk premium
};

// Volatility-of-volatility model: three correlated Ito legs with pluggable
// coefficient functions of (S, V, v, t).
struct VovParams {
    using StateFn = std::function<double(double S, double V, double v, double t)>;

    StateFn mu_fn;     // stock drift rate
    StateFn alpha_fn;  // drift of V
    StateFn b_fn;      // drift of v
    StateFn psi_fn;    // vol of v
    std::function<double(double)> phi_fn;  // vol of V as a function of v
    SigmaSpec sigma_fn = SigmaSpec::exp_y();
    double rho_V = 0.0;   // corr(stock, V driver)
    double rho_v = 0.0;   // corr(stock, v driver)
    double varrho = 0.0;  // corr(V driver, v driver)

    // OU-style defaults: constant stock drift, alpha (m - V) reversion,
    // driftless v with constant vol psi and constant phi.
    static VovParams make_default(double mu, double alpha, double m, double phi, double psi) {
        VovParams p;
        p.mu_fn = [mu](double, double, double, double) { return mu; };
        p.alpha_fn = [alpha, m](double, double V, double, double) { return alpha * (m - V); };
        p.b_fn = [](double, double, double, double) { return 0.0; };
        p.psi_fn = [psi](double, double, double, double) { return psi; };
        p.phi_fn = [phi](double) { return phi; };
        return p;
    }

    void validate() const {
        if (!mu_fn || !alpha_fn || !b_fn || !psi_fn || !phi_fn)
            throw std::invalid_argument("VovParams: coefficient function missing");
        for (double c : {rho_V, rho_v, varrho})
            if (!(c > -1.0 && c < 1.0))
                throw std::invalid_argument("VovParams: correlations must be in (-1,1)");
        cholesky();  // throws if the correlation matrix is not PSD
    }

    // Lower-triangular factor of the (B, B_V, B_v) correlation matrix.
    struct Chol {
        double l21, l22, l31, l32, l33;
    };
    Chol cholesky() const {
        Chol c{};
        c.l21 = rho_V;
        const double d22 = 1.0 - rho_V * rho_V;
        if (d22 <= 0.0) throw std::invalid_argument("VovParams: correlation matrix not PSD");
        c.l22 = std::sqrt(d22);
        c.l31 = rho_v;
        c.l32 = (varrho - rho_V * rho_v) / c.l22;
        const double d33 = 1.0 - c.l31 * c.l31 - c.l32 * c.l32;
        if (d33 < -1e-12) throw std::invalid_argument("VovParams: correlation matrix not PSD");
        c.l33 = std::sqrt(std::max(d33, 0.0));
        return c;
    }
};

// Vol-of-vol paths: Euler-Maruyama for V and v (general coefficients),
// lognormal-frozen step for S. Under Q every traded level carries drift
// r * level. Channels S, V, v.
inline PathSet simulate_vov(const VovParams& params, double S0, double V0, double v0,
                            const TimeGrid& grid, std::size_t n_paths, SeedSpec seed,
                            Measure measure, double r = 0.0, std::uint64_t path_begin = 0) {
    params.validate();
    grid.validate();
    if (!(S0 > 0.0)) throw std::invalid_argument("simulate_vov: S0 must be > 0");
    const double dt = grid.dt();
    const double sqdt = std::sqrt(dt);
    const VovParams::Chol ch = params.cholesky();

    PathSet out(grid, n_paths, seed, path_begin);
    auto& S = out.add_channel("S");
    auto& V = out.add_channel("V");
    auto& W = out.add_channel("v");
    const std::size_t nn = out.n_nodes();
    parallel_for(n_paths, [&](std::size_t p) {
        const std::uint64_t gp = path_begin + p;
        CounterStream z0(seed, gp, channel::diffusion0);
        CounterStream z1(seed, gp, channel::diffusion1);
        CounterStream z2(seed, gp, channel::diffusion2);
        double s = S0, v = V0, w = v0;
        S[p * nn] = s; V[p * nn] = v; W[p * nn] = w;
        const double t0 = grid.t0;
        for (std::size_t k = 1; k < nn; ++k) {
            const double t = t0 + dt * (static_cast<double>(k) - 1.0);
            const double g0 = z0.next_normal();
            const double gA = z1.next_normal();
            const double gB = z2.next_normal();
            const double gV = ch.l21 * g0 + ch.l22 * gA;
            const double gv = ch.l31 * g0 + ch.l32 * gA + ch.l33 * gB;

            const double sig = params.sigma_fn(v);
            const double mu_s = (measure == Measure::P) ? params.mu_fn(s, v, w, t) : r;
            const double a_v = (measure == Measure::P) ? params.alpha_fn(s, v, w, t) : r * v;
            const double b_w = (measure == Measure::P) ? params.b_fn(s, v, w, t) : r * w;
            const double phi = params.phi_fn(w);
            const double psi = params.psi_fn(s, v, w, t);

            s *= std::exp((mu_s - 0.5 * sig * sig) * dt + sig * sqdt * g0);
            v += a_v * dt + phi * sqdt * gV;
            w += b_w * dt + psi * sqdt * gv;
            S[p * nn + k] = s;
            V[p * nn + k] = v;
            W[p * nn + k] = w;
        }
    });
    return out;
}

struct McPrice {
    double price = 0.0;
    double std_error = 0.0;
};

// Discounted mean terminal payoff with its standard error. Paths must have
// been simulated under Q; this is the Feynman-Kac stand-in wherever a full
// finite-difference solve is out of reach.
inline McPrice mc_price(const PathSet& paths, const PayoffSpec& payoff, double r) {
    if (paths.n_paths() < 2) throw std::invalid_argument("mc_price: need at least 2 paths");
    const auto& S = paths.channel("S");
    const std::size_t nn = paths.n_nodes();
    const double T = paths.grid().T - paths.grid().t0;
    const double df = std::exp(-r * T);
    const std::size_t n = paths.n_paths();
    double mean = 0.0;
    for (std::size_t p = 0; p < n; ++p) mean += payoff(S[p * nn + nn - 1]);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double e = payoff(S[p * nn + nn - 1]) - mean;
        ss += e * e;
    }
    McPrice out;
    out.price = df * mean;
    out.std_error = df * std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    return out;
}

// Block-wise Monte Carlo price for path counts too large to hold in memory.
// The simulator receives (path_begin, count); the per-path counter streams
// make the result bit-identical to one monolithic run.
inline McPrice mc_price_blocked(
    std::size_t n_paths, std::size_t block_size, const PayoffSpec& payoff, double r, double T,
    const std::function<PathSet(std::uint64_t path_begin, std::size_t count)>& simulate) {
    if (n_paths < 2) throw std::invalid_argument("mc_price_blocked: need at least 2 paths");
    const double df = std::exp(-r * T);
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t begin = 0; begin < n_paths; begin += block_size) {
        const std::size_t count = static_cast<std::size_t>(
            std::min<std::uint64_t>(block_size, n_paths - begin));
        const PathSet block = simulate(begin, count);
        const auto& S = block.channel("S");
        const std::size_t nn = block.n_nodes();
        for (std::size_t p = 0; p < count; ++p) {
            const double g = payoff(S[p * nn + nn - 1]);
            sum += g;
            sumsq += g * g;
        }
    }
    const double n = static_cast<double>(n_paths);
    const double mean = sum / n;
    const double var = (sumsq - n * mean * mean) / (n - 1.0);
    McPrice out;
    out.price = df * mean;
    out.std_error = df * std::sqrt(std::max(var, 0.0) / n);
    return out;
}

}  // namespace hedgelab
