#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hedgelab {

enum class Measure { P, Q };

// Drift/volatility/rate bundle, all annualized.
struct MarketParams {
    double mu = 0.0;
    double sigma = 0.0;  // > 0
    double r = 0.0;      // >= 0

    MarketParams() = default;
    MarketParams(double mu_, double sigma_, double r_) : mu(mu_), sigma(sigma_), r(r_) {
        validate();
    }
    void validate() const {
        if (!(sigma > 0.0)) throw std::invalid_argument("MarketParams: sigma must be > 0");
        if (r < 0.0) throw std::invalid_argument("MarketParams: r must be >= 0");
    }
};

struct TimeGrid {
    double t0 = 0.0;
    double T = 0.0;
    int n_steps = 0;

    TimeGrid() = default;
    TimeGrid(double t0_, double T_, int n_steps_) : t0(t0_), T(T_), n_steps(n_steps_) {
        validate();
    }
    void validate() const {
        if (!(T > t0)) throw std::invalid_argument("TimeGrid: T must exceed t0");
        if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
    }
    double dt() const { return (T - t0) / n_steps; }
    double node(int i) const { return t0 + dt() * i; }
    int n_nodes() const { return n_steps + 1; }
};

enum class PayoffKind { call, put, custom };

// Terminal payoff g(S_T). Custom payoffs are tabulated and evaluated with
// linear interpolation (linear extension outside the table).
struct PayoffSpec {
    PayoffKind kind = PayoffKind::call;
    double strike = 0.0;
    std::vector<double> xs;  // custom abscissae, strictly increasing
    std::vector<double> gs;

    static PayoffSpec call_option(double strike) {
        PayoffSpec p;
        p.kind = PayoffKind::call;
        p.strike = strike;
        p.validate();
        return p;
    }
    static PayoffSpec put_option(double strike) {
        PayoffSpec p;
        p.kind = PayoffKind::put;
        p.strike = strike;
        p.validate();
        return p;
    }
    static PayoffSpec custom_table(std::vector<double> xs, std::vector<double> gs) {
        PayoffSpec p;
        p.kind = PayoffKind::custom;
        p.xs = std::move(xs);
        p.gs = std::move(gs);
        p.validate();
        return p;
    }

    void validate() const {
        if (kind == PayoffKind::custom) {
            if (xs.size() < 2 || xs.size() != gs.size())
                throw std::invalid_argument("PayoffSpec: custom table needs >=2 matching nodes");
            for (std::size_t i = 1; i < xs.size(); ++i)
                if (!(xs[i] > xs[i - 1]))
                    throw std::invalid_argument("PayoffSpec: custom abscissae not increasing");
        } else if (!(strike > 0.0)) {
            throw std::invalid_argument("PayoffSpec: strike must be > 0");
        }
    }

    double operator()(double x) const {
        switch (kind) {
            case PayoffKind::call: return std::max(x - strike, 0.0);
            case PayoffKind::put: return std::max(strike - x, 0.0);
            case PayoffKind::custom: {
                if (x <= xs.front()) {
                    const double s = (gs[1] - gs[0]) / (xs[1] - xs[0]);
                    return gs.front() + s * (x - xs.front());
                }
                if (x >= xs.back()) {
                    const std::size_t n = xs.size();
                    const double s = (gs[n - 1] - gs[n - 2]) / (xs[n - 1] - xs[n - 2]);
                    return gs.back() + s * (x - xs.back());
                }
                const auto it = std::upper_bound(xs.begin(), xs.end(), x);
                const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
                const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
                return gs[i] + w * (gs[i + 1] - gs[i]);
            }
        }
        throw std::logic_error("PayoffSpec: unknown kind");
    }
};

// Multi-asset market with constant coefficients; row i of `sigma` holds the
// loadings of asset i on the d Brownian drivers.
struct MultiAssetParams {
    std::vector<double> mu;
    std::vector<std::vector<double>> sigma;
    double r = 0.0;

    int dimension() const { return static_cast<int>(mu.size()); }
    void validate() const {
        const std::size_t d = mu.size();
        if (d == 0 || sigma.size() != d)
            throw std::invalid_argument("MultiAssetParams: dimension mismatch");
        for (const auto& row : sigma) {
            if (row.size() != d)
                throw std::invalid_argument("MultiAssetParams: sigma must be d x d");
            double norm2 = 0.0;
            for (double s : row) norm2 += s * s;
            if (!(norm2 > 0.0))
                throw std::invalid_argument("MultiAssetParams: zero volatility row");
        }
        if (r < 0.0) throw std::invalid_argument("MultiAssetParams: r must be >= 0");
    }
};

}  // namespace hedgelab
