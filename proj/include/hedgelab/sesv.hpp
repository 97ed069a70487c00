#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hedgelab/market.hpp"
#include "hedgelab/parallel.hpp"
#include "hedgelab/paths.hpp"
#include "hedgelab/rng.hpp"
#include "hedgelab/stochvol.hpp"

namespace hedgelab {

// Self-exciting intensity: decays toward lambda_inf at rate alpha_l and jumps
// by beta_l at each own arrival. Stationary iff alpha_l > beta_l, with
// long-run mean alpha_l*lambda_inf/(alpha_l - beta_l).
struct HawkesParams {
    double alpha_l = 1.0;
    double lambda_inf = 1.0;
    double beta_l = 0.0;
    double lambda_0 = 1.0;

    void validate() const {
        if (!(alpha_l > beta_l) || beta_l < 0.0)
            throw std::invalid_argument("HawkesParams: need alpha_l > beta_l >= 0");
        if (!(lambda_inf > 0.0)) throw std::invalid_argument("HawkesParams: lambda_inf must be > 0");
        if (!(lambda_0 > 0.0)) throw std::invalid_argument("HawkesParams: lambda_0 must be > 0");
    }
    double stationary_mean_intensity() const {
        return alpha_l * lambda_inf / (alpha_l - beta_l);
    }
};

namespace detail {

// Ogata thinning with the exact inter-event intensity decay. Appends arrival
// times in (t_begin, t_end]; `lam` is the intensity value at t_begin and is
// left at its t_end value.
inline void hawkes_thin_interval(const HawkesParams& hp, double t_begin, double t_end,
                                 double& lam, CounterStream& u, std::vector<double>* arrivals) {
    double t = t_begin;
    while (true) {
        const double bound = std::max(lam, hp.lambda_inf);
        const double e = -std::log(u.next_uniform()) / bound;
        const double t_next = t + e;
        if (t_next > t_end) {
            lam = hp.lambda_inf + (lam - hp.lambda_inf) * std::exp(-hp.alpha_l * (t_end - t));
            return;
        }
        const double lam_at = hp.lambda_inf + (lam - hp.lambda_inf) *
                                                  std::exp(-hp.alpha_l * (t_next - t));
        t = t_next;
        lam = lam_at;
        if (u.next_uniform() * bound <= lam_at) {
            lam += hp.beta_l;
            if (arrivals) arrivals->push_back(t);
        }
    }
}

}  // namespace detail

// Hawkes counting process on a grid: channels N (cumulative count at the
// node) and lambda (intensity at the node).
inline PathSet simulate_hawkes(const HawkesParams& params, const TimeGrid& grid,
                               std::size_t n_paths, SeedSpec seed,
                               std::uint64_t path_begin = 0) {
    params.validate();
    grid.validate();
    PathSet out(grid, n_paths, seed, path_begin);
    auto& N = out.add_channel("N");
    auto& L = out.add_channel("lambda");
    const std::size_t nn = out.n_nodes();
    parallel_for(n_paths, [&](std::size_t p) {
        CounterStream u(seed, path_begin + p, channel::hawkes_s);
        double lam = params.lambda_0;
        long count = 0;
        N[p * nn] = 0.0;
        L[p * nn] = lam;
        std::vector<double> arrivals;
        for (std::size_t k = 1; k < nn; ++k) {
            arrivals.clear();
            detail::hawkes_thin_interval(params, grid.node(static_cast<int>(k) - 1),
                                         grid.node(static_cast<int>(k)), lam, u, &arrivals);
            count += static_cast<long>(arrivals.size());
            N[p * nn + k] = static_cast<double>(count);
            L[p * nn + k] = lam;
        }
    });
    return out;
}

// Jump-size laws for the additive jump legs: two-point (value w.p. p, else 0)
// or Gaussian.
struct JumpSizeLaw {
    enum class Kind { two_point, gaussian };
    Kind kind = Kind::two_point;
    double value = 0.0;  // two-point jump amount | gaussian mean
    double p = 1.0;      // two-point probability
    double sd = 0.0;     // gaussian standard deviation

    static JumpSizeLaw two_point(double value, double p) {
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("JumpSizeLaw: p must be in (0,1]");
        return {Kind::two_point, value, p, 0.0};
    }
    static JumpSizeLaw gaussian(double mean, double sd) {
        if (sd < 0.0) throw std::invalid_argument("JumpSizeLaw: sd must be >= 0");
        return {Kind::gaussian, mean, 1.0, sd};
    }
    static JumpSizeLaw none() { return {Kind::two_point, 0.0, 1.0, 0.0}; }

    double mean() const {
        return kind == Kind::two_point ? value * p : value;
    }
    double sample(CounterStream& u) const {
        if (kind == Kind::two_point) return (u.next_uniform() < p) ? value : 0.0;
        return value + sd * u.next_normal();
    }
};

// Full self-exciting stochastic volatility-of-volatility model: the diffusive
// legs of VovParams plus additive jumps on S and V arriving at two
// self-exciting intensities.
struct SesvParams {
    VovParams vov;
    HawkesParams hawkes_s;
    HawkesParams hawkes_v;
    JumpSizeLaw jump_size_s = JumpSizeLaw::none();
    JumpSizeLaw jump_size_v = JumpSizeLaw::none();

    void validate() const {
        vov.validate();
        hawkes_s.validate();
        hawkes_v.validate();
    }
};

// Channels: S, V, v, lambda_S, lambda_V, N_S, N_V plus the per-step additive
// jump sums JS and JV (index k holds the total jump applied between nodes
// k-1 and k), which the jump securities re-use mark-for-mark.
inline PathSet simulate_sesv(const SesvParams& params, double S0, double V0, double v0,
                             const TimeGrid& grid, std::size_t n_paths, SeedSpec seed,
                             std::uint64_t path_begin = 0) {
    params.validate();
    grid.validate();
    if (!(S0 > 0.0)) throw std::invalid_argument("simulate_sesv: S0 must be > 0");
    const double dt = grid.dt();
    const double sqdt = std::sqrt(dt);
    const VovParams::Chol ch = params.vov.cholesky();

    PathSet out(grid, n_paths, seed, path_begin);
    auto& S = out.add_channel("S");
    auto& V = out.add_channel("V");
    auto& W = out.add_channel("v");
    auto& LS = out.add_channel("lambda_S");
    auto& LV = out.add_channel("lambda_V");
    auto& NS = out.add_channel("N_S");
    auto& NV = out.add_channel("N_V");
    auto& JS = out.add_channel("JS");
    auto& JV = out.add_channel("JV");
    const std::size_t nn = out.n_nodes();
    parallel_for(n_paths, [&](std::size_t p) {
        const std::uint64_t gp = path_begin + p;
        CounterStream z0(seed, gp, channel::diffusion0);
        CounterStream z1(seed, gp, channel::diffusion1);
        CounterStream z2(seed, gp, channel::diffusion2);
        CounterStream us(seed, gp, channel::hawkes_s);
        CounterStream uv(seed, gp, channel::hawkes_v);
        CounterStream zs(seed, gp, channel::jump_size_s);
        CounterStream zv(seed, gp, channel::jump_size_v);

        double s = S0, v = V0, w = v0;
        double lam_s = params.hawkes_s.lambda_0, lam_v = params.hawkes_v.lambda_0;
        long ns = 0, nv = 0;
        S[p * nn] = s; V[p * nn] = v; W[p * nn] = w;
        LS[p * nn] = lam_s; LV[p * nn] = lam_v;
        NS[p * nn] = 0.0; NV[p * nn] = 0.0;
        JS[p * nn] = 0.0; JV[p * nn] = 0.0;
        std::vector<double> arr_s, arr_v;
        for (std::size_t k = 1; k < nn; ++k) {
            const double t = grid.node(static_cast<int>(k) - 1);
            const double g0 = z0.next_normal();
            const double gA = z1.next_normal();
            const double gB = z2.next_normal();
            const double gV = ch.l21 * g0 + ch.l22 * gA;
            const double gv = ch.l31 * g0 + ch.l32 * gA + ch.l33 * gB;

            const double sig = params.vov.sigma_fn(v);
            const double mu_s = params.vov.mu_fn(s, v, w, t);
            const double a_v = params.vov.alpha_fn(s, v, w, t);
            const double b_w = params.vov.b_fn(s, v, w, t);
            const double phi = params.vov.phi_fn(w);
            const double psi = params.vov.psi_fn(s, v, w, t);

            s *= std::exp((mu_s - 0.5 * sig * sig) * dt + sig * sqdt * g0);
            v += a_v * dt + phi * sqdt * gV;
            w += b_w * dt + psi * sqdt * gv;

            arr_s.clear();
            arr_v.clear();
            detail::hawkes_thin_interval(params.hawkes_s, t, t + dt, lam_s, us, &arr_s);
            detail::hawkes_thin_interval(params.hawkes_v, t, t + dt, lam_v, uv, &arr_v);
            double jump_s = 0.0, jump_v = 0.0;
            for (std::size_t a = 0; a < arr_s.size(); ++a) jump_s += params.jump_size_s.sample(zs);
            for (std::size_t a = 0; a < arr_v.size(); ++a) jump_v += params.jump_size_v.sample(zv);
            s += jump_s;
            v += jump_v;
            ns += static_cast<long>(arr_s.size());
            nv += static_cast<long>(arr_v.size());

            S[p * nn + k] = s;
            V[p * nn + k] = v;
            W[p * nn + k] = w;
            LS[p * nn + k] = lam_s;
            LV[p * nn + k] = lam_v;
            NS[p * nn + k] = static_cast<double>(ns);
            NV[p * nn + k] = static_cast<double>(nv);
            JS[p * nn + k] = jump_s;
            JV[p * nn + k] = jump_v;
        }
    });
    return out;
}

enum class JumpChannel { stock, vol };

// Additive jump security M_t = M0 + m t + sum of the channel's jump marks up
// to t. Contrast with the multiplicative jump bond of jumpdiff.hpp: these
// legs add their marks.
inline PathSet jump_security_paths(JumpChannel which, double m, const PathSet& paths,
                                   double M0 = 0.0) {
    const std::string chan = (which == JumpChannel::stock) ? "JS" : "JV";
    if (!paths.has_channel(chan))
        throw std::invalid_argument("jump_security_paths: paths carry no channel " + chan);
    const auto& J = paths.channel(chan);
    const double dt = paths.grid().dt();
    PathSet out(paths.grid(), paths.n_paths(), paths.seed(), paths.path_begin());
    auto& M = out.add_channel("M");
    const std::size_t nn = out.n_nodes();
    for (std::size_t p = 0; p < paths.n_paths(); ++p) {
        double val = M0;
        M[p * nn] = val;
        for (std::size_t k = 1; k < nn; ++k) {
            val += m * dt + J[p * nn + k];
            M[p * nn + k] = val;
        }
    }
    return out;
}

}  // namespace hedgelab
