#pragma once

#include <cmath>
#include <stdexcept>

#include "hedgelab/friction.hpp"
#include "hedgelab/jumpdiff.hpp"
#include "hedgelab/market.hpp"
#include "hedgelab/pde1d.hpp"
#include "hedgelab/pde2d.hpp"
#include "hedgelab/stochvol.hpp"

// Coefficient packs: every pricing equation in the library compiles into the
// 1D normal form of pde1d.hpp or the 2D form of pde2d.hpp, so one tested
// kernel serves all of them.

namespace hedgelab {

struct Grid1dSpec {
    double x_min = 0.0, x_max = 0.0;
    int n_x = 0, n_t = 0;

    // Strike-centered log-symmetric domain, `width` e-folds on each side.
    static Grid1dSpec around(double center, int n_x, int n_t, double width = 2.0) {
        Grid1dSpec g;
        g.x_min = center * std::exp(-width);
        g.x_max = center * std::exp(width);
        g.n_x = n_x;
        g.n_t = n_t;
        return g;
    }
};

struct Grid2dSpec {
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;
    int n_x = 0, n_y = 0, n_t = 0;
};

// --- frictionless diffusion pricing equation ------------------------------

inline PdeProblem1D bsm_problem(const MarketParams& params, const PayoffSpec& payoff, double T,
                                const Grid1dSpec& grid) {
    params.validate();
    PdeProblem1D pb;
    const double r = params.r, s2 = params.sigma * params.sigma;
    pb.drift = [r](double, double) { return r; };
    pb.discount = [r](double, double) { return r; };
    pb.diffusion = [s2](double, double) { return s2; };
    pb.terminal = payoff;
    pb.x_min = grid.x_min; pb.x_max = grid.x_max;
    pb.n_x = grid.n_x; pb.n_t = grid.n_t;
    pb.maturity = T;
    return pb;
}

// State-dependent coefficients r(x,t), sigma(x,t); same equation shape.
inline PdeProblem1D bsm_state_dependent_problem(CoefFn r_fn, CoefFn sigma_fn,
                                                const PayoffSpec& payoff, double T,
                                                const Grid1dSpec& grid) {
    PdeProblem1D pb;
    pb.drift = r_fn;
    pb.discount = r_fn;
    pb.diffusion = [sigma_fn](double x, double t) {
        const double s = sigma_fn(x, t);
        return s * s;
    };
    pb.terminal = payoff;
    pb.x_min = grid.x_min; pb.x_max = grid.x_max;
    pb.n_x = grid.n_x; pb.n_t = grid.n_t;
    pb.maturity = T;
    return pb;
}

// --- friction-cost pricing equation ----------------------------------------

enum class FrictionGammaMode { corrected_minimizer, paper_literal };

// Drift rate r + Gamma(eps). The corrected mode uses the exact quadratic
// minimizer (Gamma constant in x, zero at eps = 0); the literal mode keeps
// the displayed x-dependent rate for comparison.
inline PdeProblem1D friction_problem(const MarketParams& params, const FrictionParams& friction,
                                     const PayoffSpec& payoff, double T, const Grid1dSpec& grid,
                                     FrictionGammaMode mode = FrictionGammaMode::corrected_minimizer) {
    params.validate();
    friction.validate();
    PdeProblem1D pb = bsm_problem(params, payoff, T, grid);
    if (mode == FrictionGammaMode::corrected_minimizer) {
        const double rate = params.r + friction_gamma_corrected(params, friction);
        pb.drift = [rate](double, double) { return rate; };
    } else {
        pb.drift = [params, friction](double x, double) {
            return params.r + friction_gamma_literal(params, friction, x);
        };
    }
    return pb;
}

// --- dividend-paying stock ---------------------------------------------------

inline PdeProblem1D dividend_problem(const MarketParams& params, double dividend_yield,
                                     const PayoffSpec& payoff, double T, const Grid1dSpec& grid) {
    PdeProblem1D pb = bsm_problem(params, payoff, T, grid);
    const double rate = params.r - dividend_yield;
    pb.drift = [rate](double, double) { return rate; };
    return pb;
}

// --- doping-security equation ------------------------------------------------

// The two-asset equation with the fractional driver has pure y-transport, no
// y-diffusion, and y-independent terminal data, so its solution is
// y-independent and satisfies the plain diffusion equation exactly. The
// transport direction is therefore not discretized.
inline PdeProblem1D fractional_doping_problem(const MarketParams& params,
                                              const PayoffSpec& payoff, double T,
                                              const Grid1dSpec& grid) {
    return bsm_problem(params, payoff, T, grid);
}

// --- jump-diffusion PIDE -----------------------------------------------------

inline PdeProblem1D merton_pide_problem(const JumpParams& jump, double sigma, double r,
                                        const PayoffSpec& payoff, double T,
                                        const Grid1dSpec& grid) {
    jump.validate();
    PdeProblem1D pb;
    const double s2 = sigma * sigma;
    pb.drift = [r](double, double) { return r; };
    pb.discount = [r](double, double) { return r; };
    pb.diffusion = [s2](double, double) { return s2; };
    JumpTerm1D jt;
    const double lam = jump.lambda, comp = -jump.lambda * jump.kappa();
    jt.lambda_coeff = [lam](double, double) { return lam; };
    jt.psi = jump.psi;
    jt.p = jump.p;
    jt.compensator = [comp](double, double) { return comp; };
    pb.jump = jt;
    pb.terminal = payoff;
    pb.x_min = grid.x_min; pb.x_max = grid.x_max;
    pb.n_x = grid.n_x; pb.n_t = grid.n_t;
    pb.maturity = T;
    return pb;
}

struct Prop8Problem {
    PdeProblem1D problem;
    PowerExponentSolution root;
};

// PIDE of the hedge that carries the power contract a S^rho next to the stock
// and bond. The drift brace and the jump coefficient are pinned by the root
// (a, rho); the brace denominators psi^rho + psi - 2 vanish as psi -> 1, which
// is guarded here.
inline Prop8Problem prop8_pide_problem(const JumpParams& jump, double sigma, double r,
                                       const PayoffSpec& payoff, double T,
                                       const Grid1dSpec& grid) {
    jump.validate();
    if (!(sigma > 0.0)) throw std::invalid_argument("prop8_pide_problem: sigma must be > 0");
    const double delta = -2.0 * r / (sigma * sigma);
    const PowerExponentSolution root = solve_power_exponent(delta, jump.psi);
    const double rho = root.rho;
    const double den = std::pow(jump.psi, rho) + jump.psi - 2.0;
    if (std::abs(den) < 1e-10) throw std::runtime_error("prop8 coefficients singular");

    const double A = jump.alpha - jump.lambda * jump.kappa();
    const double drift_rate =
        A - (std::pow(jump.psi, rho) - 1.0) / den * (A - r) -
        (jump.psi - 1.0) / den * (A * rho + 0.5 * (rho - 1.0) * rho * sigma * sigma - r);
    const double jump_coef = -(rho - 1.0) * (A - 0.5 * rho * sigma * sigma);

    Prop8Problem out;
    out.root = root;
    PdeProblem1D& pb = out.problem;
    const double s2 = sigma * sigma;
    pb.drift = [drift_rate](double, double) { return drift_rate; };
    pb.discount = [r](double, double) { return r; };
    pb.diffusion = [s2](double, double) { return s2; };
    JumpTerm1D jt;
    jt.lambda_coeff = [jump_coef](double, double) { return jump_coef; };
    jt.psi = jump.psi;
    jt.p = 1.0;
    pb.jump = jt;
    pb.terminal = payoff;
    pb.x_min = grid.x_min; pb.x_max = grid.x_max;
    pb.n_x = grid.n_x; pb.n_t = grid.n_t;
    pb.maturity = T;
    return out;
}

// --- stock with state-modulated jump sizes ----------------------------------

enum class DiscountMode { feynman_kac, paper_literal_zero };

// Two-dimensional equation in (price, jump-size state). The display carries
// no -rY term; the default adds it for discounting consistency, the literal
// mode omits it.
inline PdeProblem2D prop10_problem(const JumpParams& jump, double a_z, double b_z, double sigma,
                                   double r, const PayoffSpec& payoff, double T,
                                   const Grid2dSpec& grid,
                                   DiscountMode mode = DiscountMode::feynman_kac) {
    jump.validate();
    PdeProblem2D pb;
    const double A = jump.alpha - jump.lambda * jump.kappa();
    const double s2 = sigma * sigma;
    pb.drift_x = [r](double x, double, double) { return r * x; };
    pb.drift_y = [A, b_z, sigma, a_z](double, double z, double) {
        return A * (b_z / sigma) * z - a_z;
    };
    pb.diff_x = [s2](double x, double, double) { return s2 * x * x; };
    pb.diff_y = [b_z](double, double z, double) { return b_z * b_z * z * z; };
    pb.cross = [sigma, b_z](double x, double z, double) { return sigma * b_z * x * z; };
    const double disc = (mode == DiscountMode::feynman_kac) ? r : 0.0;
    pb.discount = [disc](double, double, double) { return disc; };
    pb.terminal = payoff;
    pb.x_min = grid.x_min; pb.x_max = grid.x_max;
    pb.y_min = grid.y_min; pb.y_max = grid.y_max;
    pb.n_x = grid.n_x; pb.n_y = grid.n_y; pb.n_t = grid.n_t;
    pb.maturity = T;
    return pb;
}

// --- stochastic-volatility equations -----------------------------------------

namespace detail {
inline PdeProblem2D sv_base_problem(const SvParams& sv, double r, const PayoffSpec& payoff,
                                    double T, const Grid2dSpec& grid) {
    sv.validate();
    PdeProblem2D pb;
    const SigmaSpec sig = sv.sigma_fn;
    const double phi = sv.phi, rho = sv.rho;
    pb.drift_x = [r](double x, double, double) { return r * x; };
    pb.diff_x = [sig](double x, double y, double) {
        const double s = sig(y);
        return s * s * x * x;
    };
    pb.diff_y = [phi](double, double, double) { return phi * phi; };
    pb.cross = [sig, phi, rho](double x, double y, double) { return rho * phi * sig(y) * x; };
    pb.discount = [r](double, double, double) { return r; };
    pb.terminal = payoff;
    pb.x_min = grid.x_min; pb.x_max = grid.x_max;
    pb.y_min = grid.y_min; pb.y_max = grid.y_max;
    pb.n_x = grid.n_x; pb.n_y = grid.n_y; pb.n_t = grid.n_t;
    pb.maturity = T;
    return pb;
}
}  // namespace detail

// Incomplete-market form: the state keeps its physical reversion, adjusted by
// an arbitrary risk-premium function gamma(x,y,t).
inline PdeProblem2D sv_eq33_problem(const SvParams& sv, double mu, double r,
                                    const Coef2Fn& gamma_fn, const PayoffSpec& payoff, double T,
                                    const Grid2dSpec& grid) {
    if (!gamma_fn) throw std::invalid_argument("sv_eq33_problem: premium function missing");
    PdeProblem2D pb = detail::sv_base_problem(sv, r, payoff, T, grid);
    const SigmaSpec sig = sv.sigma_fn;
    const double alpha = sv.alpha, m = sv.m, phi = sv.phi, rho = sv.rho;
    pb.drift_y = [alpha, m, phi, rho, mu, r, sig, gamma_fn](double x, double y, double t) {
        return alpha * (m - y) -
               phi * (rho * (mu - r) / sig(y) + gamma_fn(x, y, t) * std::sqrt(1.0 - rho * rho));
    };
    return pb;
}

// CCAPM premium form: the state drift is assembled from the estimated premia.
inline PdeProblem2D sv_eq37_problem(const SvParams& sv, const PremiumSpec& premium, double r,
                                    const PayoffSpec& payoff, double T, const Grid2dSpec& grid) {
    PdeProblem2D pb = detail::sv_base_problem(sv, r, payoff, T, grid);
    const PremiumSpec pr = premium;
    pb.drift_y = [pr](double, double y, double) {
        return pr.eta * y + pr.beta_v_mvol * y * pr.theta_v - y * pr.beta_v_m * pr.theta_m;
    };
    return pb;
}

enum class Prop12YDrift { rate_times_y, paper_literal_y };

// Complete-market form with the tradable volatility index. The display reads
// the y-drift as a bare y while every sibling term carries r; the default
// uses r*y (the traded-index risk-neutral drift), the literal mode keeps y.
inline PdeProblem2D sv_prop12_problem(const SvParams& sv, double r, const PayoffSpec& payoff,
                                      double T, const Grid2dSpec& grid,
                                      Prop12YDrift mode = Prop12YDrift::rate_times_y) {
    PdeProblem2D pb = detail::sv_base_problem(sv, r, payoff, T, grid);
    if (mode == Prop12YDrift::rate_times_y)
        pb.drift_y = [r](double, double y, double) { return r * y; };
    else
        pb.drift_y = [](double, double y, double) { return y; };
    return pb;
}

}  // namespace hedgelab
