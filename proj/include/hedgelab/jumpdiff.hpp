#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hedgelab/market.hpp"
#include "hedgelab/math.hpp"
#include "hedgelab/parallel.hpp"
#include "hedgelab/paths.hpp"
#include "hedgelab/rng.hpp"

namespace hedgelab {

// Jump-diffusion stock parameters: drift alpha, Poisson intensity lambda, and
// the two-point jump law (factor psi with probability p, else no move).
// kappa = E[y-1] = (psi-1) p is always recomputed, never stored.
struct JumpParams {
    double alpha = 0.0;
    double lambda = 0.0;
    double psi = 1.0;
    double p = 1.0;

    double kappa() const { return (psi - 1.0) * p; }
    void validate() const {
        if (lambda < 0.0) throw std::invalid_argument("JumpParams: lambda must be >= 0");
        if (!(psi > 0.0)) throw std::invalid_argument("JumpParams: psi must be > 0");
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("JumpParams: p must be in (0,1]");
    }
};

struct JumpBondParams {
    double m = 0.0;  // drift of the pure-jump bond
};

// Jump-diffusion paths with exact lognormal diffusion per step and
// multiplicative two-point jumps. Channels:
//   S      stock price
//   N      cumulative arrival count
//   Jmult  realized jump multiplier over each step (index k is the factor
//          applied between nodes k-1 and k; index 0 is 1). Jump bonds and the
//          jump-free portfolio re-use these marks, which is what makes the
//          shared-mark discipline exact.
inline PathSet simulate_merton(const JumpParams& params, double sigma, double S0,
                               const TimeGrid& grid, std::size_t n_paths, SeedSpec seed,
                               Measure measure, double r = 0.0, std::uint64_t path_begin = 0) {
    params.validate();
    grid.validate();
    if (!(sigma > 0.0)) throw std::invalid_argument("simulate_merton: sigma must be > 0");
    if (!(S0 > 0.0)) throw std::invalid_argument("simulate_merton: S0 must be > 0");
    // under Q the drift parameter alpha is replaced by r, the jump law kept
    const double drift =
        ((measure == Measure::P) ? params.alpha : r) - params.lambda * params.kappa();
    const double dt = grid.dt();
    const double step_vol = sigma * std::sqrt(dt);

    PathSet out(grid, n_paths, seed, path_begin);
    auto& S = out.add_channel("S");
    auto& N = out.add_channel("N");
    auto& J = out.add_channel("Jmult");
    const std::size_t nn = out.n_nodes();
    parallel_for(n_paths, [&](std::size_t p) {
        const std::uint64_t gp = path_begin + p;
        CounterStream z(seed, gp, channel::diffusion0);
        CounterStream counts(seed, gp, channel::jump_count);
        CounterStream marks(seed, gp, channel::jump_mark);
        double s = S0;
        int n_arrivals = 0;
        S[p * nn] = s;
        N[p * nn] = 0.0;
        J[p * nn] = 1.0;
        for (std::size_t k = 1; k < nn; ++k) {
            const double step_drift = (drift - 0.5 * sigma * sigma) * dt;
            double mult = 1.0;
            int nk = 0;
            if (params.lambda > 0.0) {
                nk = counts.next_poisson(params.lambda * dt);
                for (int a = 0; a < nk; ++a)
                    if (marks.next_uniform() < params.p) mult *= params.psi;
            }
            s = s * std::exp(step_drift + step_vol * z.next_normal()) * mult;
            n_arrivals += nk;
            S[p * nn + k] = s;
            N[p * nn + k] = static_cast<double>(n_arrivals);
            J[p * nn + k] = mult;
        }
    });
    return out;
}

// Pure-jump bond M: drift m between arrivals, same multiplicative marks as
// the stock. Requires the Jmult channel of a simulate_merton PathSet.
inline PathSet jump_bond_path(const JumpBondParams& params, const PathSet& stock_paths,
                              double M0 = 1.0) {
    if (!stock_paths.has_channel("Jmult"))
        throw std::invalid_argument("jump_bond_path: paths carry no jump marks");
    const auto& J = stock_paths.channel("Jmult");
    const double dt = stock_paths.grid().dt();
    PathSet out(stock_paths.grid(), stock_paths.n_paths(), stock_paths.seed(),
                stock_paths.path_begin());
    auto& M = out.add_channel("M");
    const std::size_t nn = out.n_nodes();
    const double growth = std::exp(params.m * dt);
    for (std::size_t p = 0; p < stock_paths.n_paths(); ++p) {
        double m = M0;
        M[p * nn] = m;
        for (std::size_t k = 1; k < nn; ++k) {
            m = m * growth * J[p * nn + k];
            M[p * nn + k] = m;
        }
    }
    return out;
}

// Self-financing combination holding M_{t-} stock units and -S_{t-} bond
// units: its jumps cancel exactly because both assets share the same marks.
// Channels: P (portfolio value from P_0 = 0) and Pjump (the jump component of
// the increment over each step, identically zero up to rounding).
inline PathSet jumpfree_portfolio_path(const PathSet& stock_paths, const PathSet& bond_paths,
                                       double bond_drift_m) {
    const auto& S = stock_paths.channel("S");
    const auto& J = stock_paths.channel("Jmult");
    const auto& M = bond_paths.channel("M");
    if (stock_paths.n_paths() != bond_paths.n_paths() ||
        stock_paths.n_nodes() != bond_paths.n_nodes() ||
        stock_paths.grid().dt() != bond_paths.grid().dt())
        throw std::invalid_argument("jumpfree_portfolio_path: mismatched grids");
    const double dt = stock_paths.grid().dt();
    const double growth = std::exp(bond_drift_m * dt);

    PathSet out(stock_paths.grid(), stock_paths.n_paths(), stock_paths.seed(),
                stock_paths.path_begin());
    auto& P = out.add_channel("P");
    auto& PJ = out.add_channel("Pjump");
    const std::size_t nn = out.n_nodes();
    for (std::size_t p = 0; p < stock_paths.n_paths(); ++p) {
        double port = 0.0;
        P[p * nn] = 0.0;
        PJ[p * nn] = 0.0;
        for (std::size_t k = 1; k < nn; ++k) {
            const double s_prev = S[p * nn + k - 1];
            const double m_prev = M[p * nn + k - 1];
            const double mult = J[p * nn + k];
            // split the step into its continuous part and the jump
            const double s_cont = S[p * nn + k] / mult;
            const double m_cont = m_prev * growth;
            port += m_prev * (s_cont - s_prev) - s_prev * (m_cont - m_prev);
            const double jump_in_p =
                m_cont * (S[p * nn + k] - s_cont) - s_cont * (M[p * nn + k] - m_cont);
            port += jump_in_p;
            P[p * nn + k] = port;
            PJ[p * nn + k] = jump_in_p;
        }
    }
    return out;
}

// Root equation for the exponent of the tradable power contract a S^rho under
// the jump-diffusion market. rho = 1 (the stock itself) is always a root and
// is excluded by contract.
inline double power_root_residual(double rho, double delta, double psi) {
    return rho * rho - (std::pow(psi, rho) - 1.0) / (psi - 1.0) * delta - rho + delta;
}

// The main-text variant of the same display, kept for comparison.
inline double power_root_residual_eq22(double rho, double delta, double psi) {
    return rho * rho - std::pow(psi, rho - 1.0) / (psi - 1.0) * delta - rho + delta;
}

struct PowerExponentSolution {
    double rho = 0.0;
    double a = 0.0;
};

enum class PowerRootForm { lemma, eq22_literal };

// Finds a nontrivial root of the power-exponent equation by a sign-change
// scan over [-50, 50] (a neighborhood of the trivial root 1 excluded),
// refined by safeguarded Newton/bisection. Among the nontrivial roots the one
// of smallest magnitude is returned.
inline PowerExponentSolution solve_power_exponent(double delta, double psi,
                                                  PowerRootForm form = PowerRootForm::lemma) {
    if (psi == 1.0) throw std::invalid_argument("solve_power_exponent: psi must differ from 1");
    if (!(psi > 0.0)) throw std::invalid_argument("solve_power_exponent: psi must be > 0");
    if (delta == 0.0) throw std::invalid_argument("solve_power_exponent: delta must be nonzero");

    auto residual = [&](double rho) {
        return form == PowerRootForm::lemma ? power_root_residual(rho, delta, psi)
                                            : power_root_residual_eq22(rho, delta, psi);
    };
    constexpr double kLo = -50.0, kHi = 50.0, kStep = 0.05, kExclude = 0.25;

    double best_rho = 0.0;
    bool found = false;
    double prev_x = kLo, prev_f = residual(kLo);
    double scan_min = prev_f, scan_max = prev_f;
    for (double x = kLo + kStep; x <= kHi + 1e-12; x += kStep) {
        const double f = residual(x);
        scan_min = std::min(scan_min, f);
        scan_max = std::max(scan_max, f);
        const bool near_trivial = (prev_x > 1.0 - kExclude && x < 1.0 + kExclude);
        if (!near_trivial && prev_f * f <= 0.0 && (prev_f != 0.0 || f != 0.0)) {
            const double root = refine_root(residual, prev_x, x, prev_f);
            if (std::abs(root - 1.0) > kExclude && (!found || std::abs(root) < std::abs(best_rho))) {
                best_rho = root;
                found = true;
            }
        }
        prev_x = x;
        prev_f = f;
    }
    if (!found)
        throw std::runtime_error(
            "solve_power_exponent: no nontrivial root in scan range [-50,50]; residual spans [" +
            std::to_string(scan_min) + ", " + std::to_string(scan_max) + "]");

    PowerExponentSolution sol;
    sol.rho = best_rho;
    sol.a = (std::pow(psi, sol.rho) - 1.0) / (sol.rho * (psi - 1.0));
    if (std::abs(residual(sol.rho)) >= 1e-12)
        throw std::runtime_error("solve_power_exponent: root refinement failed");
    return sol;
}

// Extension where the jump size is modulated by a GBM factor z driven by the
// same Brownian motion as the stock (correlation configurable, 1 by
// default). Channels S, z, N, Jmult (Jmult holds the realized per-step factor
// prod(1 + z (y-1)) applied to S).
inline PathSet simulate_jumpz(const JumpParams& params, double sigma, double a_z, double b_z,
                              double S0, double z0, const TimeGrid& grid, std::size_t n_paths,
                              SeedSpec seed, double corr = 1.0, std::uint64_t path_begin = 0) {
    params.validate();
    grid.validate();
    if (!(sigma > 0.0)) throw std::invalid_argument("simulate_jumpz: sigma must be > 0");
    if (!(S0 > 0.0)) throw std::invalid_argument("simulate_jumpz: S0 must be > 0");
    if (z0 < 0.0) throw std::invalid_argument("simulate_jumpz: z0 must be >= 0");
    if (corr < -1.0 || corr > 1.0) throw std::invalid_argument("simulate_jumpz: corr in [-1,1]");
    const double dt = grid.dt();
    const double drift = params.alpha - params.lambda * params.kappa();
    const double step_vol = sigma * std::sqrt(dt);

    PathSet out(grid, n_paths, seed, path_begin);
    auto& S = out.add_channel("S");
    auto& Z = out.add_channel("z");
    auto& N = out.add_channel("N");
    auto& J = out.add_channel("Jmult");
    const std::size_t nn = out.n_nodes();
    parallel_for(n_paths, [&](std::size_t p) {
        const std::uint64_t gp = path_begin + p;
        CounterStream zb(seed, gp, channel::diffusion0);
        CounterStream zperp(seed, gp, channel::diffusion1);
        CounterStream counts(seed, gp, channel::jump_count);
        CounterStream marks(seed, gp, channel::jump_mark);
        double s = S0, z = z0;
        int n_arrivals = 0;
        S[p * nn] = s; Z[p * nn] = z; N[p * nn] = 0.0; J[p * nn] = 1.0;
        for (std::size_t k = 1; k < nn; ++k) {
            const double g = zb.next_normal();
            const double gz = corr * g + std::sqrt(std::max(0.0, 1.0 - corr * corr)) *
                                             (std::abs(corr) < 1.0 ? zperp.next_normal() : 0.0);
            double mult = 1.0;
            int nk = 0;
            if (params.lambda > 0.0 && z != 0.0) {
                nk = counts.next_poisson(params.lambda * dt);
                for (int a = 0; a < nk; ++a)
                    if (marks.next_uniform() < params.p) mult *= 1.0 + z * (params.psi - 1.0);
            } else if (params.lambda > 0.0) {
                nk = counts.next_poisson(params.lambda * dt);
            }
            s = s * std::exp((drift - 0.5 * sigma * sigma) * dt + step_vol * g) * mult;
            z = z * std::exp((a_z - 0.5 * b_z * b_z) * dt + b_z * std::sqrt(dt) * gz);
            n_arrivals += nk;
            S[p * nn + k] = s;
            Z[p * nn + k] = z;
            N[p * nn + k] = static_cast<double>(n_arrivals);
            J[p * nn + k] = mult;
        }
    });
    return out;
}

}  // namespace hedgelab
