#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hedgelab/market.hpp"
#include "hedgelab/math.hpp"

namespace hedgelab {

using CoefFn = std::function<double(double x, double t)>;

// Nonlocal term  l(x,t) * ( p*Y(psi*x,t) + (1-p)*Y(x,t) - Y(x,t) )
//              + k(x,t) * x * dY/dx
// appended to the local operator. Treated explicitly in time.
struct JumpTerm1D {
    CoefFn lambda_coeff;           // l(x,t)
    double psi = 1.0;              // jump multiplier, > 0
    double p = 1.0;                // jump probability in [0,1]
    CoefFn compensator;            // k(x,t); empty means 0

    void validate() const {
        if (!(psi > 0.0)) throw std::invalid_argument("JumpTerm1D: psi must be > 0");
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("JumpTerm1D: p must be in [0,1]");
        if (!lambda_coeff) throw std::invalid_argument("JumpTerm1D: lambda_coeff missing");
    }
};

// Terminal-value problem in normal form
//   dY/dt + c1(x,t) x dY/dx - c0(x,t) Y + c2(x,t) (1/2) x^2 d2Y/dx2 + jump = 0
// on [x_min, x_max] x [0, maturity], Y(x, maturity) = terminal(x).
// Every equation preset is a coefficient pack for this one kernel.
struct PdeProblem1D {
    CoefFn drift;      // c1
    CoefFn discount;   // c0
    CoefFn diffusion;  // c2, must be >= 0 on the domain
    std::optional<JumpTerm1D> jump;
    PayoffSpec terminal;
    double x_min = 0.0;
    double x_max = 0.0;
    int n_x = 0;
    int n_t = 0;
    double maturity = 0.0;

    void validate() const {
        if (!drift || !discount || !diffusion)
            throw std::invalid_argument("PdeProblem1D: coefficient function missing");
        if (!(x_min > 0.0) || !(x_max > x_min))
            throw std::invalid_argument("PdeProblem1D: degenerate x domain");
        if (n_x < 3 || n_t < 3) throw std::invalid_argument("PdeProblem1D: degenerate grid");
        if (!(maturity > 0.0)) throw std::invalid_argument("PdeProblem1D: maturity must be > 0");
        if (jump) jump->validate();
        terminal.validate();
        if (terminal.kind == PayoffKind::custom) {
            if (terminal.xs.back() < x_min || terminal.xs.front() > x_max)
                throw std::invalid_argument("PdeProblem1D: payoff outside domain");
        } else if (terminal.strike <= x_min || terminal.strike >= x_max) {
            throw std::invalid_argument("PdeProblem1D: payoff outside domain");
        }
        // spot-check diffusion sign on the grid corners
        for (double t : {0.0, maturity})
            for (double x : {x_min, std::sqrt(x_min * x_max), x_max})
                if (diffusion(x, t) < 0.0)
                    throw std::invalid_argument("PdeProblem1D: negative diffusion coefficient");
    }
};

enum class BoundaryKind { linearity, dirichlet_payoff_asymptote };

struct SolverConfig {
    double theta = 0.5;  // 0 explicit, 1/2 Crank-Nicolson, 1 implicit
    BoundaryKind boundary = BoundaryKind::linearity;
    int rannacher_steps = 2;  // leading steps run as two implicit halves each

    void validate() const {
        if (theta < 0.0 || theta > 1.0)
            throw std::invalid_argument("SolverConfig: theta must be in [0,1]");
        if (rannacher_steps < 0)
            throw std::invalid_argument("SolverConfig: rannacher_steps must be >= 0");
    }
};

// Value surface Y(x, t) on the solver grid, with monotone-cubic interpolation
// in x and linear interpolation in t.
class Surface1D {
  public:
    Surface1D() = default;
    Surface1D(std::vector<double> x, std::vector<double> t, std::vector<double> values)
        : x_(std::move(x)), t_(std::move(t)), values_(std::move(values)) {
        interp_.reserve(t_.size());
        for (std::size_t i = 0; i < t_.size(); ++i)
            interp_.emplace_back(x_, slice_copy(i));
    }

    const std::vector<double>& x_nodes() const { return x_; }
    const std::vector<double>& t_nodes() const { return t_; }
    double node_value(std::size_t time_index, std::size_t x_index) const {
        return values_[time_index * x_.size() + x_index];
    }

    double value_at(double x, double t) const {
        const std::size_t nt = t_.size();
        if (t <= t_.front()) return interp_.front()(x);
        if (t >= t_.back()) return interp_.back()(x);
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(t_.begin(), t_.end(), t) - t_.begin()) - 1;
        if (i + 1 >= nt) i = nt - 2;
        const double w = (t - t_[i]) / (t_[i + 1] - t_[i]);
        return (1.0 - w) * interp_[i](x) + w * interp_[i + 1](x);
    }

    // Central difference in log-price, the convention the hedging backtests
    // rely on.
    double delta_at(double x, double t) const {
        const double h = std::log(x_[1] / x_[0]);
        const double up = value_at(x * std::exp(h), t);
        const double dn = value_at(x * std::exp(-h), t);
        return (up - dn) / (x * (std::exp(h) - std::exp(-h)));
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

  private:
    std::vector<double> slice_copy(std::size_t i) const {
        return {values_.begin() + static_cast<std::ptrdiff_t>(i * x_.size()),
                values_.begin() + static_cast<std::ptrdiff_t>((i + 1) * x_.size())};
    }
    std::vector<double> x_, t_;
    std::vector<double> values_;  // (n_t+1) x n_x, row i at time t_[i]
    std::vector<MonotoneCubic> interp_;
};

namespace detail {

struct Pde1dWorkspace {
    std::vector<double> xi, x;       // log grid and price nodes
    std::vector<double> lo, di, up;  // tridiagonal rows of L
    std::vector<double> rhs, jump, du;
    double dxi = 0.0;
};

// Rows of the spatial operator L (so that u_tau = L u + jump) at time t.
// Linearity boundaries drop the diffusion term and use one-sided convection.
inline void build_operator(const PdeProblem1D& pb, const Pde1dWorkspace& w, double t,
                           std::vector<double>& lo, std::vector<double>& di,
                           std::vector<double>& up) {
    const std::size_t n = w.x.size();
    const double dxi = w.dxi;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = w.x[j];
        const double c1 = pb.drift(x, t);
        const double c0 = pb.discount(x, t);
        const double c2 = pb.diffusion(x, t);
        if (j == 0) {
            lo[j] = 0.0;
            di[j] = -c1 / dxi - c0;
            up[j] = c1 / dxi;
        } else if (j == n - 1) {
            lo[j] = -c1 / dxi;
            di[j] = c1 / dxi - c0;
            up[j] = 0.0;
        } else {
            const double conv = c1 - 0.5 * c2;
            const double diff = 0.5 * c2;
            lo[j] = diff / (dxi * dxi) - conv / (2.0 * dxi);
            di[j] = -2.0 * diff / (dxi * dxi) - c0;
            up[j] = diff / (dxi * dxi) + conv / (2.0 * dxi);
        }
    }
}

// Explicit jump term on the slice u at time t. Values at psi*x come from
// monotone cubic interpolation on the log grid; beyond the domain the slice
// is extended linearly in price.
inline void eval_jump(const PdeProblem1D& pb, const Pde1dWorkspace& w,
                      const std::vector<double>& u, double t, std::vector<double>& out) {
    const auto& jt = *pb.jump;
    const std::size_t n = w.x.size();
    const double dxi = w.dxi;
    const double shift = std::log(jt.psi);
    MonotoneCubic interp(w.xi, u);

    const double slope_lo = (u[1] - u[0]) / (w.x[1] - w.x[0]);
    const double slope_hi = (u[n - 1] - u[n - 2]) / (w.x[n - 1] - w.x[n - 2]);
    for (std::size_t j = 0; j < n; ++j) {
        const double xiq = w.xi[j] + shift;
        double y_shift;
        if (xiq < w.xi.front()) {
            y_shift = u[0] + slope_lo * (w.x[j] * jt.psi - w.x[0]);
        } else if (xiq > w.xi.back()) {
            y_shift = u[n - 1] + slope_hi * (w.x[j] * jt.psi - w.x[n - 1]);
        } else {
            y_shift = interp(xiq);
        }
        double du;  // x dY/dx = du/dxi
        if (j == 0) du = (u[1] - u[0]) / dxi;
        else if (j == n - 1) du = (u[n - 1] - u[n - 2]) / dxi;
        else du = (u[j + 1] - u[j - 1]) / (2.0 * dxi);

        const double l = jt.lambda_coeff(w.x[j], t);
        const double k = jt.compensator ? jt.compensator(w.x[j], t) : 0.0;
        out[j] = l * (jt.p * y_shift + (1.0 - jt.p) * u[j] - u[j]) + k * du;
    }
}

inline double dirichlet_value(const PdeProblem1D& pb, double x, double tau) {
    // Asymptotic payoff value with the local discount frozen at the boundary.
    const double df = std::exp(-pb.discount(x, pb.maturity - tau) * tau);
    switch (pb.terminal.kind) {
        case PayoffKind::call: return std::max(x - pb.terminal.strike * df, 0.0);
        case PayoffKind::put: return std::max(pb.terminal.strike * df - x, 0.0);
        case PayoffKind::custom: return pb.terminal(x);
    }
    return pb.terminal(x);
}

}  // namespace detail

// Theta-scheme solver on a uniform log-price grid, marching backward from the
// terminal condition. The optional jump term is integrated explicitly
// (IMEX: local part per `theta`, nonlocal part forward Euler).
inline Surface1D solve_pde_1d(const PdeProblem1D& problem, const SolverConfig& config) {
    problem.validate();
    config.validate();

    const int nx = problem.n_x, nt = problem.n_t;
    detail::Pde1dWorkspace w;
    w.xi.resize(static_cast<std::size_t>(nx));
    w.x.resize(static_cast<std::size_t>(nx));
    const double xi_min = std::log(problem.x_min), xi_max = std::log(problem.x_max);
    w.dxi = (xi_max - xi_min) / (nx - 1);
    for (int j = 0; j < nx; ++j) {
        w.xi[static_cast<std::size_t>(j)] = xi_min + j * w.dxi;
        w.x[static_cast<std::size_t>(j)] = std::exp(w.xi[static_cast<std::size_t>(j)]);
    }

    std::vector<double> values(static_cast<std::size_t>(nt + 1) * static_cast<std::size_t>(nx));
    std::vector<double> u(static_cast<std::size_t>(nx));
    for (int j = 0; j < nx; ++j) u[static_cast<std::size_t>(j)] = problem.terminal(w.x[static_cast<std::size_t>(j)]);
    std::copy(u.begin(), u.end(), values.begin() + static_cast<std::ptrdiff_t>(nt) * nx);

    const double dtau = problem.maturity / nt;
    std::vector<double> lo(static_cast<std::size_t>(nx)), di(static_cast<std::size_t>(nx)),
        up(static_cast<std::size_t>(nx));
    std::vector<double> alo(static_cast<std::size_t>(nx)), adi(static_cast<std::size_t>(nx)),
        aup(static_cast<std::size_t>(nx));
    std::vector<double> rhs(static_cast<std::size_t>(nx)), jmp(static_cast<std::size_t>(nx), 0.0);

    auto advance = [&](double tau_old, double h, double theta, std::vector<double>& slice) {
        const double t_old = problem.maturity - tau_old;
        const double t_new = problem.maturity - (tau_old + h);
        if (problem.jump) detail::eval_jump(problem, w, slice, t_old, jmp);

        detail::build_operator(problem, w, t_old, lo, di, up);
        for (int j = 0; j < nx; ++j) {
            const auto sj = static_cast<std::size_t>(j);
            double v = slice[sj];
            double lv = di[sj] * slice[sj];
            if (j > 0) lv += lo[sj] * slice[sj - 1];
            if (j < nx - 1) lv += up[sj] * slice[sj + 1];
            rhs[sj] = v + (1.0 - theta) * h * lv + (problem.jump ? h * jmp[sj] : 0.0);
        }
        detail::build_operator(problem, w, t_new, lo, di, up);
        for (int j = 0; j < nx; ++j) {
            const auto sj = static_cast<std::size_t>(j);
            alo[sj] = -theta * h * lo[sj];
            adi[sj] = 1.0 - theta * h * di[sj];
            aup[sj] = -theta * h * up[sj];
        }
        if (config.boundary == BoundaryKind::dirichlet_payoff_asymptote) {
            alo[0] = 0.0; adi[0] = 1.0; aup[0] = 0.0;
            rhs[0] = detail::dirichlet_value(problem, w.x[0], tau_old + h);
            const auto last = static_cast<std::size_t>(nx - 1);
            alo[last] = 0.0; adi[last] = 1.0; aup[last] = 0.0;
            rhs[last] = detail::dirichlet_value(problem, w.x[last], tau_old + h);
        }
        slice = solve_tridiagonal(alo, adi, aup, rhs);
    };

    double tau = 0.0;
    for (int m = 0; m < nt; ++m) {
        if (m < config.rannacher_steps) {
            advance(tau, 0.5 * dtau, 1.0, u);
            advance(tau + 0.5 * dtau, 0.5 * dtau, 1.0, u);
        } else {
            advance(tau, dtau, config.theta, u);
        }
        tau += dtau;
        std::copy(u.begin(), u.end(),
                  values.begin() + static_cast<std::ptrdiff_t>(nt - 1 - m) * nx);
    }

    std::vector<double> ts(static_cast<std::size_t>(nt + 1));
    for (int i = 0; i <= nt; ++i) ts[static_cast<std::size_t>(i)] = problem.maturity * i / nt;
    return Surface1D(w.x, ts, std::move(values));
}

enum class PideVariant { merton_eq20, prop8 };

// Jump-diffusion solve; the variant names the coefficient pack families built
// in equations.hpp, the stepping is shared.
inline Surface1D solve_pide_1d(const PdeProblem1D& problem, const SolverConfig& config,
                               PideVariant /*variant*/ = PideVariant::merton_eq20) {
    if (!problem.jump) throw std::invalid_argument("solve_pide_1d: problem has no jump term");
    return solve_pde_1d(problem, config);
}

}  // namespace hedgelab
