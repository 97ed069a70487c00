#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hedgelab/market.hpp"
#include "hedgelab/math.hpp"
#include "hedgelab/pde1d.hpp"

namespace hedgelab {

using Coef2Fn = std::function<double(double x, double y, double t)>;

// Terminal-value problem
//   dY/dt + ax Y_x + ay Y_y - c0 Y + (1/2) bx Y_xx + (1/2) by Y_yy + cxy Y_xy = 0
// on [x_min,x_max] x [y_min,y_max] x [0,maturity], terminal data g(x) constant
// in y. The x axis is discretized on a log grid, y uniformly.
struct PdeProblem2D {
    Coef2Fn drift_x, drift_y;
    Coef2Fn diff_x, diff_y;  // coefficients of (1/2) Y_xx and (1/2) Y_yy
    Coef2Fn cross;           // coefficient of Y_xy
    Coef2Fn discount;
    PayoffSpec terminal;
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;
    int n_x = 0, n_y = 0, n_t = 0;
    double maturity = 0.0;
    bool autonomous = true;  // coefficients independent of t: cached once

    void validate() const {
        if (!drift_x || !drift_y || !diff_x || !diff_y || !cross || !discount)
            throw std::invalid_argument("PdeProblem2D: coefficient function missing");
        if (!(x_min > 0.0) || !(x_max > x_min) || !(y_max > y_min))
            throw std::invalid_argument("PdeProblem2D: degenerate domain");
        if (n_x < 3 || n_y < 3 || n_t < 3)
            throw std::invalid_argument("PdeProblem2D: degenerate grid");
        if (!(maturity > 0.0)) throw std::invalid_argument("PdeProblem2D: maturity must be > 0");
        terminal.validate();
        // sampled positive-semidefiniteness of the diffusion matrix
        for (int i = 0; i <= 4; ++i)
            for (int j = 0; j <= 4; ++j) {
                const double x = x_min * std::pow(x_max / x_min, i / 4.0);
                const double y = y_min + (y_max - y_min) * j / 4.0;
                const double bx = diff_x(x, y, 0.0), by = diff_y(x, y, 0.0);
                const double c = cross(x, y, 0.0);
                if (bx < 0.0 || by < 0.0 || bx * by + 1e-12 * (1.0 + bx * by) < c * c)
                    throw std::invalid_argument(
                        "PdeProblem2D: diffusion matrix not positive semidefinite");
            }
    }
};

// Value surface Y(x, y, t): bilinear in (x, y), linear in t.
class Surface2D {
  public:
    Surface2D() = default;
    Surface2D(std::vector<double> x, std::vector<double> y, std::vector<double> t,
              std::vector<double> values)
        : x_(std::move(x)), y_(std::move(y)), t_(std::move(t)), values_(std::move(values)) {}

    const std::vector<double>& x_nodes() const { return x_; }
    const std::vector<double>& y_nodes() const { return y_; }
    const std::vector<double>& t_nodes() const { return t_; }

    double node_value(std::size_t it, std::size_t iy, std::size_t ix) const {
        return values_[(it * y_.size() + iy) * x_.size() + ix];
    }

    double value_at(double x, double y, double t) const {
        const std::size_t nt = t_.size();
        if (t <= t_.front()) return slice_value(0, x, y);
        if (t >= t_.back()) return slice_value(nt - 1, x, y);
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(t_.begin(), t_.end(), t) - t_.begin()) - 1;
        if (i + 1 >= nt) i = nt - 2;
        const double w = (t - t_[i]) / (t_[i + 1] - t_[i]);
        return (1.0 - w) * slice_value(i, x, y) + w * slice_value(i + 1, x, y);
    }

    double delta_x_at(double x, double y, double t) const {
        const double h = std::log(x_[1] / x_[0]);
        return (value_at(x * std::exp(h), y, t) - value_at(x * std::exp(-h), y, t)) /
               (x * (std::exp(h) - std::exp(-h)));
    }
    double delta_y_at(double x, double y, double t) const {
        const double h = y_[1] - y_[0];
        return (value_at(x, y + h, t) - value_at(x, y - h, t)) / (2.0 * h);
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    double y_min() const { return y_.front(); }
    double y_max() const { return y_.back(); }

  private:
    double slice_value(std::size_t it, double x, double y) const {
        const std::size_t nx = x_.size(), ny = y_.size();
        const double xc = std::clamp(x, x_.front(), x_.back());
        const double yc = std::clamp(y, y_.front(), y_.back());
        std::size_t ix = static_cast<std::size_t>(
            std::upper_bound(x_.begin(), x_.end(), xc) - x_.begin());
        ix = std::clamp<std::size_t>(ix, 1, nx - 1) - 1;
        std::size_t iy = static_cast<std::size_t>(
            std::upper_bound(y_.begin(), y_.end(), yc) - y_.begin());
        iy = std::clamp<std::size_t>(iy, 1, ny - 1) - 1;
        const double wx = (xc - x_[ix]) / (x_[ix + 1] - x_[ix]);
        const double wy = (yc - y_[iy]) / (y_[iy + 1] - y_[iy]);
        const double v00 = node_value(it, iy, ix), v01 = node_value(it, iy, ix + 1);
        const double v10 = node_value(it, iy + 1, ix), v11 = node_value(it, iy + 1, ix + 1);
        return (1 - wy) * ((1 - wx) * v00 + wx * v01) + wy * ((1 - wx) * v10 + wx * v11);
    }

    std::vector<double> x_, y_, t_;
    std::vector<double> values_;  // (n_t+1) x n_y x n_x
};

enum class Pde2dVariant { prop10, sv_eq33, sv_eq37, sv_prop12 };

namespace detail {

// Per-node operator coefficients after the log-x transform.
struct Adi2dCoefs {
    std::vector<double> cx_lo, cx_di, cx_up;  // x-direction rows of Fx
    std::vector<double> cy_lo, cy_di, cy_up;  // y-direction rows of Fy
    std::vector<double> cmix;                 // coefficient of u_{xi y} in F0
};

inline void build_adi_coefs(const PdeProblem2D& pb, const std::vector<double>& x,
                            const std::vector<double>& y, double dxi, double dy, double t,
                            Adi2dCoefs& c) {
    const std::size_t nx = x.size(), ny = y.size();
    const std::size_t n = nx * ny;
    c.cx_lo.assign(n, 0.0); c.cx_di.assign(n, 0.0); c.cx_up.assign(n, 0.0);
    c.cy_lo.assign(n, 0.0); c.cy_di.assign(n, 0.0); c.cy_up.assign(n, 0.0);
    c.cmix.assign(n, 0.0);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t id = iy * nx + ix;
            const double xv = x[ix], yv = y[iy];
            const double ax = pb.drift_x(xv, yv, t);
            const double ay = pb.drift_y(xv, yv, t);
            const double bx = pb.diff_x(xv, yv, t);
            const double by = pb.diff_y(xv, yv, t);
            const double c0 = pb.discount(xv, yv, t);

            // x direction: conv * u_xi + diff * u_xixi - (c0/2) u
            if (ix == 0) {
                const double conv = ax / xv;
                c.cx_di[id] = -conv / dxi - 0.5 * c0;
                c.cx_up[id] = conv / dxi;
            } else if (ix == nx - 1) {
                const double conv = ax / xv;
                c.cx_lo[id] = -conv / dxi;
                c.cx_di[id] = conv / dxi - 0.5 * c0;
            } else {
                const double conv = ax / xv - 0.5 * bx / (xv * xv);
                const double diff = 0.5 * bx / (xv * xv);
                c.cx_lo[id] = diff / (dxi * dxi) - conv / (2.0 * dxi);
                c.cx_di[id] = -2.0 * diff / (dxi * dxi) - 0.5 * c0;
                c.cx_up[id] = diff / (dxi * dxi) + conv / (2.0 * dxi);
            }
            // y direction
            if (iy == 0) {
                c.cy_di[id] = -ay / dy - 0.5 * c0;
                c.cy_up[id] = ay / dy;
            } else if (iy == ny - 1) {
                c.cy_lo[id] = -ay / dy;
                c.cy_di[id] = ay / dy - 0.5 * c0;
            } else {
                const double diff = 0.5 * by;
                c.cy_lo[id] = diff / (dy * dy) - ay / (2.0 * dy);
                c.cy_di[id] = -2.0 * diff / (dy * dy) - 0.5 * c0;
                c.cy_up[id] = diff / (dy * dy) + ay / (2.0 * dy);
            }
            // cross term, interior only
            if (ix > 0 && ix + 1 < nx && iy > 0 && iy + 1 < ny)
                c.cmix[id] = pb.cross(xv, yv, t) / xv;
        }
    }
}

}  // namespace detail

// Douglas ADI scheme: both one-dimensional operators implicit with weight
// theta, the cross-derivative explicit. The leading `rannacher_steps` steps
// run fully implicit to damp the payoff kink.
inline Surface2D solve_pde_2d(const PdeProblem2D& problem, const SolverConfig& config,
                              Pde2dVariant /*variant*/ = Pde2dVariant::sv_prop12) {
    problem.validate();
    config.validate();
    const int nx = problem.n_x, ny = problem.n_y, nt = problem.n_t;
    const std::size_t snx = static_cast<std::size_t>(nx), sny = static_cast<std::size_t>(ny);

    std::vector<double> x(snx), xi(snx), y(sny);
    const double xi_min = std::log(problem.x_min), xi_max = std::log(problem.x_max);
    const double dxi = (xi_max - xi_min) / (nx - 1);
    for (int i = 0; i < nx; ++i) {
        xi[static_cast<std::size_t>(i)] = xi_min + i * dxi;
        x[static_cast<std::size_t>(i)] = std::exp(xi[static_cast<std::size_t>(i)]);
    }
    const double dy = (problem.y_max - problem.y_min) / (ny - 1);
    for (int j = 0; j < ny; ++j) y[static_cast<std::size_t>(j)] = problem.y_min + j * dy;

    const std::size_t n = snx * sny;
    std::vector<double> u(n);
    for (std::size_t iy = 0; iy < sny; ++iy)
        for (std::size_t ix = 0; ix < snx; ++ix) u[iy * snx + ix] = problem.terminal(x[ix]);

    std::vector<double> values(static_cast<std::size_t>(nt + 1) * n);
    std::copy(u.begin(), u.end(), values.begin() + static_cast<std::ptrdiff_t>(nt) * n);

    const double h = problem.maturity / nt;
    detail::Adi2dCoefs co;
    detail::build_adi_coefs(problem, x, y, dxi, dy, problem.maturity, co);

    std::vector<double> fx(n), fy(n), f0(n), y0(n), y1(n);
    std::vector<double> tl(std::max(snx, sny)), td(std::max(snx, sny)), tu(std::max(snx, sny)),
        tr(std::max(snx, sny)), col(sny);

    auto apply_fx = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t iy = 0; iy < sny; ++iy)
            for (std::size_t ix = 0; ix < snx; ++ix) {
                const std::size_t id = iy * snx + ix;
                double s = co.cx_di[id] * v[id];
                if (ix > 0) s += co.cx_lo[id] * v[id - 1];
                if (ix + 1 < snx) s += co.cx_up[id] * v[id + 1];
                out[id] = s;
            }
    };
    auto apply_fy = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t iy = 0; iy < sny; ++iy)
            for (std::size_t ix = 0; ix < snx; ++ix) {
                const std::size_t id = iy * snx + ix;
                double s = co.cy_di[id] * v[id];
                if (iy > 0) s += co.cy_lo[id] * v[id - snx];
                if (iy + 1 < sny) s += co.cy_up[id] * v[id + snx];
                out[id] = s;
            }
    };
    auto apply_f0 = [&](const std::vector<double>& v, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t iy = 1; iy + 1 < sny; ++iy)
            for (std::size_t ix = 1; ix + 1 < snx; ++ix) {
                const std::size_t id = iy * snx + ix;
                const double uxy = (v[id + snx + 1] - v[id + snx - 1] - v[id - snx + 1] +
                                    v[id - snx - 1]) /
                                   (4.0 * dxi * dy);
                out[id] = co.cmix[id] * uxy;
            }
    };

    for (int m = 0; m < nt; ++m) {
        const double tau_old = h * m;
        const double theta = (m < config.rannacher_steps) ? 1.0 : config.theta;
        if (!problem.autonomous)
            detail::build_adi_coefs(problem, x, y, dxi, dy, problem.maturity - tau_old, co);

        apply_fx(u, fx);
        apply_fy(u, fy);
        apply_f0(u, f0);
        for (std::size_t id = 0; id < n; ++id) y0[id] = u[id] + h * (fx[id] + fy[id] + f0[id]);

        // x sweep: (I - theta h Fx) y1 = y0 - theta h Fx u
        for (std::size_t iy = 0; iy < sny; ++iy) {
            for (std::size_t ix = 0; ix < snx; ++ix) {
                const std::size_t id = iy * snx + ix;
                tl[ix] = -theta * h * co.cx_lo[id];
                td[ix] = 1.0 - theta * h * co.cx_di[id];
                tu[ix] = -theta * h * co.cx_up[id];
                tr[ix] = y0[id] - theta * h * fx[id];
            }
            std::vector<double> sol = solve_tridiagonal(
                {tl.begin(), tl.begin() + static_cast<std::ptrdiff_t>(snx)},
                {td.begin(), td.begin() + static_cast<std::ptrdiff_t>(snx)},
                {tu.begin(), tu.begin() + static_cast<std::ptrdiff_t>(snx)},
                {tr.begin(), tr.begin() + static_cast<std::ptrdiff_t>(snx)});
            for (std::size_t ix = 0; ix < snx; ++ix) y1[iy * snx + ix] = sol[ix];
        }
        // y sweep: (I - theta h Fy) u_new = y1 - theta h Fy u
        for (std::size_t ix = 0; ix < snx; ++ix) {
            for (std::size_t iy = 0; iy < sny; ++iy) {
                const std::size_t id = iy * snx + ix;
                tl[iy] = -theta * h * co.cy_lo[id];
                td[iy] = 1.0 - theta * h * co.cy_di[id];
                tu[iy] = -theta * h * co.cy_up[id];
                tr[iy] = y1[id] - theta * h * fy[id];
            }
            std::vector<double> sol = solve_tridiagonal(
                {tl.begin(), tl.begin() + static_cast<std::ptrdiff_t>(sny)},
                {td.begin(), td.begin() + static_cast<std::ptrdiff_t>(sny)},
                {tu.begin(), tu.begin() + static_cast<std::ptrdiff_t>(sny)},
                {tr.begin(), tr.begin() + static_cast<std::ptrdiff_t>(sny)});
            for (std::size_t iy = 0; iy < sny; ++iy) u[iy * snx + ix] = sol[iy];
        }

        std::copy(u.begin(), u.end(),
                  values.begin() + static_cast<std::ptrdiff_t>(nt - 1 - m) * n);
    }

    std::vector<double> ts(static_cast<std::size_t>(nt + 1));
    for (int i = 0; i <= nt; ++i) ts[static_cast<std::size_t>(i)] = problem.maturity * i / nt;
    return Surface2D(x, y, ts, std::move(values));
}

}  // namespace hedgelab
