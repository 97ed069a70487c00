#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hedgelab {

// Standard normal density and distribution. The CDF goes through erfc so the
// absolute error stays below 1e-15 over the whole line; this is the tolerance
// the closed-form option oracle budgets for.
inline double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Thomas algorithm for a tridiagonal system. `lower[0]` and `upper[n-1]` are
// ignored. Overwrites nothing; returns the solution.
inline std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper,
                                             const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n)
        throw std::invalid_argument("solve_tridiagonal: size mismatch");
    std::vector<double> c(n), d(n);
    double beta = diag[0];
    if (beta == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot");
    c[0] = upper[0] / beta;
    d[0] = rhs[0] / beta;
    for (std::size_t i = 1; i < n; ++i) {
        beta = diag[i] - lower[i] * c[i - 1];
        if (beta == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot");
        c[i] = upper[i] / beta;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] += -c[i] * d[i + 1];
    return d;
}

// Monotone cubic (Fritsch-Carlson) interpolant on strictly increasing
// abscissae. Shape-preserving: no overshoot next to kinks, which matters when
// a PIDE slice is sampled at shifted nodes.
class MonotoneCubic {
  public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("MonotoneCubic: need >=2 matching nodes");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("MonotoneCubic: abscissae not increasing");
        slope_.resize(n);
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        slope_[0] = d[0];
        slope_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                slope_[i] = 0.0;
            } else {
                const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
                const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
                slope_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        // Fritsch-Carlson limiter on the end slopes
        for (std::size_t i : {std::size_t{0}, n - 1}) {
            const double dd = (i == 0) ? d[0] : d[n - 2];
            if (dd == 0.0) slope_[i] = 0.0;
            else if (slope_[i] / dd < 0.0) slope_[i] = 0.0;
            else if (std::abs(slope_[i]) > 3.0 * std::abs(dd)) slope_[i] = 3.0 * dd;
        }
    }

    // Evaluates inside the node range; clamps to linear extension outside.
    double operator()(double x) const {
        const std::size_t n = x_.size();
        if (x <= x_[0]) return y_[0] + slope_[0] * (x - x_[0]);
        if (x >= x_[n - 1]) return y_[n - 1] + slope_[n - 1] * (x - x_[n - 1]);
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
    }

  private:
    std::vector<double> x_, y_, slope_;
};

// In-place iterative radix-2 FFT; size must be a power of two.
// sign = -1 forward, +1 inverse (inverse is unnormalized).
inline void fft_pow2(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_pow2: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

inline double sample_mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("sample_mean: empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) throw std::invalid_argument("sample_variance: need >=2 points");
    const double m = sample_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

inline double standard_error(const std::vector<double>& v) {
    return std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
}

// Least-squares slope of y against x.
inline double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("regression_slope: need >=2 matching points");
    const double mx = sample_mean(x), my = sample_mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("regression_slope: degenerate abscissae");
    return sxy / sxx;
}

// Safeguarded root refinement: Newton steps with numeric derivative, falling
// back to bisection whenever a step leaves the bracket [lo, hi].
inline double refine_root(const std::function<double(double)>& f, double lo, double hi,
                          double f_lo, int max_iter = 200) {
    double a = lo, b = hi, fa = f_lo;
    double x = 0.5 * (a + b);
    for (int it = 0; it < max_iter; ++it) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx < 0.0) == (fa < 0.0)) { a = x; fa = fx; } else { b = x; }
        const double h = std::max(1e-7, 1e-7 * std::abs(x));
        const double dfx = (f(x + h) - f(x - h)) / (2.0 * h);
        double next = (dfx != 0.0) ? x - fx / dfx : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (std::abs(next - x) < 1e-16 * (1.0 + std::abs(x)) && std::abs(fx) < 1e-12)
            return next;
        x = next;
    }
    return x;
}

}  // namespace hedgelab
