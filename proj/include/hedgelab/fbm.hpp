#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hedgelab/market.hpp"
#include "hedgelab/math.hpp"
#include "hedgelab/parallel.hpp"
#include "hedgelab/paths.hpp"
#include "hedgelab/rng.hpp"

namespace hedgelab {

struct FbmParams {
    double H = 0.5;  // Hurst index in (0,1)
    int n = 0;       // number of increments
    double dt = 0.0;

    void validate() const {
        if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("FbmParams: H must be in (0,1)");
        if (n < 2) throw std::invalid_argument("FbmParams: n must be >= 2");
        if (!(dt > 0.0)) throw std::invalid_argument("FbmParams: dt must be > 0");
    }
};

namespace detail {

// Autocovariance of unit-step fractional Gaussian noise.
inline double fgn_autocov(int k, double H) {
    const double a = std::abs(static_cast<double>(k));
    return 0.5 * (std::pow(a + 1.0, 2.0 * H) - 2.0 * std::pow(a, 2.0 * H) +
                  std::pow(std::abs(a - 1.0), 2.0 * H));
}

struct CirculantEmbedding {
    std::size_t m = 0;
    std::vector<double> sqrt_eig;  // sqrt(lambda_k / m)
    bool ok = false;
};

inline CirculantEmbedding build_embedding(int n, double H) {
    std::size_t m = 1;
    while (m < 2 * static_cast<std::size_t>(n)) m <<= 1;
    std::vector<std::complex<double>> c(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t lag = std::min(j, m - j);
        c[j] = fgn_autocov(static_cast<int>(lag), H);
    }
    fft_pow2(c, -1);
    CirculantEmbedding emb;
    emb.m = m;
    emb.sqrt_eig.resize(m);
    double min_eig = 0.0, max_eig = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double lam = c[k].real();
        min_eig = std::min(min_eig, lam);
        max_eig = std::max(max_eig, lam);
        emb.sqrt_eig[k] = std::sqrt(std::max(lam, 0.0) / static_cast<double>(m));
    }
    emb.ok = min_eig >= -1e-9 * std::max(1.0, max_eig);
    return emb;
}

// Dense fallback: Cholesky factor of the fGn covariance (small n only).
inline std::vector<double> dense_fgn_cholesky(int n, double H) {
    const std::size_t sn = static_cast<std::size_t>(n);
    std::vector<double> L(sn * sn, 0.0);
    for (std::size_t i = 0; i < sn; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = fgn_autocov(static_cast<int>(i - j), H);
            for (std::size_t k = 0; k < j; ++k) s -= L[i * sn + k] * L[j * sn + k];
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("fbm_generate: covariance not PSD");
                L[i * sn + i] = std::sqrt(s);
            } else {
                L[i * sn + j] = s / L[j * sn + j];
            }
        }
    }
    return L;
}

}  // namespace detail

// Fractional Brownian motion by exact-covariance synthesis: circulant
// embedding of the fGn covariance (FFT sampling), with a dense Cholesky
// fallback for small n if the embedding fails to be nonnegative definite.
// Channel "B_H" holds n+1 nodes starting at 0 on the grid t = 0..n*dt.
inline PathSet fbm_generate(const FbmParams& params, std::size_t n_paths, SeedSpec seed,
                            std::uint64_t path_begin = 0) {
    params.validate();
    const int n = params.n;
    const double scale = std::pow(params.dt, params.H);

    const detail::CirculantEmbedding emb = detail::build_embedding(n, params.H);
    std::vector<double> dense_L;
    if (!emb.ok) {
        if (n > 4096)
            throw std::runtime_error(
                "fbm_generate: circulant embedding not PSD and n too large for dense fallback");
        dense_L = detail::dense_fgn_cholesky(n, params.H);
    }

    TimeGrid grid(0.0, params.dt * n, n);
    PathSet out(grid, n_paths, seed, path_begin);
    auto& B = out.add_channel("B_H");
    const std::size_t nn = out.n_nodes();

    parallel_for(n_paths, [&](std::size_t p) {
        CounterStream g(seed, path_begin + p, channel::fbm);
        std::vector<double> fgn(static_cast<std::size_t>(n));
        if (emb.ok) {
            const std::size_t m = emb.m;
            std::vector<std::complex<double>> w(m);
            w[0] = emb.sqrt_eig[0] * g.next_normal();
            w[m / 2] = emb.sqrt_eig[m / 2] * g.next_normal();
            const double half = 1.0 / std::sqrt(2.0);
            for (std::size_t k = 1; k < m / 2; ++k) {
                const double re = g.next_normal(), im = g.next_normal();
                w[k] = emb.sqrt_eig[k] * half * std::complex<double>(re, im);
                w[m - k] = std::conj(w[k]);
            }
            fft_pow2(w, -1);
            for (int j = 0; j < n; ++j) fgn[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(j)].real();
        } else {
            const std::size_t sn = static_cast<std::size_t>(n);
            std::vector<double> z(sn);
            for (std::size_t i = 0; i < sn; ++i) z[i] = g.next_normal();
            for (std::size_t i = sn; i-- > 0;) {
                double s = 0.0;
                for (std::size_t k = 0; k <= i; ++k) s += dense_L[i * sn + k] * z[k];
                fgn[i] = s;
            }
        }
        double b = 0.0;
        B[p * nn] = 0.0;
        for (int k = 1; k < static_cast<int>(nn); ++k) {
            b += scale * fgn[static_cast<std::size_t>(k - 1)];
            B[p * nn + static_cast<std::size_t>(k)] = b;
        }
    });
    return out;
}

// Geometric exponential of FBM (pathwise convention):
// D_t = D0 exp(mu_H t + sigma_H B^H_t). Channel "D".
inline PathSet fgbm_path(double mu_H, double sigma_H, double D0, const PathSet& fbm) {
    if (!(D0 > 0.0)) throw std::invalid_argument("fgbm_path: D0 must be > 0");
    const auto& B = fbm.channel("B_H");
    PathSet out(fbm.grid(), fbm.n_paths(), fbm.seed(), fbm.path_begin());
    auto& D = out.add_channel("D");
    const std::size_t nn = out.n_nodes();
    const TimeGrid& g = fbm.grid();
    for (std::size_t p = 0; p < fbm.n_paths(); ++p)
        for (std::size_t k = 0; k < nn; ++k)
            D[p * nn + k] = D0 * std::exp(mu_H * (g.node(static_cast<int>(k)) - g.t0) +
                                          sigma_H * B[p * nn + k]);
    return out;
}

// Long-range-dependence diagnostics: sample ACF to lag 100 and the
// aggregated-variance estimate of the Hurst index. Descriptive only.
struct LrdReport {
    std::vector<double> acf;          // lags 0..100 (clipped to series length)
    double variance_plot_slope = 0.0; // slope of log Var(block mean) vs log block
    double hurst_estimate = 0.0;      // 1 + slope/2
};

inline LrdReport lrd_diagnostics(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 256) throw std::invalid_argument("lrd_diagnostics: series length must be >= 256");
    const auto [mn, mx] = std::minmax_element(series.begin(), series.end());
    if (*mn == *mx) throw std::invalid_argument("degenerate variance");
    const double mean = sample_mean(series);
    double var0 = 0.0;
    for (double x : series) var0 += (x - mean) * (x - mean);
    var0 /= static_cast<double>(n);
    if (var0 == 0.0) throw std::invalid_argument("degenerate variance");

    LrdReport rep;
    const std::size_t max_lag = std::min<std::size_t>(100, n - 1);
    rep.acf.resize(max_lag + 1);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += (series[i] - mean) * (series[i + lag] - mean);
        rep.acf[lag] = s / static_cast<double>(n) / var0;
    }

    // aggregated-variance method: variance of block means over dyadic sizes
    std::vector<double> log_m, log_v;
    for (std::size_t m = 1; m <= n / 16; m *= 2) {
        const std::size_t blocks = n / m;
        if (blocks < 8) break;
        std::vector<double> means(blocks);
        for (std::size_t b = 0; b < blocks; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += series[b * m + i];
            means[b] = s / static_cast<double>(m);
        }
        log_m.push_back(std::log(static_cast<double>(m)));
        log_v.push_back(std::log(sample_variance(means)));
    }
    rep.variance_plot_slope = regression_slope(log_m, log_v);
    rep.hurst_estimate = 1.0 + rep.variance_plot_slope / 2.0;
    return rep;
}

}  // namespace hedgelab
