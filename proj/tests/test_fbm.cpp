#include <gtest/gtest.h>

#include <cmath>

#include "hedgelab/fbm.hpp"
#include "hedgelab/math.hpp"

using namespace hedgelab;

namespace {

std::vector<double> increments(const PathSet& paths, std::size_t path) {
    const auto& B = paths.channel("B_H");
    const std::size_t nn = paths.n_nodes();
    std::vector<double> out(nn - 1);
    for (std::size_t k = 1; k < nn; ++k) out[k - 1] = B[path * nn + k] - B[path * nn + k - 1];
    return out;
}

double lag1_autocorr(const std::vector<double>& x) {
    const double m = sample_mean(x);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        den += (x[i] - m) * (x[i] - m);
        if (i + 1 < x.size()) num += (x[i] - m) * (x[i + 1] - m);
    }
    return num / den;
}

TEST(Fbm, BrownianLimitHasUncorrelatedIncrements) {
    FbmParams params{0.5, 100000, 1.0};
    PathSet paths = fbm_generate(params, 1, SeedSpec{61});
    const auto inc = increments(paths, 0);
    EXPECT_LT(std::abs(lag1_autocorr(inc)), 4.0 / std::sqrt(1e5));
    EXPECT_NEAR(sample_variance(inc), 1.0, 4.0 * std::sqrt(2.0 / (1e5 - 1.0)));
}

TEST(Fbm, LagOneAutocorrelationAtH07) {
    // fGn autocovariance: rho(1) = (2^{2H} - 2)/2 = 0.3195 at H = 0.7
    FbmParams params{0.7, 100000, 1.0};
    PathSet paths = fbm_generate(params, 1, SeedSpec{62});
    const auto inc = increments(paths, 0);
    EXPECT_NEAR(lag1_autocorr(inc), 0.3195079108, 0.01);
}

TEST(Fbm, VarianceOfUnitTimeValue) {
    FbmParams params{0.7, 64, 1.0 / 64.0};
    const std::size_t n = 20000;
    PathSet paths = fbm_generate(params, n, SeedSpec{63});
    const auto& B = paths.channel("B_H");
    const std::size_t nn = paths.n_nodes();
    std::vector<double> b1(n);
    for (std::size_t p = 0; p < n; ++p) b1[p] = B[p * nn + nn - 1];  // B at t = 1
    const double var = sample_variance(b1);
    EXPECT_LT(std::abs(var - 1.0), 4.0 * std::sqrt(2.0 / (n - 1.0)));
}

TEST(Fbm, SelfSimilarVarianceAcrossTimes) {
    FbmParams params{0.3, 128, 1.0 / 128.0};
    const std::size_t n = 20000;
    PathSet paths = fbm_generate(params, n, SeedSpec{64});
    const auto& B = paths.channel("B_H");
    const std::size_t nn = paths.n_nodes();
    for (std::size_t node : {std::size_t{32}, std::size_t{64}, std::size_t{128}}) {
        const double t = static_cast<double>(node) / 128.0;
        std::vector<double> bt(n);
        for (std::size_t p = 0; p < n; ++p) bt[p] = B[p * nn + node];
        const double want = std::pow(t, 2.0 * params.H);
        EXPECT_LT(std::abs(sample_variance(bt) - want),
                  4.0 * want * std::sqrt(2.0 / (n - 1.0)));
    }
}

TEST(Fbm, DenseFallbackFactorizationIsExact) {
    // the fallback Cholesky reproduces the fGn covariance: L L^T = Cov
    const int n = 48;
    const double H = 0.8;
    const auto L = detail::dense_fgn_cholesky(n, H);
    const std::size_t sn = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < sn; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < sn; ++k) s += L[i * sn + k] * L[j * sn + k];
            EXPECT_NEAR(s, detail::fgn_autocov(static_cast<int>(i - j), H), 1e-10);
        }
}

TEST(Fgbm, ConventionAndPositivity) {
    FbmParams params{0.5, 256, 1.0 / 256.0};
    PathSet fbm = fbm_generate(params, 200, SeedSpec{66});
    PathSet gbm = fgbm_path(0.05, 0.3, 2.0, fbm);
    const auto& D = gbm.channel("D");
    for (double d : D) EXPECT_GT(d, 0.0);

    // sigma_H = 0: deterministic exponential
    PathSet det = fgbm_path(0.05, 0.0, 2.0, fbm);
    const auto& Dd = det.channel("D");
    const std::size_t nn = det.n_nodes();
    EXPECT_NEAR(Dd[nn - 1], 2.0 * std::exp(0.05), 1e-12);

    // H = 1/2 reduction: log-increment variance is sigma^2 dt
    std::vector<double> logret;
    const std::size_t n_paths = 200;
    for (std::size_t p = 0; p < n_paths; ++p)
        for (std::size_t k = 1; k < nn; ++k)
            logret.push_back(std::log(D[p * nn + k] / D[p * nn + k - 1]));
    const double want = 0.3 * 0.3 / 256.0;
    EXPECT_LT(std::abs(sample_variance(logret) - want),
              4.0 * want * std::sqrt(2.0 / (logret.size() - 1.0)));
}

TEST(Lrd, WhiteNoiseDiagnostics) {
    CounterStream g(SeedSpec{67}, 0, channel::fbm);
    std::vector<double> series(100000);
    for (double& x : series) x = g.next_normal();
    const LrdReport rep = lrd_diagnostics(series);
    EXPECT_NEAR(rep.hurst_estimate, 0.5, 0.05);
    for (std::size_t lag = 1; lag < rep.acf.size(); ++lag)
        EXPECT_LT(std::abs(rep.acf[lag]), 4.0 / std::sqrt(1e5));
}

TEST(Lrd, RecoversHurstFromSyntheticFgn) {
    FbmParams params{0.8, 100000, 1.0};
    PathSet paths = fbm_generate(params, 1, SeedSpec{68});
    const auto inc = increments(paths, 0);
    const LrdReport rep = lrd_diagnostics(inc);
    EXPECT_NEAR(rep.hurst_estimate, 0.8, 0.07);
}

TEST(Lrd, InputValidation) {
    std::vector<double> tiny(100, 1.0);
    EXPECT_THROW(lrd_diagnostics(tiny), std::invalid_argument);
    std::vector<double> flat(1000, 3.14);
    EXPECT_THROW(lrd_diagnostics(flat), std::invalid_argument);
}

}  // namespace
