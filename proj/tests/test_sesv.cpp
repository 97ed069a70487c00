#include <gtest/gtest.h>

#include <cmath>

#include "hedgelab/math.hpp"
#include "hedgelab/parallel.hpp"
#include "hedgelab/sesv.hpp"

using namespace hedgelab;

namespace {

SesvParams quiet_sesv() {
    SesvParams p;
    p.vov = VovParams::make_default(0.1, 1.0, std::log(0.2), 0.3, 0.1);
    p.vov.rho_V = -0.5;
    p.hawkes_s = HawkesParams{2.0, 1.0, 0.0, 1.0};
    p.hawkes_v = HawkesParams{2.0, 1.0, 0.0, 1.0};
    p.jump_size_s = JumpSizeLaw::none();
    p.jump_size_v = JumpSizeLaw::none();
    return p;
}

TEST(Hawkes, ParamsValidation) {
    EXPECT_THROW((HawkesParams{1.0, 1.0, 1.5, 1.0}).validate(), std::invalid_argument);
    EXPECT_THROW((HawkesParams{1.0, 0.0, 0.5, 1.0}).validate(), std::invalid_argument);
    EXPECT_NO_THROW((HawkesParams{2.0, 1.0, 1.0, 1.0}).validate());
    EXPECT_NEAR((HawkesParams{2.0, 1.0, 1.0, 1.0}).stationary_mean_intensity(), 2.0, 1e-15);
}

TEST(Hawkes, PoissonLimitWithoutExcitation) {
    HawkesParams hp{2.0, 3.0, 0.0, 3.0};
    SeedSpec seed{51};
    TimeGrid grid(0.0, 10.0, 100);
    const std::size_t n = 4000;
    PathSet paths = simulate_hawkes(hp, grid, n, seed);
    const auto& N = paths.channel("N");
    const std::size_t nn = paths.n_nodes();
    std::vector<double> counts(n);
    for (std::size_t p = 0; p < n; ++p) counts[p] = N[p * nn + nn - 1];
    const double mean = sample_mean(counts);
    EXPECT_LT(std::abs(mean - 3.0 * 10.0), 4.0 * standard_error(counts));
    // Poisson dispersion: variance close to the mean
    EXPECT_NEAR(sample_variance(counts) / mean, 1.0, 0.1);
}

TEST(Hawkes, CountsAreNondecreasing) {
    HawkesParams hp{2.0, 1.0, 1.0, 1.0};
    SeedSpec seed{52};
    TimeGrid grid(0.0, 5.0, 50);
    PathSet paths = simulate_hawkes(hp, grid, 30, seed);
    const auto& N = paths.channel("N");
    const std::size_t nn = paths.n_nodes();
    for (std::size_t p = 0; p < 30; ++p)
        for (std::size_t k = 1; k < nn; ++k) {
            EXPECT_GE(N[p * nn + k], N[p * nn + k - 1]);
            EXPECT_GE(N[p * nn + k], 0.0);
        }
}

TEST(Hawkes, LongRunMeanIntensity) {
    // stationary moment alpha*lambda_inf/(alpha-beta) = 2 for (2, 1, 1)
    HawkesParams hp{2.0, 1.0, 1.0, 1.0};
    SeedSpec seed{53};
    TimeGrid grid(0.0, 500.0, 5000);
    const std::size_t n = 8;
    PathSet paths = simulate_hawkes(hp, grid, n, seed);
    const auto& L = paths.channel("lambda");
    const std::size_t nn = paths.n_nodes();
    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t k = nn / 10; k < nn; ++k) {  // drop burn-in
            acc += L[p * nn + k];
            ++cnt;
        }
    const double mean_intensity = acc / static_cast<double>(cnt);
    EXPECT_NEAR(mean_intensity, 2.0, 0.1);  // within 5%
}

TEST(Hawkes, CompensatedCountIsCentered) {
    HawkesParams hp{2.0, 1.0, 1.0, 1.0};
    SeedSpec seed{54};
    TimeGrid grid(0.0, 20.0, 400);
    const std::size_t n = 3000;
    PathSet paths = simulate_hawkes(hp, grid, n, seed);
    const auto& N = paths.channel("N");
    const auto& L = paths.channel("lambda");
    const std::size_t nn = paths.n_nodes();
    const double dt = grid.dt();
    std::vector<double> comp(n);
    for (std::size_t p = 0; p < n; ++p) {
        double integral = 0.0;  // trapezoid over the sampled intensity
        for (std::size_t k = 1; k < nn; ++k)
            integral += 0.5 * (L[p * nn + k] + L[p * nn + k - 1]) * dt;
        comp[p] = N[p * nn + nn - 1] - integral;
    }
    EXPECT_LT(std::abs(sample_mean(comp)), 4.0 * standard_error(comp) + 0.05);
}

TEST(Sesv, DegeneratesToVovWhenJumpsOff) {
    SesvParams p = quiet_sesv();
    SeedSpec seed{55};
    TimeGrid grid(0.0, 1.0, 64);
    const std::size_t n = 40000;
    PathSet a = simulate_sesv(p, 100.0, std::log(0.2), 1.0, grid, n, seed);
    PathSet b = simulate_vov(p.vov, 100.0, std::log(0.2), 1.0, grid, n, seed, Measure::P);
    const std::size_t nn = a.n_nodes();
    const auto& Sa = a.channel("S");
    const auto& Sb = b.channel("S");
    std::vector<double> ta(n), tb(n);
    for (std::size_t q = 0; q < n; ++q) {
        ta[q] = Sa[q * nn + nn - 1];
        tb[q] = Sb[q * nn + nn - 1];
    }
    const double se = std::sqrt(sample_variance(ta) / n + sample_variance(tb) / n);
    EXPECT_LT(std::abs(sample_mean(ta) - sample_mean(tb)), 4.0 * se);
}

TEST(Sesv, HomogeneousArrivalsWhenBetaZero) {
    SesvParams p = quiet_sesv();
    p.jump_size_s = JumpSizeLaw::two_point(-1.0, 1.0);
    SeedSpec seed{56};
    TimeGrid grid(0.0, 4.0, 64);
    const std::size_t n = 20000;
    PathSet paths = simulate_sesv(p, 100.0, std::log(0.2), 1.0, grid, n, seed);
    const auto& NS = paths.channel("N_S");
    const std::size_t nn = paths.n_nodes();
    std::vector<double> counts(n);
    for (std::size_t q = 0; q < n; ++q) counts[q] = NS[q * nn + nn - 1];
    const double mean = sample_mean(counts);
    EXPECT_LT(std::abs(mean - 1.0 * 4.0), 4.0 * standard_error(counts));
    EXPECT_NEAR(sample_variance(counts) / mean, 1.0, 0.1);
}

TEST(Sesv, ContagionRaisesPostArrivalIntensity) {
    SesvParams p = quiet_sesv();
    p.hawkes_s = HawkesParams{2.0, 1.0, 1.5, 1.0};
    p.jump_size_s = JumpSizeLaw::two_point(-1.0, 1.0);
    SeedSpec seed{57};
    TimeGrid grid(0.0, 10.0, 400);  // 0.1-year windows had better hold a node
    const std::size_t n = 10000;
    PathSet paths = simulate_sesv(p, 100.0, std::log(0.2), 1.0, grid, n, seed);
    const auto& NS = paths.channel("N_S");
    const auto& LS = paths.channel("lambda_S");
    const std::size_t nn = paths.n_nodes();
    double post = 0.0, all = 0.0;
    std::size_t post_cnt = 0, all_cnt = 0;
    const int window = 4;  // 4 nodes of 0.025y = the 0.1-year window
    for (std::size_t q = 0; q < n; ++q) {
        for (std::size_t k = 1; k < nn; ++k) {
            all += LS[q * nn + k];
            ++all_cnt;
            if (NS[q * nn + k] > NS[q * nn + k - 1]) {
                for (int w = 1; w <= window && k + static_cast<std::size_t>(w) < nn; ++w) {
                    post += LS[q * nn + k + static_cast<std::size_t>(w)];
                    ++post_cnt;
                }
            }
        }
    }
    EXPECT_GT(post / post_cnt, all / all_cnt);
}

TEST(JumpSecurity, AdditiveFormAndWaldMean) {
    SesvParams p = quiet_sesv();
    p.hawkes_s = HawkesParams{2.0, 1.0, 1.0, 1.0};
    p.jump_size_s = JumpSizeLaw::two_point(-0.5, 0.8);
    SeedSpec seed{58};
    TimeGrid grid(0.0, 2.0, 64);
    const std::size_t n = 20000;
    PathSet paths = simulate_sesv(p, 100.0, std::log(0.2), 1.0, grid, n, seed);
    PathSet sec = jump_security_paths(JumpChannel::stock, 0.05, paths, 1.0);
    const auto& M = sec.channel("M");
    const auto& NS = paths.channel("N_S");
    const std::size_t nn = paths.n_nodes();

    // no-arrival paths drift linearly (additive, not exponential)
    bool seen_flat = false;
    for (std::size_t q = 0; q < n && !seen_flat; ++q)
        if (NS[q * nn + nn - 1] == 0.0) {
            EXPECT_NEAR(M[q * nn + nn - 1], 1.0 + 0.05 * 2.0, 1e-12);
            seen_flat = true;
        }
    EXPECT_TRUE(seen_flat);

    // Wald identity: E[M_T] = M0 + m T + E[Z] E[N_T]
    std::vector<double> mt(n), nt(n);
    for (std::size_t q = 0; q < n; ++q) {
        mt[q] = M[q * nn + nn - 1];
        nt[q] = NS[q * nn + nn - 1];
    }
    const double want = 1.0 + 0.05 * 2.0 + (-0.5 * 0.8) * sample_mean(nt);
    EXPECT_LT(std::abs(sample_mean(mt) - want), 4.0 * standard_error(mt) + 0.02);

    // single-jump fixture: additive by exactly the mark
    PathSet single = jump_security_paths(JumpChannel::stock, 0.0, paths, 0.0);
    const auto& M0 = single.channel("M");
    const auto& JS = paths.channel("JS");
    for (std::size_t q = 0; q < 50; ++q)
        for (std::size_t k = 1; k < nn; ++k)
            EXPECT_NEAR(M0[q * nn + k] - M0[q * nn + k - 1], JS[q * nn + k], 1e-12);
}

TEST(Sesv, BitIdenticalAcrossCallsAndThreads) {
    SesvParams p = quiet_sesv();
    p.hawkes_s = HawkesParams{2.0, 1.0, 1.0, 1.0};
    p.jump_size_s = JumpSizeLaw::two_point(-0.5, 0.8);
    SeedSpec seed{60};
    TimeGrid grid(0.0, 1.0, 32);
    set_max_threads(1);
    PathSet a = simulate_sesv(p, 100.0, std::log(0.2), 1.0, grid, 64, seed);
    set_max_threads(4);
    PathSet b = simulate_sesv(p, 100.0, std::log(0.2), 1.0, grid, 64, seed);
    set_max_threads(0);
    for (const auto& name : a.channel_names()) EXPECT_EQ(a.channel(name), b.channel(name));
}

TEST(JumpSecurity, MissingChannelThrows) {
    SeedSpec seed{59};
    TimeGrid grid(0.0, 1.0, 4);
    PathSet bare(grid, 2, seed);
    bare.add_channel("S");
    EXPECT_THROW(jump_security_paths(JumpChannel::stock, 0.05, bare, 0.0),
                 std::invalid_argument);
}

}  // namespace
