#include <gtest/gtest.h>

#include <cmath>

#include "hedgelab/bsm.hpp"
#include "hedgelab/equations.hpp"
#include "hedgelab/pde1d.hpp"

using namespace hedgelab;

namespace {

const MarketParams kMarket{0.1, 0.2, 0.05};
const PayoffSpec kCall = PayoffSpec::call_option(100.0);

TEST(Pde1d, TerminalSliceEqualsPayoff) {
    const auto pb = bsm_problem(kMarket, kCall, 1.0, Grid1dSpec::around(100.0, 101, 40));
    const Surface1D surf = solve_pde_1d(pb, SolverConfig{});
    const auto& xs = surf.x_nodes();
    const std::size_t last = surf.t_nodes().size() - 1;
    for (std::size_t j = 0; j < xs.size(); ++j)
        EXPECT_NEAR(surf.node_value(last, j), kCall(xs[j]), 1e-14);
}

TEST(Pde1d, BsmPresetMatchesClosedForm) {
    const auto pb = bsm_problem(kMarket, kCall, 1.0, Grid1dSpec::around(100.0, 400, 400));
    const Surface1D surf = solve_pde_1d(pb, SolverConfig{});
    const double want = bsm_closed_form(kMarket, kCall, 100.0, 1.0);
    EXPECT_NEAR(surf.value_at(100.0, 0.0), want, 0.01);
}

TEST(Pde1d, GridHalvingReducesError) {
    const double want = bsm_closed_form(kMarket, kCall, 100.0, 1.0);
    auto err = [&](int n) {
        const auto pb = bsm_problem(kMarket, kCall, 1.0, Grid1dSpec::around(100.0, n, n));
        return std::abs(solve_pde_1d(pb, SolverConfig{}).value_at(100.0, 0.0) - want);
    };
    EXPECT_GE(err(100) / err(200), 3.0);
}

TEST(Pde1d, ConstantDataDiscounts) {
    PayoffSpec flat = PayoffSpec::custom_table({1.0, 1e4}, {3.0, 3.0});
    Grid1dSpec g = Grid1dSpec::around(100.0, 51, 1000);
    const auto pb = bsm_problem(kMarket, flat, 1.0, g);
    const Surface1D surf = solve_pde_1d(pb, SolverConfig{});
    EXPECT_NEAR(surf.value_at(100.0, 0.0), 3.0 * std::exp(-kMarket.r), 1e-8);
}

TEST(Pde1d, CallMonotoneInPrice) {
    const auto pb = bsm_problem(kMarket, kCall, 1.0, Grid1dSpec::around(100.0, 201, 100));
    const Surface1D surf = solve_pde_1d(pb, SolverConfig{});
    for (std::size_t it = 0; it < surf.t_nodes().size(); ++it)
        for (std::size_t j = 1; j < surf.x_nodes().size(); ++j)
            EXPECT_GE(surf.node_value(it, j) - surf.node_value(it, j - 1), -1e-9);
}

TEST(Pde1d, DividendPresetCoefficients) {
    // zero yield: coefficient packs agree pointwise with the frictionless one
    const Grid1dSpec g = Grid1dSpec::around(100.0, 51, 20);
    const auto plain = bsm_problem(kMarket, kCall, 1.0, g);
    const auto div0 = dividend_problem(kMarket, 0.0, kCall, 1.0, g);
    for (double x : {40.0, 100.0, 260.0})
        for (double t : {0.0, 0.5, 1.0}) {
            EXPECT_NEAR(div0.drift(x, t), plain.drift(x, t), 1e-12);
            EXPECT_NEAR(div0.discount(x, t), plain.discount(x, t), 1e-12);
            EXPECT_NEAR(div0.diffusion(x, t), plain.diffusion(x, t), 1e-12);
        }
    // with a yield the drift rate drops by it
    const auto div = dividend_problem(kMarket, 0.03, kCall, 1.0, g);
    EXPECT_NEAR(div.drift(100.0, 0.0), kMarket.r - 0.03, 1e-15);
}

TEST(Pde1d, StateDependentPresetRunsBsmShape) {
    // constant coefficient functions reproduce the constant-parameter price
    const auto pb = bsm_state_dependent_problem(
        [](double, double) { return 0.05; }, [](double, double) { return 0.2; }, kCall, 1.0,
        Grid1dSpec::around(100.0, 200, 200));
    const Surface1D surf = solve_pde_1d(pb, SolverConfig{});
    EXPECT_NEAR(surf.value_at(100.0, 0.0), bsm_closed_form(kMarket, kCall, 100.0, 1.0), 0.02);
}

TEST(Pde1d, FractionalPresetEqualsBsmPreset) {
    const Grid1dSpec g = Grid1dSpec::around(100.0, 200, 200);
    const Surface1D frac = solve_pde_1d(fractional_doping_problem(kMarket, kCall, 1.0, g),
                                        SolverConfig{});
    const Surface1D plain = solve_pde_1d(bsm_problem(kMarket, kCall, 1.0, g), SolverConfig{});
    EXPECT_NEAR(frac.value_at(100.0, 0.0), plain.value_at(100.0, 0.0), 1e-10);
}

TEST(Pde1d, FrictionCorrectedReducesToBsmAtZeroEps) {
    const Grid1dSpec g = Grid1dSpec::around(100.0, 200, 200);
    const Surface1D fric = solve_pde_1d(
        friction_problem(kMarket, FrictionParams{0.0}, kCall, 1.0, g), SolverConfig{});
    const Surface1D plain = solve_pde_1d(bsm_problem(kMarket, kCall, 1.0, g), SolverConfig{});
    EXPECT_NEAR(fric.value_at(100.0, 0.0), plain.value_at(100.0, 0.0), 1e-10);
    EXPECT_NEAR(friction_gamma_corrected(kMarket, FrictionParams{0.0}), 0.0, 1e-14);
}

TEST(Pde1d, FrictionLiteralRateDoesNotVanishAtZeroEps) {
    // the displayed cost rate has Gamma(t,0) != 0; both variants are exposed
    const double g0 = friction_gamma_literal(kMarket, FrictionParams{0.0}, 100.0);
    EXPECT_GT(std::abs(g0), 1e-3);
    const Grid1dSpec g = Grid1dSpec::around(100.0, 150, 150);
    const Surface1D lit = solve_pde_1d(
        friction_problem(kMarket, FrictionParams{0.0}, kCall, 1.0, g,
                         FrictionGammaMode::paper_literal),
        SolverConfig{});
    const Surface1D plain = solve_pde_1d(bsm_problem(kMarket, kCall, 1.0, g), SolverConfig{});
    EXPECT_GT(std::abs(lit.value_at(100.0, 0.0) - plain.value_at(100.0, 0.0)), 0.05);
}

TEST(Pde1d, FrictionPositiveEpsShiftsPrice) {
    const Grid1dSpec g = Grid1dSpec::around(100.0, 150, 150);
    const Surface1D fric = solve_pde_1d(
        friction_problem(kMarket, FrictionParams{0.05}, kCall, 1.0, g), SolverConfig{});
    const Surface1D plain = solve_pde_1d(bsm_problem(kMarket, kCall, 1.0, g), SolverConfig{});
    EXPECT_GT(std::abs(fric.value_at(100.0, 0.0) - plain.value_at(100.0, 0.0)), 1e-4);
}

TEST(Pde1d, ValidationErrors) {
    Grid1dSpec g = Grid1dSpec::around(100.0, 50, 50);
    auto pb = bsm_problem(kMarket, kCall, 1.0, g);
    pb.n_x = 2;
    EXPECT_THROW(solve_pde_1d(pb, SolverConfig{}), std::invalid_argument);

    auto neg = bsm_problem(kMarket, kCall, 1.0, g);
    neg.diffusion = [](double, double) { return -1.0; };
    EXPECT_THROW(solve_pde_1d(neg, SolverConfig{}), std::invalid_argument);

    auto outside = bsm_problem(kMarket, PayoffSpec::call_option(1e6), 1.0, g);
    EXPECT_THROW(solve_pde_1d(outside, SolverConfig{}), std::invalid_argument);

    SolverConfig bad;
    bad.theta = 1.5;
    EXPECT_THROW(solve_pde_1d(bsm_problem(kMarket, kCall, 1.0, g), bad), std::invalid_argument);
}

TEST(Pde1d, DirichletBoundaryModeStillPrices) {
    SolverConfig cfg;
    cfg.boundary = BoundaryKind::dirichlet_payoff_asymptote;
    const auto pb = bsm_problem(kMarket, kCall, 1.0, Grid1dSpec::around(100.0, 300, 300, 3.0));
    const Surface1D surf = solve_pde_1d(pb, cfg);
    EXPECT_NEAR(surf.value_at(100.0, 0.0), bsm_closed_form(kMarket, kCall, 100.0, 1.0), 0.02);
}

}  // namespace
