// Configuration-driven front end: price, simulate, hedge, verify and diag
// subcommands emitting deterministic CSV tables.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "hedgelab/hedgelab.hpp"

namespace hl = hedgelab;

namespace {

struct CliOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

hl::TimeGrid grid_from(const hl::RunConfig& cfg) {
    return hl::TimeGrid(cfg.get_double("numerics", "t0", 0.0), cfg.get_double("numerics", "T"),
                        static_cast<int>(cfg.get_int("numerics", "n_steps")));
}

hl::SeedSpec seed_from(const hl::RunConfig& cfg, const CliOptions& opt) {
    if (opt.seed_set) return {opt.seed};
    return {static_cast<std::uint64_t>(cfg.get_int("numerics", "seed", 1))};
}

std::size_t paths_from(const hl::RunConfig& cfg) {
    const long n = cfg.get_int("numerics", "n_paths");
    if (n < 1) throw hl::ConfigError("config key numerics.n_paths: must be >= 1");
    return static_cast<std::size_t>(n);
}

hl::PayoffSpec payoff_from(const hl::RunConfig& cfg) {
    const std::string kind = cfg.get_string("instrument", "payoff", "call");
    if (kind == "call") return hl::PayoffSpec::call_option(cfg.get_double("instrument", "strike"));
    if (kind == "put") return hl::PayoffSpec::put_option(cfg.get_double("instrument", "strike"));
    throw hl::ConfigError("config key instrument.payoff: unknown kind " + kind);
}

hl::MarketParams market_from(const hl::RunConfig& cfg) {
    try {
        return hl::MarketParams(cfg.get_double("model", "mu", 0.0),
                                cfg.get_double("model", "sigma"),
                                cfg.get_double("model", "r"));
    } catch (const std::invalid_argument& e) {
        throw hl::ConfigError(std::string("config section model: ") + e.what());
    }
}

hl::SvParams sv_from(const hl::RunConfig& cfg) {
    hl::SvParams sv;
    sv.alpha = cfg.get_double("model", "sv_alpha");
    sv.m = cfg.get_double("model", "sv_m");
    sv.phi = cfg.get_double("model", "sv_phi");
    sv.rho = cfg.get_double("model", "sv_rho");
    const std::string fn = cfg.get_string("model", "sigma_fn", "exp");
    if (fn == "exp") sv.sigma_fn = hl::SigmaSpec::exp_y();
    else if (fn == "abs") sv.sigma_fn = hl::SigmaSpec::abs_y();
    else if (fn == "sqrtplus") sv.sigma_fn = hl::SigmaSpec::sqrtplus_y();
    else throw hl::ConfigError("config key model.sigma_fn: unknown preset " + fn);
    try {
        sv.validate();
    } catch (const std::invalid_argument& e) {
        throw hl::ConfigError(std::string("config section model: ") + e.what());
    }
    return sv;
}

hl::JumpParams jump_from(const hl::RunConfig& cfg) {
    hl::JumpParams jp;
    jp.alpha = cfg.get_double("model", "alpha", cfg.get_double("model", "mu", 0.0));
    jp.lambda = cfg.get_double("model", "lambda");
    jp.psi = cfg.get_double("model", "psi");
    jp.p = cfg.get_double("model", "p", 1.0);
    try {
        jp.validate();
    } catch (const std::invalid_argument& e) {
        throw hl::ConfigError(std::string("config section model: ") + e.what());
    }
    return jp;
}

std::string out_file(const CliOptions& opt, const std::string& name) {
    std::filesystem::create_directories(opt.out_dir);
    return (std::filesystem::path(opt.out_dir) / name).string();
}

void write_paths_csv(const hl::PathSet& paths, const std::string& file) {
    std::vector<std::string> cols{"t", "path_id"};
    for (const auto& n : paths.channel_names()) cols.push_back(n);
    hl::ResultTable table(cols);
    const std::size_t nn = paths.n_nodes();
    for (std::size_t p = 0; p < paths.n_paths(); ++p) {
        for (std::size_t k = 0; k < nn; ++k) {
            std::vector<std::string> row;
            row.push_back(hl::format_double(paths.grid().node(static_cast<int>(k))));
            row.push_back(std::to_string(p));
            for (const auto& n : paths.channel_names())
                row.push_back(hl::format_double(paths.at(paths.channel(n), p, k)));
            table.push_row(std::move(row));
        }
    }
    table.write_csv(file);
}

// ---------------------------------------------------------------------------

int cmd_price(const hl::RunConfig& cfg, const CliOptions& opt) {
    const std::string model = cfg.get_string("model", "type");
    const hl::PayoffSpec payoff = payoff_from(cfg);
    const double T = cfg.get_double("numerics", "T");
    const double S0 = cfg.get_double("model", "S0", 100.0);
    hl::ResultTable table({"model", "method", "price", "std_error"});

    if (model == "gbm") {
        const hl::MarketParams mkt = market_from(cfg);
        const double closed = hl::bsm_closed_form(mkt, payoff, S0, T);
        table.row().add(model).add("closed_form").add(closed).add(0.0);
        if (cfg.get_int("numerics", "pde", 0) != 0) {
            const auto g = hl::Grid1dSpec::around(
                payoff.strike, static_cast<int>(cfg.get_int("numerics", "n_x", 400)),
                static_cast<int>(cfg.get_int("numerics", "n_t", 400)),
                cfg.get_double("numerics", "x_width", 2.0));
            const hl::Surface1D surf =
                hl::solve_pde_1d(hl::bsm_problem(mkt, payoff, T, g), hl::SolverConfig{});
            table.row().add(model).add("pde").add(surf.value_at(S0, 0.0)).add(0.0);
        }
    } else if (model == "merton") {
        const hl::JumpParams jp = jump_from(cfg);
        const double sigma = cfg.get_double("model", "sigma");
        const double r = cfg.get_double("model", "r");
        const auto g = hl::Grid1dSpec::around(
            payoff.strike, static_cast<int>(cfg.get_int("numerics", "n_x", 400)),
            static_cast<int>(cfg.get_int("numerics", "n_t", 400)),
            cfg.get_double("numerics", "x_width", 2.5));
        const std::string variant = cfg.get_string("model", "variant", "eq20");
        if (variant == "eq20") {
            const hl::Surface1D surf =
                hl::solve_pide_1d(hl::merton_pide_problem(jp, sigma, r, payoff, T, g),
                                  hl::SolverConfig{}, hl::PideVariant::merton_eq20);
            table.row().add(model).add("pide_eq20").add(surf.value_at(S0, 0.0)).add(0.0);
        } else if (variant == "prop8") {
            const auto built = hl::prop8_pide_problem(jp, sigma, r, payoff, T, g);
            const hl::Surface1D surf =
                hl::solve_pide_1d(built.problem, hl::SolverConfig{}, hl::PideVariant::prop8);
            table.row().add(model).add("pide_prop8").add(surf.value_at(S0, 0.0)).add(0.0);
        } else {
            throw hl::ConfigError("config key model.variant: unknown variant " + variant);
        }
    } else if (model == "sv") {
        const hl::SvParams sv = sv_from(cfg);
        const double r = cfg.get_double("model", "r");
        hl::Grid2dSpec g;
        g.x_min = payoff.strike * std::exp(-cfg.get_double("numerics", "x_width", 2.5));
        g.x_max = payoff.strike * std::exp(cfg.get_double("numerics", "x_width", 2.5));
        g.y_min = cfg.get_double("numerics", "y_min", sv.m - 2.0);
        g.y_max = cfg.get_double("numerics", "y_max", sv.m + 2.0);
        g.n_x = static_cast<int>(cfg.get_int("numerics", "n_x", 200));
        g.n_y = static_cast<int>(cfg.get_int("numerics", "n_y", 80));
        g.n_t = static_cast<int>(cfg.get_int("numerics", "n_t", 200));
        const hl::Surface2D surf =
            hl::solve_pde_2d(hl::sv_prop12_problem(sv, r, payoff, T, g), hl::SolverConfig{});
        const double V0 = cfg.get_double("model", "V0", sv.m);
        table.row().add(model).add("pde_adi").add(surf.value_at(S0, V0, 0.0)).add(0.0);
        if (cfg.get_int("numerics", "mc", 0) != 0) {
            const hl::TimeGrid grid = grid_from(cfg);
            const hl::SeedSpec seed = seed_from(cfg, opt);
            const std::size_t n_paths = paths_from(cfg);
            const hl::McPrice mc = hl::mc_price_blocked(
                n_paths, 1 << 16, payoff, r, T, [&](std::uint64_t begin, std::size_t count) {
                    return hl::simulate_sv(sv, 0.0, S0, V0, grid, count, seed, hl::Measure::Q,
                                           r, begin);
                });
            table.row().add(model).add("mc").add(mc.price).add(mc.std_error);
        }
    } else if (model == "vov") {
        hl::VovParams vov = hl::VovParams::make_default(
            cfg.get_double("model", "mu", 0.0), cfg.get_double("model", "vov_alpha", 1.0),
            cfg.get_double("model", "vov_m", 0.0), cfg.get_double("model", "vov_phi", 0.0),
            cfg.get_double("model", "vov_psi", 0.0));
        vov.rho_V = cfg.get_double("model", "rho_V", 0.0);
        vov.rho_v = cfg.get_double("model", "rho_v", 0.0);
        vov.varrho = cfg.get_double("model", "varrho", 0.0);
        const double r = cfg.get_double("model", "r");
        const hl::TimeGrid grid = grid_from(cfg);
        const hl::SeedSpec seed = seed_from(cfg, opt);
        const double V0 = cfg.get_double("model", "V0", 0.0);
        const double v0 = cfg.get_double("model", "v0", 1.0);
        const hl::McPrice mc = hl::mc_price_blocked(
            paths_from(cfg), 1 << 16, payoff, r, T,
            [&](std::uint64_t begin, std::size_t count) {
                return hl::simulate_vov(vov, S0, V0, v0, grid, count, seed, hl::Measure::Q, r,
                                        begin);
            });
        table.row().add(model).add("mc").add(mc.price).add(mc.std_error);
    } else {
        throw hl::ConfigError("config key model.type: model " + model + " is not priceable");
    }
    table.write_csv(out_file(opt, "price.csv"));
    return 0;
}

int cmd_simulate(const hl::RunConfig& cfg, const CliOptions& opt) {
    const std::string model = cfg.get_string("model", "type");
    const hl::TimeGrid grid = grid_from(cfg);
    const hl::SeedSpec seed = seed_from(cfg, opt);
    const std::size_t n_paths = paths_from(cfg);
    const double S0 = cfg.get_double("model", "S0", 100.0);

    hl::PathSet paths;
    if (model == "gbm") {
        paths = hl::simulate_gbm(market_from(cfg), S0, grid, n_paths, seed, hl::Measure::P);
    } else if (model == "merton") {
        paths = hl::simulate_merton(jump_from(cfg), cfg.get_double("model", "sigma"), S0, grid,
                                    n_paths, seed, hl::Measure::P);
    } else if (model == "jumpz") {
        paths = hl::simulate_jumpz(jump_from(cfg), cfg.get_double("model", "sigma"),
                                   cfg.get_double("model", "a_z"), cfg.get_double("model", "b_z"),
                                   S0, cfg.get_double("model", "z0", 1.0), grid, n_paths, seed,
                                   cfg.get_double("model", "z_corr", 1.0));
    } else if (model == "sv") {
        paths = hl::simulate_sv(sv_from(cfg), cfg.get_double("model", "mu", 0.0), S0,
                                cfg.get_double("model", "V0"), grid, n_paths, seed,
                                hl::Measure::P);
    } else if (model == "vov") {
        hl::VovParams vov = hl::VovParams::make_default(
            cfg.get_double("model", "mu", 0.0), cfg.get_double("model", "vov_alpha", 1.0),
            cfg.get_double("model", "vov_m", 0.0), cfg.get_double("model", "vov_phi", 0.0),
            cfg.get_double("model", "vov_psi", 0.0));
        vov.rho_V = cfg.get_double("model", "rho_V", 0.0);
        vov.rho_v = cfg.get_double("model", "rho_v", 0.0);
        vov.varrho = cfg.get_double("model", "varrho", 0.0);
        paths = hl::simulate_vov(vov, S0, cfg.get_double("model", "V0", 0.0),
                                 cfg.get_double("model", "v0", 1.0), grid, n_paths, seed,
                                 hl::Measure::P);
    } else if (model == "sesv") {
        hl::SesvParams p;
        p.vov = hl::VovParams::make_default(
            cfg.get_double("model", "mu", 0.0), cfg.get_double("model", "vov_alpha", 1.0),
            cfg.get_double("model", "vov_m", 0.0), cfg.get_double("model", "vov_phi", 0.0),
            cfg.get_double("model", "vov_psi", 0.0));
        p.hawkes_s = hl::HawkesParams{
            cfg.get_double("model", "hawkes_alpha", 2.0),
            cfg.get_double("model", "hawkes_lambda_inf", 1.0),
            cfg.get_double("model", "hawkes_beta", 0.0),
            cfg.get_double("model", "hawkes_lambda0", 1.0)};
        p.hawkes_v = p.hawkes_s;
        p.jump_size_s = hl::JumpSizeLaw::two_point(cfg.get_double("model", "jump_s", 0.0), 1.0);
        p.jump_size_v = hl::JumpSizeLaw::two_point(cfg.get_double("model", "jump_v", 0.0), 1.0);
        paths = hl::simulate_sesv(p, S0, cfg.get_double("model", "V0", 0.0),
                                  cfg.get_double("model", "v0", 1.0), grid, n_paths, seed);
    } else if (model == "hawkes") {
        hl::HawkesParams hp{
            cfg.get_double("model", "hawkes_alpha"), cfg.get_double("model", "hawkes_lambda_inf"),
            cfg.get_double("model", "hawkes_beta"), cfg.get_double("model", "hawkes_lambda0")};
        paths = hl::simulate_hawkes(hp, grid, n_paths, seed);
    } else if (model == "fbm") {
        hl::FbmParams fp;
        fp.H = cfg.get_double("model", "H");
        fp.n = static_cast<int>(cfg.get_int("numerics", "n_steps"));
        fp.dt = (grid.T - grid.t0) / fp.n;
        paths = hl::fbm_generate(fp, n_paths, seed);
        if (cfg.has("model", "fgbm_mu")) {
            hl::PathSet d = hl::fgbm_path(cfg.get_double("model", "fgbm_mu"),
                                          cfg.get_double("model", "fgbm_sigma", 0.0),
                                          cfg.get_double("model", "D0", 1.0), paths);
            write_paths_csv(d, out_file(opt, "paths_fgbm.csv"));
        }
    } else {
        throw hl::ConfigError("config key model.type: unknown model " + model);
    }
    write_paths_csv(paths, out_file(opt, "paths.csv"));
    return 0;
}

int cmd_hedge(const hl::RunConfig& cfg, const CliOptions& opt) {
    const hl::MarketParams mkt = market_from(cfg);
    const hl::PayoffSpec payoff = payoff_from(cfg);
    const hl::TimeGrid grid = grid_from(cfg);
    const hl::SeedSpec seed = seed_from(cfg, opt);
    const std::size_t n_paths = paths_from(cfg);
    const double S0 = cfg.get_double("model", "S0", 100.0);
    const double T = grid.T;

    hl::StrategySpec strat;
    const std::string kind = cfg.get_string("hedge", "strategy", "stock_bond");
    if (kind == "stock_bond") strat.kind = hl::StrategyKind::stock_bond;
    else if (kind == "stock_power") strat.kind = hl::StrategyKind::stock_power;
    else if (kind == "friction") strat.kind = hl::StrategyKind::stock_bond_power_friction;
    else throw hl::ConfigError("config key hedge.strategy: unknown strategy " + kind);
    strat.market = mkt;
    strat.rebalance_every = static_cast<int>(cfg.get_int("hedge", "rebalance_every", 1));
    if (cfg.has("hedge", "epsilon"))
        strat.friction = hl::FrictionParams{cfg.get_double("hedge", "epsilon")};

    const hl::PathSet paths = hl::simulate_gbm(mkt, S0, grid, n_paths, seed, hl::Measure::P);
    const hl::PricingSource pricing = hl::PricingSource::closed_form(mkt, payoff, T);
    const hl::HedgeReport rep = hl::backtest_hedge(strat, paths, payoff, pricing);

    hl::ResultTable table({"path_id", "terminal_error"});
    for (std::size_t p = 0; p < rep.terminal_errors.size(); ++p) {
        table.row().add(std::to_string(p)).add(rep.terminal_errors[p]);
    }
    table.write_csv(out_file(opt, "hedge.csv"));
    hl::ResultTable summary({"mean", "rms", "max_abs", "q05", "q25", "q50", "q75", "q95"});
    summary.row().add(rep.mean).add(rep.rms).add(rep.max_abs).add(rep.q05).add(rep.q25)
        .add(rep.q50).add(rep.q75).add(rep.q95);
    summary.write_csv(out_file(opt, "hedge_summary.csv"));
    return 0;
}

int cmd_verify(const hl::RunConfig& cfg, const CliOptions& opt) {
    const hl::MarketParams mkt = market_from(cfg);
    const hl::TimeGrid grid = grid_from(cfg);
    const hl::SeedSpec seed = seed_from(cfg, opt);
    const std::size_t n_paths = paths_from(cfg);
    const double S0 = cfg.get_double("model", "S0", 100.0);

    std::vector<double> zetas;
    {
        std::string spec = cfg.get_string("instrument", "zetas", "delta");
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ';')) {
            if (tok == "delta") zetas.push_back(hl::delta_exponent(mkt));
            else zetas.push_back(std::stod(tok));
        }
    }
    const hl::PathSet stock = hl::simulate_gbm(mkt, S0, grid, n_paths, seed, hl::Measure::Q);
    hl::ResultTable table({"zeta", "gamma", "v0", "mean_excess", "std_error", "z"});
    for (double zeta : zetas) {
        const hl::PowerAsset asset = hl::PowerAsset::make(zeta, mkt);
        const hl::PathSet v = hl::power_asset_path(asset, stock, mkt.r);
        const hl::MartingaleStat stat = hl::martingale_statistic(v, mkt.r);
        table.row().add(zeta).add(asset.gamma).add(std::pow(S0, zeta)).add(stat.mean_excess)
            .add(stat.std_error).add(stat.z_score);
    }
    table.write_csv(out_file(opt, "verify.csv"));
    return 0;
}

int cmd_diag(const hl::RunConfig& cfg, const CliOptions& opt) {
    std::vector<double> series;
    if (cfg.has("diag", "input")) {
        const hl::ResultTable input = hl::ResultTable::read_csv(cfg.get_string("diag", "input"));
        series = input.column_values(cfg.get_string("diag", "column"));
        if (cfg.get_int("diag", "differences", 0) != 0) {
            std::vector<double> diff;
            for (std::size_t i = 1; i < series.size(); ++i)
                diff.push_back(series[i] - series[i - 1]);
            series = std::move(diff);
        }
    } else {
        hl::FbmParams fp;
        fp.H = cfg.get_double("model", "H");
        fp.n = static_cast<int>(cfg.get_int("numerics", "n_steps"));
        fp.dt = cfg.get_double("numerics", "T") / fp.n;
        const hl::PathSet paths = hl::fbm_generate(fp, 1, seed_from(cfg, opt));
        const auto& B = paths.channel("B_H");
        for (std::size_t k = 1; k < paths.n_nodes(); ++k) series.push_back(B[k] - B[k - 1]);
    }
    const hl::LrdReport rep = hl::lrd_diagnostics(series);
    hl::ResultTable acf({"lag", "acf"});
    for (std::size_t lag = 0; lag < rep.acf.size(); ++lag) {
        acf.row().add(std::to_string(lag)).add(rep.acf[lag]);
    }
    acf.write_csv(out_file(opt, "diag_acf.csv"));
    hl::ResultTable summary({"variance_plot_slope", "hurst_estimate"});
    summary.row().add(rep.variance_plot_slope).add(rep.hurst_estimate);
    summary.write_csv(out_file(opt, "diag_summary.csv"));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pricing and hedging laboratory for perpetual power contracts"};
    app.require_subcommand(1);

    CliOptions opt;
    const std::vector<std::string> names{"price", "simulate", "hedge", "verify", "diag"};
    std::vector<CLI::App*> subs;
    for (const auto& n : names) {
        CLI::App* sub = app.add_subcommand(n);
        sub->add_option("--config", opt.config_path, "run configuration file")->required();
        sub->add_option("--set", opt.overrides, "override section.key=value (repeatable)");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "master seed override")
            ->each([&](const std::string&) { opt.seed_set = true; });
        sub->add_option("--threads", opt.threads, "worker thread cap (0 = hardware)");
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        hl::RunConfig cfg = hl::RunConfig::parse_file(opt.config_path);
        for (const auto& o : opt.overrides) cfg.apply_override(o);
        hl::set_max_threads(opt.threads);

        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "price") return cmd_price(cfg, opt);
        if (cmd == "simulate") return cmd_simulate(cfg, opt);
        if (cmd == "hedge") return cmd_hedge(cfg, opt);
        if (cmd == "verify") return cmd_verify(cfg, opt);
        if (cmd == "diag") return cmd_diag(cfg, opt);
        std::cerr << "unknown command\n";
        return 2;
    } catch (const hl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
