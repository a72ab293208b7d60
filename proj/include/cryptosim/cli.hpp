#pragma once

// Command-line front end. Exit status: 0 success, 1 bad input or usage,
// 2 runtime failure.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cryptosim/calibration.hpp"
#include "cryptosim/config.hpp"
#include "cryptosim/ensemble.hpp"
#include "cryptosim/fundamentals.hpp"
#include "cryptosim/ohlcv.hpp"
#include "cryptosim/report_io.hpp"
#include "cryptosim/simulation.hpp"
#include "cryptosim/stylized_stats.hpp"

namespace cryptosim {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2 };

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    int threads = 0;
    std::string config_path;
    bool smoke = false;
};

namespace cli_detail {

inline MarketConfig resolve_config(const GlobalOptions& g) {
    MarketConfig cfg = g.smoke ? smoke_config() : MarketConfig{};
    if (!g.config_path.empty()) cfg = load_config(g.config_path, cfg);
    if (g.seed) cfg.master_seed = *g.seed;
    validate(cfg);
    return cfg;
}

inline bool is_ohlcv(const fs::path& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open " + path.string());
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    return header == kOhlcvHeader;
}

inline std::string run_dir_name(std::size_t k) {
    std::ostringstream s;
    s << "run_" << std::setw(3) << std::setfill('0') << k;
    return s.str();
}

}  // namespace cli_detail

/// Parses argv and runs one subcommand, writing messages to `out` / `err`.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Multi-agent market simulator and stylized-facts toolkit", "cryptosim"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Master seed (overrides the config file)");
    app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
    app.add_option("--config", g.config_path, "Flat key = value config file")->check(CLI::ExistingFile);
    app.add_flag("--smoke", g.smoke, "Small preset: I=100, T=400, S=3");

    auto* simulate = app.add_subcommand("simulate", "Run the market and write prices.csv, equity.csv, meta.json");
    bool sim_noise = false, sim_ensemble = false;
    simulate->add_flag("--noise", sim_noise, "Zero-intelligence agents instead of learners");
    simulate->add_flag("--ensemble", sim_ensemble, "Write every ensemble member to run_NNN/");

    auto* analyze = app.add_subcommand("analyze", "Stylized-facts report from prices.csv or an OHLCV file");
    std::string analyze_input;
    int analyze_asset = 0;
    analyze->add_option("input", analyze_input, "prices.csv or OHLCV csv")->required()->check(CLI::ExistingFile);
    analyze->add_option("--asset", analyze_asset, "Asset index for prices.csv input")->check(CLI::NonNegativeNumber);

    auto* calibrate = app.add_subcommand("calibrate", "Grid search against real training data");
    std::string data_dir, grid_name = "full";
    std::size_t budget = 480;
    calibrate->add_option("--data-dir", data_dir, "Directory of OHLCV csv files")->required()->check(CLI::ExistingDirectory);
    calibrate->add_option("--budget", budget, "Maximum number of grid cells")->capture_default_str()->check(CLI::PositiveNumber);
    calibrate->add_option("--grid", grid_name, "full or smoke")->capture_default_str()->check(CLI::IsMember({"full", "smoke"}));

    auto* compare = app.add_subcommand("compare", "Histogram distances between two report.json files");
    std::string report_a, report_b;
    compare->add_option("first", report_a)->required()->check(CLI::ExistingFile);
    compare->add_option("second", report_b)->required()->check(CLI::ExistingFile);

    auto* fstats = app.add_subcommand("fundamentals-stats", "Jump and disparity statistics of the fundamental process");
    JumpParams jp;
    int fstats_views = 20;
    fstats->add_option("--drift-sigma", jp.drift_sigma)->capture_default_str()->check(CLI::NonNegativeNumber);
    fstats->add_option("--jump-probability", jp.jump_probability)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    fstats->add_option("--jump-log-mu", jp.jump_log_mu)->capture_default_str();
    fstats->add_option("--jump-log-sigma", jp.jump_log_sigma)->capture_default_str()->check(CLI::NonNegativeNumber);
    fstats->add_option("--up-probability", jp.up_probability)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    fstats->add_option("--views", fstats_views, "Agent views per run")->capture_default_str()->check(CLI::PositiveNumber);

    auto* baseline = app.add_subcommand("baseline", "Learning agents vs noise agents on paired seeds");
    double final_fraction = 0.1;
    baseline->add_option("--final-fraction", final_fraction, "Trailing share of steps for returns")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    auto* scan = app.add_subcommand("scan", "Sensitivity of one hyperparameter");
    std::string scan_axis;
    std::vector<double> scan_values;
    scan->add_option("--axis", scan_axis, "I, zeta, nu or L")->required()->check(CLI::IsMember({"I", "zeta", "nu", "L"}));
    scan->add_option("--values", scan_values, "Axis values")->required()->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitValidation;
    }
    if (*seed_opt) g.seed = seed_value;

    try {
        const fs::path dir = g.out_dir;
        const int threads = resolve_threads(g.threads);

        if (*simulate) {
            const auto cfg = cli_detail::resolve_config(g);
            RunOptions options;
            options.mode = sim_noise ? AgentMode::Noise : AgentMode::Learning;
            if (sim_ensemble) {
                const auto runs = run_ensemble(cfg, options, threads);
                for (std::size_t k = 0; k < runs.size(); ++k) write_sim_output(dir / cli_detail::run_dir_name(k), runs[k]);
                out << "wrote " << runs.size() << " runs to " << dir.string() << '\n';
            } else {
                const auto run = Simulation(cfg, options).run();
                write_sim_output(dir, run);
                out << "wrote " << dir.string() << " (trades " << run.trade_count << ", fees " << fmt(run.fee_total) << ")\n";
            }
            std::ofstream cfg_out = open_output(dir / "config.txt");
            write_config(cfg_out, cfg);
        } else if (*analyze) {
            const auto cfg = cli_detail::resolve_config(g);
            const Calendar cal = calendar_of(cfg);
            StylizedStatsReport report;
            if (cli_detail::is_ohlcv(analyze_input)) {
                const auto asset = load_ohlcv(analyze_input);
                report = build_report(asset.closes(), asset.volumes(), cal);
            } else {
                std::ifstream in(analyze_input);
                const auto table = read_prices_csv(in, analyze_input);
                const auto j = static_cast<std::size_t>(analyze_asset);
                require(j < table.prices.size(), "analyze: asset index out of range");
                report = build_report(table.prices[j], table.volumes[j], cal);
            }
            write_report(dir, report);
            std::size_t omitted = 0;
            for (const auto& [name, m] : report.families) omitted += m.omitted ? 1 : 0;
            out << "report: " << report.families.size() << " families, " << omitted << " omitted; excess kurtosis "
                << fmt(report.return_moments.excess_kurtosis) << '\n';
        } else if (*calibrate) {
            const auto cfg = cli_detail::resolve_config(g);
            const Calendar cal = calendar_of(cfg);
            const auto assets = filter_continuous(load_ohlcv_dir(data_dir));
            const auto split = split_train_test(assets, cfg.master_seed);
            const auto train = assets_report(split.train, cal);
            const auto test = assets_report(split.test, cal);
            const HyperGrid grid = grid_name == "smoke" ? smoke_grid() : HyperGrid{};
            auto records = grid_search(grid, budget, cfg, train, threads);
            {
                auto f = open_output(dir / "records.csv");
                write_records_csv(f, records, cal);
            }
            {
                auto f = open_output(dir / "timing.csv");
                write_timing_csv(f, records);
            }
            {
                auto f = open_output(dir / "split.csv");
                f << "symbol,set\n";
                for (const auto& a : split.train) f << a.symbol << ",train\n";
                for (const auto& a : split.test) f << a.symbol << ",test\n";
            }
            if (!records.empty() && records.front().valid) {
                const auto best = apply_cell(cfg, records.front().cell);
                auto f = open_output(dir / "best_config.txt");
                write_config(f, best);
                const auto test_record = score_cell(records.front().cell, cfg, test, threads);
                auto t = open_output(dir / "test_score.csv");
                t << "family,distance\n";
                for (const auto& d : test_record.distances) t << d.family << ',' << fmt(d.distance) << '\n';
                t << "aggregate," << fmt(test_record.aggregate) << '\n';
                out << "best cell: I=" << best.agent_count << " zeta=" << fmt(best.gesture_scalar)
                    << " nu=" << best.cointegration_accuracy << " L=" << fmt(best.drawdown_level)
                    << " train score " << fmt(records.front().aggregate) << " test score "
                    << fmt(test_record.aggregate) << '\n';
            } else {
                out << "no valid cell\n";
            }
        } else if (*compare) {
            const auto a = load_report(report_a);
            const auto b = load_report(report_b);
            const auto distances = compare_reports(a, b);
            auto f = open_output(dir / "distances.csv");
            f << "family,distance\n";
            for (const auto& d : distances) {
                f << d.family << ',' << fmt(d.distance) << '\n';
                out << d.family << ' ' << fmt(d.distance) << '\n';
            }
            const auto objective = objective_distances(a, b);
            f << "aggregate," << fmt(aggregate_score(objective)) << '\n';
            out << "aggregate " << fmt(aggregate_score(objective)) << '\n';
        } else if (*fstats) {
            const auto cfg = cli_detail::resolve_config(g);
            double rate = 0, amp = 0, amp_sd = 0, disp = 0, disp_sd = 0;
            nlohmann::ordered_json runs = nlohmann::ordered_json::array();
            for (int s = 0; s < cfg.ensemble_size; ++s) {
                const auto seed = member_seed(cfg.master_seed, static_cast<std::size_t>(s));
                const auto series = generate_fundamental(kInitialPrice, cfg.horizon, jp, derive_seed(seed, Stream::Fundamental));
                std::vector<CointegratedView> views;
                for (int i = 0; i < fstats_views; ++i) {
                    views.push_back(cointegrate(series, cfg.cointegration_accuracy, derive_seed(seed, Stream::View, i), i));
                }
                const auto st = fundamental_stats(series, views, cfg.year_days);
                rate += st.annual_jump_rate;
                amp += st.mean_jump_amplitude_pct;
                amp_sd += st.std_jump_amplitude_pct;
                disp += st.mean_disparity_pct;
                disp_sd += st.std_disparity_pct;
                runs.push_back(jump_stats_json(st));
            }
            const double n = cfg.ensemble_size;
            const JumpStats mean{rate / n, amp / n, amp_sd / n, disp / n, disp_sd / n};
            nlohmann::ordered_json j{{"runs", cfg.ensemble_size}, {"horizon", cfg.horizon},
                                     {"cointegration_accuracy", cfg.cointegration_accuracy},
                                     {"mean", jump_stats_json(mean)}, {"per_run", runs}};
            open_output(dir / "fundamentals.json") << j.dump(2) << '\n';
            out << jump_stats_json(mean).dump(2) << '\n';
        } else if (*baseline) {
            const auto cfg = cli_detail::resolve_config(g);
            auto top_decile = [&](const SimOutput& run) { return top_decile_mean(final_window_returns(run.equity, final_fraction)); };
            RunOptions learning, noise;
            noise.mode = AgentMode::Noise;
            const auto rl = map_ensemble(cfg, learning, threads, top_decile);
            const auto nz = map_ensemble(cfg, noise, threads, top_decile);
            auto f = open_output(dir / "baseline.csv");
            f << "run,seed,learning_top_decile,noise_top_decile,learning_wins\n";
            int wins = 0;
            for (std::size_t k = 0; k < rl.size(); ++k) {
                const bool win = rl[k] > nz[k];
                wins += win ? 1 : 0;
                f << k << ',' << member_seed(cfg.master_seed, k) << ',' << fmt(rl[k]) << ',' << fmt(nz[k]) << ','
                  << (win ? 1 : 0) << '\n';
            }
            out << "learning top decile beats noise in " << wins << " of " << rl.size() << " paired runs\n";
        } else if (*scan) {
            const auto cfg = cli_detail::resolve_config(g);
            const auto points = sensitivity_scan(parse_axis(scan_axis), scan_values, cfg, threads);
            auto f = open_output(dir / ("scan_" + scan_axis + ".csv"));
            f << "value,metric\n";
            for (const auto& p : points) {
                f << fmt(p.value) << ',' << fmt(p.metric) << '\n';
                out << scan_axis << '=' << fmt(p.value) << ' ' << fmt(p.metric) << '\n';
            }
        }
        return kExitOk;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "runtime failure: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace cryptosim
