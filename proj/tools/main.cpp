// Command-line front end: detection on CSV data, single-change estimation,
// seeded-interval inspection, Monte Carlo penalty calibration, the
// simulation harness and a complexity benchmark.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>
#include <json.hpp>

#include "esac/errors.hpp"
#include "esac/io.hpp"
#include "esac/parallel.hpp"
#include "esac/rng.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitParse = 2;
constexpr int kExitConfigMismatch = 3;
constexpr int kExitDegenerate = 4;

struct CommonOptions {
    std::string input;
    std::string output;
    std::uint64_t seed = 1;
    int threads = 0;
    double alpha = 1.5;
    int K = 4;
    std::string variant = "split";
    std::string n_eff = "n4";
    std::string penalty = "analytic";
    double epsilon = 0.01;
    int mc_n = 1000;
    bool no_normalize = false;
    int top_k = -1;
    bool timing = false;
};

void emit(const std::string& output, const std::string& text) {
    if (output.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream file(output, std::ios::binary);
    if (!file) throw esac::ParseError("cannot open " + output + " for writing");
    file << text << '\n';
}

json penalty_config(const CommonOptions& opt, const std::optional<esac::CalibratedGamma>& cal) {
    if (!cal) return "analytic";
    return {{"source", opt.penalty},
            {"epsilon", cal->epsilon},
            {"N", cal->mc_n},
            {"seed", cal->seed},
            {"normalized", cal->normalized},
            {"midpoint_scan", cal->midpoint_scan}};
}

// Load (or reuse) a calibration and check it against the run configuration.
esac::PenaltyTable resolve_gamma(const CommonOptions& opt, const esac::RateContext& ctx,
                                 std::optional<esac::CalibratedGamma>& cal_out) {
    if (opt.penalty == "analytic") {
        cal_out.reset();
        return esac::PenaltyTable::analytic(ctx);
    }
    esac::CalibratedGamma cal = esac::load_calibration(opt.penalty);
    if (cal.alpha != opt.alpha || cal.K != opt.K) {
        throw esac::ConfigMismatchError("calibration alpha/K do not match the requested flags");
    }
    if (cal.midpoint_scan != (opt.variant == "midpoint")) {
        throw esac::ConfigMismatchError("calibration scan mode does not match the requested variant");
    }
    if (cal.normalized == opt.no_normalize) {
        throw esac::ConfigMismatchError("calibration normalization flag does not match the run");
    }
    auto table = cal.to_table(ctx); // checks n, p, grid, n_eff
    cal_out = std::move(cal);
    return table;
}

int cmd_detect(const CommonOptions& opt) {
    const esac::DataMatrix raw = esac::read_csv(opt.input);
    const esac::RateContext ctx = esac::RateContext::make(raw.n(), raw.p(), esac::neff_from_string(opt.n_eff));

    std::vector<double> sigma(raw.p(), 1.0);
    esac::DataMatrix x = raw;
    if (!opt.no_normalize) {
        const auto estimate = esac::estimate_sigma(raw);
        sigma = estimate.per_series;
        x = esac::normalize(raw, estimate);
    }

    std::optional<esac::CalibratedGamma> cal;
    esac::EsacConfig cfg;
    cfg.alpha = opt.alpha;
    cfg.K = opt.K;
    cfg.variant = esac::variant_from_string(opt.variant);
    cfg.lambda = esac::PenaltyTable::analytic(ctx);
    cfg.gamma = resolve_gamma(opt, ctx, cal);

    const auto set = esac::SeededIntervalSet::generate(raw.n(), opt.alpha, opt.K);
    esac::DetectionResult result = esac::esac(x, ctx, cfg, set);
    if (opt.top_k >= 0) result = esac::significance_rank(result, opt.top_k);

    const json config = {{"input", opt.input},
                         {"alpha", opt.alpha},
                         {"K", opt.K},
                         {"variant", opt.variant},
                         {"n_eff", opt.n_eff},
                         {"penalty", penalty_config(opt, cal)},
                         {"normalize", !opt.no_normalize},
                         {"top_k", opt.top_k},
                         {"threads", opt.threads}};
    emit(opt.output, esac::detection_to_json(result, x, sigma, config).dump(2));
    return kExitOk;
}

int cmd_estimate(const CommonOptions& opt) {
    const esac::DataMatrix raw = esac::read_csv(opt.input);
    const esac::RateContext ctx = esac::RateContext::make(raw.n(), raw.p(), esac::neff_from_string(opt.n_eff));
    std::vector<double> sigma(raw.p(), 1.0);
    esac::DataMatrix x = raw;
    if (!opt.no_normalize) {
        const auto estimate = esac::estimate_sigma(raw);
        sigma = estimate.per_series;
        x = esac::normalize(raw, estimate);
    }
    const auto [eta_hat, score] = esac::estimate_single(x, ctx, esac::PenaltyTable::analytic(ctx));
    const json out = {{"n", x.n()},
                      {"p", x.p()},
                      {"changepoint", eta_hat},
                      {"score", score.value},
                      {"sparsity", score.best_t},
                      {"sigma", sigma},
                      {"config",
                       {{"input", opt.input},
                        {"n_eff", opt.n_eff},
                        {"penalty", "analytic"},
                        {"normalize", !opt.no_normalize}}}};
    emit(opt.output, out.dump(2));
    return kExitOk;
}

int cmd_intervals(int n, double alpha, int K, const std::string& output) {
    const auto set = esac::SeededIntervalSet::generate(n, alpha, K);
    std::string lines;
    for (const auto& iv : set.intervals) {
        lines += json{{"s", iv.s}, {"e", iv.e}}.dump();
        lines += '\n';
    }
    if (!lines.empty()) lines.pop_back();
    emit(output, lines);
    return kExitOk;
}

int cmd_calibrate(const CommonOptions& opt, int n, int p) {
    const esac::RateContext ctx = esac::RateContext::make(n, p, esac::neff_from_string(opt.n_eff));
    const auto set = esac::SeededIntervalSet::generate(n, opt.alpha, opt.K);
    esac::CalibrateOptions options;
    options.normalize = !opt.no_normalize;
    options.midpoint_scan = opt.variant == "midpoint";
    options.threads = opt.threads;
    const auto cal = esac::calibrate_gamma(ctx, set, opt.mc_n, opt.epsilon, opt.seed, options);
    emit(opt.output, esac::calibration_to_json(cal).dump(2));
    return kExitOk;
}

esac::ExperimentDesign design_from_json(const json& cfg) {
    esac::ExperimentDesign design;
    const std::string mode = cfg.value("mode", "single");
    if (mode == "single") {
        design.mode = esac::ExperimentDesign::Mode::SingleChange;
    } else if (mode == "multi") {
        design.mode = esac::ExperimentDesign::Mode::Multi;
    } else {
        throw esac::ParseError("experiment: unknown mode " + mode);
    }
    design.n = cfg.value("n", 200);
    design.p = cfg.value("p", 100);
    design.k = cfg.value("k", 1);
    design.eta = cfg.value("eta", 0);
    design.j = cfg.value("j", 0);
    design.regime = esac::regime_from_string(cfg.value("regime", "sparse"));
    design.snr_c = cfg.value("snr_c", mode == "single" ? 6.25 : 12.25);
    const std::string rate = cfg.value("rate", "additive");
    if (rate == "additive") {
        design.rate = esac::SignalRate::Additive;
    } else if (rate == "max-form") {
        design.rate = esac::SignalRate::MaxForm;
    } else {
        throw esac::ParseError("experiment: unknown rate " + rate);
    }
    if (cfg.contains("noise")) {
        const auto& noise = cfg.at("noise");
        if (noise.is_string()) {
            design.noise.model = esac::noise_model_from_string(noise.get<std::string>());
        } else {
            design.noise.model = esac::noise_model_from_string(noise.value("model", "m0"));
            design.noise.rho = noise.value("rho", 0.0);
            design.noise.df = noise.value("df", 0);
        }
    }
    design.sigma = cfg.value("sigma", 1.0);
    design.directions = cfg.value("directions", "equal") == std::string("gaussian")
                            ? esac::DirectionScheme::GaussianRandom
                            : esac::DirectionScheme::EqualSigns;
    design.normalize = cfg.value("normalize", true);
    design.alpha = cfg.value("alpha", 1.5);
    design.K = cfg.value("K", 4);
    design.variant = esac::variant_from_string(cfg.value("variant", "split"));
    design.n_eff = esac::neff_from_string(cfg.value("n_eff", "n4"));
    return design;
}

void print_report_table(const esac::ExperimentDesign& design, const esac::MetricsReport& report) {
    if (design.mode == esac::ExperimentDesign::Mode::SingleChange) {
        std::fprintf(stderr, "%6s %6s %6s | %10s | %10s\n", "n", "p", "k", "MSE", "sec");
        std::fprintf(stderr, "%6d %6d %6d | %10.2f | %10.2f\n", design.n, design.p, design.k, report.mse,
                     report.wall_seconds);
        return;
    }
    std::fprintf(stderr, "%6s %6s %8s %4s | %18s %12s | %10s\n", "n", "p", "Sparsity", "J", "Hausdorff distance",
                 "|J_hat - J|", "sec");
    std::fprintf(stderr, "%6d %6d %8s %4d | %18.2f %12.3f | %10.2f\n", design.n, design.p,
                 esac::to_string(design.regime).c_str(), design.j, report.hausdorff, report.abs_j_err,
                 report.wall_seconds);
}

int cmd_simulate(const CommonOptions& opt, const std::string& config_path, int replicates_override) {
    std::ifstream file(config_path, std::ios::binary);
    if (!file) throw esac::ParseError("cannot open " + config_path);
    json cfg;
    try {
        file >> cfg;
    } catch (const json::exception& err) {
        throw esac::ParseError(std::string("experiment config: ") + err.what());
    }

    esac::ExperimentDesign design = design_from_json(cfg);
    const int replicates = replicates_override > 0 ? replicates_override : cfg.value("replicates", 100);
    const std::uint64_t seed = cfg.contains("seed") ? cfg.at("seed").get<std::uint64_t>() : opt.seed;
    const int threads = opt.threads > 0 ? opt.threads : cfg.value("threads", 0);

    json penalty_echo = "analytic";
    if (cfg.contains("penalty") && cfg.at("penalty").is_object()) {
        const auto& pen = cfg.at("penalty");
        const esac::RateContext ctx = esac::RateContext::make(design.n, design.p, design.n_eff);
        if (pen.contains("path")) {
            design.calibrated = esac::load_calibration(pen.at("path").get<std::string>());
            design.calibrated->to_table(ctx); // validate now for a clean exit code
        } else if (pen.contains("calibrate")) {
            const auto& mc = pen.at("calibrate");
            const auto set = esac::SeededIntervalSet::generate(design.n, design.alpha, design.K);
            esac::CalibrateOptions options;
            options.normalize = design.normalize;
            options.midpoint_scan = design.variant == esac::Variant::MidpointTest;
            options.threads = threads;
            design.calibrated = esac::calibrate_gamma(ctx, set, mc.value("N", 1000),
                                                      mc.value("epsilon", 1.0 / mc.value("N", 1000)),
                                                      mc.value("seed", seed), options);
        } else {
            throw esac::ParseError("experiment: penalty must be \"analytic\", {path} or {calibrate}");
        }
        penalty_echo = penalty_config(opt, design.calibrated);
    }

    const auto report = esac::run_experiment(design, replicates, seed, threads);
    json config_echo = cfg;
    config_echo["replicates"] = replicates;
    config_echo["seed"] = seed;
    config_echo["penalty"] = penalty_echo;
    emit(opt.output, esac::report_to_json(report, config_echo, opt.timing).dump(2));
    print_report_table(design, report);
    return kExitOk;
}

double time_esac_ms(int n, int p, int reps, std::uint64_t seed, bool planted) {
    const esac::RateContext ctx = esac::RateContext::make(n, p);
    const auto set = esac::SeededIntervalSet::generate(n, 1.5, 4);
    const auto cfg = esac::EsacConfig::analytic(ctx);
    esac::SplitRng rng(seed);
    std::vector<double> values(static_cast<std::size_t>(p) * n);
    for (auto& x : values) x = rng.normal();
    if (planted) {
        // A strong change at every position: the best case for the
        // narrowest-over-threshold early exit.
        double level = 0.0;
        for (int v = 0; v < n; ++v) {
            level += 100.0;
            for (int i = 0; i < p; ++i) values[static_cast<std::size_t>(i) * n + v] += level;
        }
    }
    const esac::DataMatrix x(p, n, std::move(values));

    std::vector<double> times(reps);
    for (int rep = 0; rep < reps; ++rep) {
        const auto begin = std::chrono::steady_clock::now();
        const auto result = esac::esac(x, ctx, cfg, set);
        const auto end = std::chrono::steady_clock::now();
        times[rep] = std::chrono::duration<double, std::milli>(end - begin).count();
        if (planted && result.changepoints.empty()) throw esac::Error("bench: planted changes not detected");
    }
    std::nth_element(times.begin(), times.begin() + reps / 2, times.end());
    return times[reps / 2];
}

int cmd_bench(const CommonOptions& opt, std::vector<int> n_grid, std::vector<int> p_grid, int runs) {
    json cells = json::array();
    json ratios_n = json::array();
    json ratios_p = json::array();

    const int p_fixed = p_grid.front();
    std::vector<double> times_n;
    for (int n : n_grid) {
        const double ms = time_esac_ms(n, p_fixed, runs, opt.seed, false);
        times_n.push_back(ms);
        cells.push_back({{"n", n}, {"p", p_fixed}, {"ms", ms}, {"case", "null"}});
    }
    for (std::size_t i = 1; i < times_n.size(); ++i) ratios_n.push_back(times_n[i] / times_n[i - 1]);

    const int n_fixed = n_grid.front();
    std::vector<double> times_p;
    for (int p : p_grid) {
        const double ms = time_esac_ms(n_fixed, p, runs, opt.seed, false);
        times_p.push_back(ms);
        cells.push_back({{"n", n_fixed}, {"p", p}, {"ms", ms}, {"case", "null"}});
    }
    for (std::size_t i = 1; i < times_p.size(); ++i) ratios_p.push_back(times_p[i] / times_p[i - 1]);

    const double best_case = time_esac_ms(n_grid.front(), p_fixed, runs, opt.seed, true);
    cells.push_back({{"n", n_grid.front()}, {"p", p_fixed}, {"ms", best_case}, {"case", "planted"}});

    auto exponent = [](const std::vector<double>& times) {
        // least squares slope of log2(time) against doubling index
        const int m = static_cast<int>(times.size());
        double sx = 0, sy = 0, sxy = 0, sxx = 0;
        for (int i = 0; i < m; ++i) {
            const double y = std::log2(times[i]);
            sx += i;
            sy += y;
            sxy += i * y;
            sxx += static_cast<double>(i) * i;
        }
        return (m * sxy - sx * sy) / (m * sxx - sx * sx);
    };

    const json out = {{"cells", cells},
                      {"ratio_per_doubling_n", ratios_n},
                      {"ratio_per_doubling_p", ratios_p},
                      {"exponent_n", exponent(times_n)},
                      {"exponent_p", exponent(times_p)},
                      {"best_case_ms", best_case},
                      {"null_case_ms", times_n.front()},
                      {"config", {{"n_grid", n_grid}, {"p_grid", p_grid}, {"runs", runs}, {"seed", opt.seed}}}};
    emit(opt.output, out.dump(2));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparsity-adaptive multiple changepoint estimation"};
    app.require_subcommand(1);

    CommonOptions opt;
    int n = 0;
    int p = 0;
    double alpha = 1.5;
    int K = 4;
    std::string config_path;
    int replicates = 0;
    std::vector<int> n_grid{256, 512, 1024};
    std::vector<int> p_grid{64, 128, 256};
    int runs = 5;

    auto add_common = [&opt](CLI::App* sub, bool with_input) {
        if (with_input) sub->add_option("-i,--input", opt.input, "input CSV (rows = time, columns = series)")->required();
        sub->add_option("-o,--output", opt.output, "output path (default: stdout)");
        sub->add_option("--seed", opt.seed, "master random seed");
        sub->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
        sub->add_option("--alpha", opt.alpha, "seeded-interval growth factor");
        sub->add_option("--k", opt.K, "seeded-interval shift divisor K");
        sub->add_option("--variant", opt.variant, "recursion variant: trim|split|midpoint");
        sub->add_option("--n-eff", opt.n_eff, "effective sample size in rates: n4|n");
        sub->add_option("--penalty", opt.penalty, "detection penalty: analytic | path to calibration JSON");
        sub->add_option("--epsilon", opt.epsilon, "false positive rate for calibration");
        sub->add_option("--mc-n", opt.mc_n, "Monte Carlo sample size for calibration");
        sub->add_flag("--no-normalize", opt.no_normalize, "skip MAD noise rescaling");
        sub->add_option("--top-k", opt.top_k, "keep only the top-k changepoints by score");
        sub->add_flag("--timing", opt.timing, "include wall time in report JSON");
    };

    auto* detect = app.add_subcommand("detect", "detect changepoints in a CSV file");
    add_common(detect, true);

    auto* estimate = app.add_subcommand("estimate", "estimate a single changepoint location");
    add_common(estimate, true);

    auto* intervals = app.add_subcommand("intervals", "emit the seeded interval set as JSON lines");
    intervals->add_option("--n", n, "number of time points")->required();
    intervals->add_option("--alpha", alpha, "growth factor");
    intervals->add_option("--k", K, "shift divisor K");
    intervals->add_option("-o,--output", opt.output, "output path (default: stdout)");

    auto* calibrate = app.add_subcommand("calibrate", "Monte Carlo calibration of the detection penalty");
    calibrate->add_option("--n", n, "number of time points")->required();
    calibrate->add_option("--p", p, "number of series")->required();
    add_common(calibrate, false);

    auto* simulate = app.add_subcommand("simulate", "run a simulation experiment from a JSON config");
    simulate->add_option("-c,--config", config_path, "experiment config JSON")->required();
    simulate->add_option("--replicates", replicates, "override the replicate count");
    add_common(simulate, false);

    auto* bench = app.add_subcommand("bench", "time the search over a grid of (n, p)");
    bench->add_option("--n-grid", n_grid, "grid of n values (first entry anchors the p sweep)")->delimiter(',');
    bench->add_option("--p-grid", p_grid, "grid of p values (first entry anchors the n sweep)")->delimiter(',');
    bench->add_option("--runs", runs, "timing repetitions per cell (median)");
    add_common(bench, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitParse;
    }

    try {
        if (detect->parsed()) return cmd_detect(opt);
        if (estimate->parsed()) return cmd_estimate(opt);
        if (intervals->parsed()) return cmd_intervals(n, alpha, K, opt.output);
        if (calibrate->parsed()) return cmd_calibrate(opt, n, p);
        if (simulate->parsed()) return cmd_simulate(opt, config_path, replicates);
        if (bench->parsed()) return cmd_bench(opt, n_grid, p_grid, runs);
    } catch (const esac::ParseError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitParse;
    } catch (const esac::ConfigMismatchError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitConfigMismatch;
    } catch (const esac::DegenerateSeriesError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitDegenerate;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}
