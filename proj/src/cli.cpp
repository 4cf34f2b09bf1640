#include "mssd/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "mssd/checkpoint.hpp"
#include "mssd/config.hpp"
#include "mssd/data.hpp"
#include "mssd/evalbench.hpp"
#include "mssd/svg.hpp"

namespace mssd::cli {

namespace {

namespace fs = std::filesystem;

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoul(item));
    }
    if (out.empty()) throw ConfigError("expected a comma-separated list, got '" + text + "'");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw ConfigError("expected a comma-separated list, got '" + text + "'");
    return out;
}

MssdConfig model_config_from(const RunConfig& cfg, std::size_t input_len, std::size_t horizon) {
    MssdConfig mc;
    mc.samples_per_hour = cfg.samples_per_hour;
    mc.input_len = input_len;
    mc.horizon = horizon;
    mc.seed = cfg.seed;
    mc.sdnet.num_heads = static_cast<int>(cfg.kernel_scales.size());
    mc.sdnet.kernel_scales = cfg.kernel_scales;
    mc.sdnet.tcn_layers = cfg.tcn_layers;
    mc.sdnet.tcn_kernel = cfg.tcn_kernel;
    mc.sdnet.channels = cfg.channels;
    mc.sdnet.grid_rows = cfg.grid_rows;
    mc.sdnet.dropout = cfg.dropout;
    return mc;
}

TrainConfig train_config_from(const RunConfig& cfg) {
    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch_size;
    tc.lr = cfg.lr;
    tc.patience = cfg.patience;
    tc.seed = cfg.seed;
    tc.split = {cfg.train_frac, cfg.val_frac, cfg.test_frac};
    return tc;
}

CsvOptions csv_options_from(const RunConfig& cfg) {
    CsvOptions opt;
    opt.samples_per_hour = cfg.samples_per_hour;
    if (cfg.fill_policy == "reject") {
        opt.fill = CsvOptions::Fill::Reject;
    } else if (cfg.fill_policy == "forward-fill") {
        opt.fill = CsvOptions::Fill::ForwardFill;
    } else {
        throw ConfigError("fill_policy must be 'reject' or 'forward-fill', got '" +
                          cfg.fill_policy + "'");
    }
    opt.name = fs::path(cfg.data).stem().string();
    return opt;
}

int resolve_offset(const RunConfig& cfg, const SeriesFrame& frame, const PeriodSpec& period) {
    if (cfg.offset >= 0) return cfg.offset % period.period;
    return frame.base_offset(period);
}

/// Binds every RunConfig key as a same-named flag (underscores become
/// dashes) and resolves precedence: defaults < config file < MSSD_SEED
/// < explicit flags.
struct ConfigBinding {
    RunConfig flags;
    std::string config_path;
    std::string scales_text;
    CLI::App* sub = nullptr;
    bool out_dir_alias = false;

    /// Registers "--out" as another spelling of --out-dir (for subcommands
    /// whose main artifact is a directory).
    void alias_out_dir() {
        sub->add_option("--out", flags.out_dir, "output directory");
        out_dir_alias = true;
    }

    void attach(CLI::App* app) {
        sub = app;
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_option("--data", flags.data, "input CSV path");
        sub->add_option("--out-dir", flags.out_dir, "output directory");
        sub->add_option("--samples-per-hour,--i,-i", flags.samples_per_hour,
                        "samples per hour (1 = hourly)");
        sub->add_option("--offset", flags.offset,
                        "in-day offset of the first row (-1: derive from timestamps)");
        sub->add_option("--var", flags.var, "variable column to model");
        sub->add_flag("--multivariate", flags.multivariate,
                      "model every variable channel-independently");
        sub->add_option("--jobs", flags.jobs, "parallel workers for multivariate runs");
        sub->add_option("--input-len", flags.input_len, "input window length I");
        sub->add_option("--horizon", flags.horizon, "forecast horizon O");
        sub->add_option("--kernel-scales", scales_text, "per-head local conv scales, e.g. 2,3");
        sub->add_option("--tcn-layers", flags.tcn_layers, "temporal conv stack depth");
        sub->add_option("--tcn-kernel", flags.tcn_kernel, "temporal conv kernel size");
        sub->add_option("--channels", flags.channels, "embedding channels");
        sub->add_option("--grid-rows", flags.grid_rows, "rows of the 2-D grid reshape");
        sub->add_option("--dropout", flags.dropout, "dropout on temporal conv blocks");
        sub->add_option("--epochs", flags.epochs, "max training epochs");
        sub->add_option("--batch-size", flags.batch_size, "windows per optimizer step");
        sub->add_option("--lr", flags.lr, "learning rate");
        sub->add_option("--patience", flags.patience, "early stopping patience");
        sub->add_option("--seed", flags.seed, "random seed");
        sub->add_option("--train-frac", flags.train_frac, "train split fraction");
        sub->add_option("--val-frac", flags.val_frac, "validation split fraction");
        sub->add_option("--test-frac", flags.test_frac, "test split fraction");
        sub->add_option("--fill-policy", flags.fill_policy, "gap policy: forward-fill | reject");
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (const char* env_seed = std::getenv("MSSD_SEED")) cfg.seed = std::stoull(env_seed);

        auto passed = [&](const std::string& flag) { return sub->count(flag) > 0; };
        if (passed("--data")) cfg.data = flags.data;
        if (passed("--out-dir") || (out_dir_alias && passed("--out"))) cfg.out_dir = flags.out_dir;
        if (passed("--samples-per-hour")) cfg.samples_per_hour = flags.samples_per_hour;
        if (passed("--offset")) cfg.offset = flags.offset;
        if (passed("--var")) cfg.var = flags.var;
        if (passed("--multivariate")) cfg.multivariate = flags.multivariate;
        if (passed("--jobs")) cfg.jobs = flags.jobs;
        if (passed("--input-len")) cfg.input_len = flags.input_len;
        if (passed("--horizon")) cfg.horizon = flags.horizon;
        if (passed("--kernel-scales")) {
            std::vector<int> scales;
            for (std::size_t s : parse_size_list(scales_text)) scales.push_back(static_cast<int>(s));
            cfg.kernel_scales = scales;
        }
        if (passed("--tcn-layers")) cfg.tcn_layers = flags.tcn_layers;
        if (passed("--tcn-kernel")) cfg.tcn_kernel = flags.tcn_kernel;
        if (passed("--channels")) cfg.channels = flags.channels;
        if (passed("--grid-rows")) cfg.grid_rows = flags.grid_rows;
        if (passed("--dropout")) cfg.dropout = flags.dropout;
        if (passed("--epochs")) cfg.epochs = flags.epochs;
        if (passed("--batch-size")) cfg.batch_size = flags.batch_size;
        if (passed("--lr")) cfg.lr = flags.lr;
        if (passed("--patience")) cfg.patience = flags.patience;
        if (passed("--seed")) cfg.seed = flags.seed;
        if (passed("--train-frac")) cfg.train_frac = flags.train_frac;
        if (passed("--val-frac")) cfg.val_frac = flags.val_frac;
        if (passed("--test-frac")) cfg.test_frac = flags.test_frac;
        if (passed("--fill-policy")) cfg.fill_policy = flags.fill_policy;
        return cfg;
    }
};

SeriesFrame load_frame(const RunConfig& cfg) {
    if (cfg.data.empty()) throw ConfigError("--data is required");
    SeriesFrame frame = load_csv(cfg.data, csv_options_from(cfg));
    if (frame.filled_rows > 0)
        std::cout << "note: forward-filled " << frame.filled_rows << " gaps in " << cfg.data
                  << "\n";
    return frame;
}

struct TrainedVariable {
    MssdModel model;
    TrainLog log;
};

TrainedVariable train_one(const RunConfig& cfg, const SeriesFrame& frame, std::size_t var,
                          std::size_t input_len, std::size_t horizon) {
    const PeriodSpec period = make_period_spec(cfg.samples_per_hour);
    const int offset = resolve_offset(cfg, frame, period);
    const auto series = frame.column(var);
    const TrainConfig tc = train_config_from(cfg);
    Splits splits = chronological_split(series.size(), tc.split, input_len + horizon);
    TrainedVariable out{MssdModel(model_config_from(cfg, input_len, horizon)), {}};
    out.log = fit(out.model, series, offset, splits, tc);
    return out;
}

std::vector<TrainedVariable> train_all_vars(const RunConfig& cfg, const SeriesFrame& frame,
                                            std::size_t input_len, std::size_t horizon) {
    std::vector<std::size_t> vars;
    if (cfg.multivariate) {
        for (std::size_t v = 0; v < frame.n_vars; ++v) vars.push_back(v);
    } else {
        if (cfg.var < 0 || static_cast<std::size_t>(cfg.var) >= frame.n_vars)
            throw ConfigError("--var " + std::to_string(cfg.var) + " out of range, frame has " +
                              std::to_string(frame.n_vars) + " variables");
        vars.push_back(static_cast<std::size_t>(cfg.var));
    }

    std::vector<TrainedVariable> trained(vars.size());
    const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(vars.size())));
    if (jobs == 1) {
        for (std::size_t k = 0; k < vars.size(); ++k)
            trained[k] = train_one(cfg, frame, vars[k], input_len, horizon);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j) {
            workers.emplace_back([&, j] {
                try {
                    for (std::size_t k = next.fetch_add(1); k < vars.size();
                         k = next.fetch_add(1))
                        trained[k] = train_one(cfg, frame, vars[k], input_len, horizon);
                } catch (...) {
                    errors[static_cast<std::size_t>(j)] = std::current_exception();
                }
            });
        }
        for (auto& w : workers) w.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return trained;
}

void write_component_csv(const std::string& path, const std::string& label,
                         const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out.precision(17);
    out << label << "\n";
    for (double v : values) out << v << "\n";
}

// ---- subcommand handlers ----

void cmd_synth(const std::string& out_path, std::size_t days, int samples_per_hour,
               const SynthComponents& components, std::uint64_t seed, bool with_timestamps) {
    SeriesFrame frame = synth_seasonal(days, samples_per_hour, components, seed);
    if (with_timestamps) {
        frame.timestamps.resize(frame.n_rows);
        const std::int64_t step = 3600 / samples_per_hour;
        const std::int64_t start = parse_timestamp("2020-01-06 00:00:00");
        for (std::size_t r = 0; r < frame.n_rows; ++r)
            frame.timestamps[r] = start + static_cast<std::int64_t>(r) * step;
    }
    save_csv(frame, out_path, with_timestamps);
    std::cout << "wrote " << frame.n_rows << " rows to " << out_path << "\n";
}

void cmd_decompose(const RunConfig& cfg) {
    SeriesFrame frame = load_frame(cfg);
    const PeriodSpec period = make_period_spec(cfg.samples_per_hour);
    const int offset = resolve_offset(cfg, frame, period);
    const auto series = frame.column(static_cast<std::size_t>(cfg.var));
    const PhaseDecomposition d = decompose(series, period, offset);

    fs::create_directories(cfg.out_dir);
    write_component_csv((fs::path(cfg.out_dir) / "ascending.csv").string(), "ascending",
                        d.ascending);
    write_component_csv((fs::path(cfg.out_dir) / "peak.csv").string(), "peak", d.peak);
    write_component_csv((fs::path(cfg.out_dir) / "descending.csv").string(), "descending",
                        d.descending);

    const std::size_t plot_len =
        std::min<std::size_t>(series.size(), 5 * static_cast<std::size_t>(period.period));
    std::vector<double> xs(plot_len);
    for (std::size_t i = 0; i < plot_len; ++i) xs[i] = static_cast<double>(i);
    auto head = [&](const std::vector<double>& v) {
        return std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(plot_len));
    };
    write_line_svg((fs::path(cfg.out_dir) / "decomposition.svg").string(),
                   {{"series", xs, head(series)},
                    {"ascending", xs, head(d.ascending)},
                    {"peak", xs, head(d.peak)},
                    {"descending", xs, head(d.descending)}},
                   {"Daily-phase decomposition of " + frame.name, "position", "value"});
    std::cout << "wrote ascending.csv, peak.csv, descending.csv, decomposition.svg to "
              << cfg.out_dir << "\n";
}

void cmd_train(const RunConfig& cfg, const std::string& model_path,
               const std::string& log_path) {
    SeriesFrame frame = load_frame(cfg);
    auto trained = train_all_vars(cfg, frame, cfg.input_len, cfg.horizon);

    Checkpoint checkpoint;
    if (cfg.multivariate) {
        checkpoint.variable_names = frame.variable_names;
    } else {
        checkpoint.variable_names = {frame.variable_names[static_cast<std::size_t>(cfg.var)]};
    }
    for (auto& t : trained) checkpoint.models.push_back(std::move(t.model));
    save_checkpoint(model_path, checkpoint);

    if (!log_path.empty()) {
        std::ofstream out(log_path);
        if (!out) throw DataError("cannot open " + log_path + " for writing");
        for (std::size_t k = 0; k < trained.size(); ++k) {
            out << "# variable " << checkpoint.variable_names[k] << "\n";
            out << trained[k].log.to_text();
        }
    }
    for (std::size_t k = 0; k < trained.size(); ++k)
        std::cout << checkpoint.variable_names[k] << ": best val mse "
                  << trained[k].log.best_val_mse << " at epoch " << trained[k].log.best_epoch
                  << " (" << trained[k].log.records.size() << " epochs)\n";
    std::cout << "saved checkpoint to " << model_path << "\n";
}

void cmd_predict(const RunConfig& cfg, const std::string& model_path,
                 const std::string& out_path, long long at) {
    Checkpoint checkpoint = load_checkpoint(model_path);
    SeriesFrame frame = load_frame(cfg);
    const MssdConfig& mc = checkpoint.models[0].config();
    const PeriodSpec period = make_period_spec(mc.samples_per_hour);
    const int base_offset = resolve_offset(cfg, frame, period);

    const std::size_t input_len = mc.input_len;
    if (frame.n_rows < input_len)
        throw ConfigError("series of " + std::to_string(frame.n_rows) +
                          " rows is shorter than the model input length " +
                          std::to_string(input_len));
    const std::size_t start = at >= 0 ? static_cast<std::size_t>(at)
                                      : frame.n_rows - input_len;
    if (start + input_len > frame.n_rows)
        throw ConfigError("window at " + std::to_string(start) + " runs past the series end");
    const int offset = static_cast<int>(
        (static_cast<std::size_t>(base_offset) + start) % static_cast<std::size_t>(period.period));

    const bool all_vars = checkpoint.models.size() > 1;
    if (all_vars && checkpoint.models.size() != frame.n_vars)
        throw ConfigError("checkpoint has " + std::to_string(checkpoint.models.size()) +
                          " models but the frame has " + std::to_string(frame.n_vars) +
                          " variables");

    std::ofstream out(out_path);
    if (!out) throw DataError("cannot open " + out_path + " for writing");
    out.precision(17);
    out << "position,variable,value\n";
    for (std::size_t m = 0; m < checkpoint.models.size(); ++m) {
        const std::size_t var = all_vars ? m : static_cast<std::size_t>(cfg.var);
        const auto series = frame.column(var);
        std::span<const double> window(series.data() + start, input_len);
        const auto forecast = predict(checkpoint.models[m], window, offset);
        for (std::size_t h = 0; h < forecast.size(); ++h)
            out << start + input_len + h << "," << checkpoint.variable_names[m] << ","
                << forecast[h] << "\n";
    }
    std::cout << "wrote forecast to " << out_path << "\n";
}

void cmd_evaluate(const RunConfig& cfg, const std::vector<std::size_t>& horizons,
                  const std::string& out_path, const std::string& svg_path,
                  bool with_baselines) {
    SeriesFrame frame = load_frame(cfg);
    const PeriodSpec period = make_period_spec(cfg.samples_per_hour);
    const int offset = resolve_offset(cfg, frame, period);
    std::vector<EvalReport> reports;
    for (std::size_t horizon : horizons) {
        const WindowSpec spec{cfg.input_len, horizon, 1};
        auto trained = train_all_vars(cfg, frame, cfg.input_len, horizon);
        Splits splits = chronological_split(frame.n_rows, train_config_from(cfg).split,
                                            cfg.input_len + horizon);
        if (cfg.multivariate) {
            std::vector<MssdModel> models;
            for (auto& t : trained) models.push_back(std::move(t.model));
            reports.push_back(evaluate_multivariate(models, frame, splits.test, spec));
        } else {
            const auto series = frame.column(static_cast<std::size_t>(cfg.var));
            reports.push_back(evaluate(trained[0].model, series, offset, splits.test, spec,
                                       frame.name));
            if (with_baselines) {
                reports.push_back(evaluate_seasonal_naive(series, trained[0].model.norm,
                                                          period.period, splits.test, spec,
                                                          frame.name));
                LinearWindowModel linear(cfg.input_len, horizon, cfg.seed);
                linear.fit(series, splits, train_config_from(cfg));
                reports.push_back(linear.evaluate(series, splits.test, frame.name));
            }
        }
    }
    std::cout << format_report_table(reports);
    if (!out_path.empty()) {
        write_report_csv(out_path, reports);
        std::cout << "wrote " << out_path << "\n";
    }
    if (!svg_path.empty()) {
        SvgSeries mse_series{"mse", {}, {}};
        SvgSeries mae_series{"mae", {}, {}};
        for (const auto& r : reports) {
            if (r.variant != "default") continue;
            mse_series.x.push_back(static_cast<double>(r.horizon));
            mse_series.y.push_back(r.mse);
            mae_series.x.push_back(static_cast<double>(r.horizon));
            mae_series.y.push_back(r.mae);
        }
        write_line_svg(svg_path, {mse_series, mae_series},
                       {"Forecast error vs horizon (" + frame.name + ")", "horizon",
                        "normalized error"});
        std::cout << "wrote " << svg_path << "\n";
    }
}

void cmd_robustness(const RunConfig& cfg, const std::vector<double>& ratios,
                    double sigma_scale, const std::string& out_path,
                    const std::string& svg_path) {
    SeriesFrame frame = load_frame(cfg);
    const PeriodSpec period = make_period_spec(cfg.samples_per_hour);
    const int offset = resolve_offset(cfg, frame, period);
    const auto series = frame.column(static_cast<std::size_t>(cfg.var));
    const TrainConfig tc = train_config_from(cfg);
    Splits splits = chronological_split(series.size(), tc.split, cfg.input_len + cfg.horizon);
    const WindowSpec spec{cfg.input_len, cfg.horizon, 1};
    const MssdConfig mc = model_config_from(cfg, cfg.input_len, cfg.horizon);

    auto results = robustness_sweep([&] { return MssdModel(mc); }, series, offset, splits, tc,
                                    spec, ratios, sigma_scale, frame.name);
    std::vector<EvalReport> reports;
    for (auto& [ratio, report] : results) reports.push_back(report);
    std::cout << format_report_table(reports);
    if (!out_path.empty()) {
        write_report_csv(out_path, reports);
        std::cout << "wrote " << out_path << "\n";
    }
    if (!svg_path.empty()) {
        SvgSeries mae_series{"test mae", {}, {}};
        for (auto& [ratio, report] : results) {
            mae_series.x.push_back(ratio);
            mae_series.y.push_back(report.mae);
        }
        write_line_svg(svg_path, {mae_series},
                       {"Test MAE vs training perturbation (" + frame.name + ")",
                        "perturbation ratio", "mae"});
        std::cout << "wrote " << svg_path << "\n";
    }
}

void cmd_bench(const std::vector<std::size_t>& lengths, const AblationSwitches& switches,
               std::uint64_t seed, const std::string& out_path, const std::string& svg_path) {
    BenchResult result = efficiency_bench(lengths, switches, seed);
    std::cout << std::left << std::setw(8) << "length" << std::setw(18) << "module"
              << std::right << std::setw(12) << "wall_ms" << std::setw(14) << "bytes" << "\n";
    for (const auto& row : result.rows)
        std::cout << std::left << std::setw(8) << row.length << std::setw(18) << row.module
                  << std::right << std::setw(12) << std::fixed << std::setprecision(3)
                  << row.wall_ms << std::setw(14) << row.bytes << "\n";
    std::cout.unsetf(std::ios_base::floatfield);
    std::cout << "conv-branch log-log slope: " << result.conv_slope << "\n";
    if (switches.attention_reference)
        std::cout << "naive-attention log-log slope: " << result.attention_slope << "\n";

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw DataError("cannot open " + out_path + " for writing");
        out << "length,module,wall_ms,bytes\n";
        for (const auto& row : result.rows)
            out << row.length << "," << row.module << "," << row.wall_ms << "," << row.bytes
                << "\n";
        std::cout << "wrote " << out_path << "\n";
    }
    if (!svg_path.empty()) {
        SvgSeries conv{"conv-branch", {}, {}};
        SvgSeries attn{"naive-attention", {}, {}};
        for (const auto& row : result.rows) {
            auto& target = row.module == "conv-branch" ? conv : attn;
            target.x.push_back(static_cast<double>(row.length));
            target.y.push_back(std::max(row.wall_ms, 1e-6));
        }
        std::vector<SvgSeries> series{conv};
        if (!attn.x.empty()) series.push_back(attn);
        write_line_svg(svg_path, series,
                       {"Forward+backward runtime vs input length", "length", "wall ms", true,
                        true});
        std::cout << "wrote " << svg_path << "\n";
    }
}

void cmd_sweep_input(const RunConfig& cfg, const std::vector<std::size_t>& input_lens,
                     const std::string& out_path, const std::string& svg_path) {
    SeriesFrame frame = load_frame(cfg);
    const PeriodSpec period = make_period_spec(cfg.samples_per_hour);
    const int offset = resolve_offset(cfg, frame, period);
    const auto series = frame.column(static_cast<std::size_t>(cfg.var));
    auto reports = input_length_sweep(series, offset, input_lens, cfg.horizon,
                                      model_config_from(cfg, cfg.input_len, cfg.horizon),
                                      train_config_from(cfg), frame.name);
    std::cout << format_report_table(reports);
    if (!out_path.empty()) {
        write_report_csv(out_path, reports);
        std::cout << "wrote " << out_path << "\n";
    }
    if (!svg_path.empty()) {
        SvgSeries mse_series{"test mse", {}, {}};
        for (const auto& r : reports) {
            mse_series.x.push_back(static_cast<double>(r.input_len));
            mse_series.y.push_back(r.mse);
        }
        write_line_svg(svg_path, {mse_series},
                       {"Test MSE vs input length (" + frame.name + ")", "input length",
                        "normalized mse"});
        std::cout << "wrote " << svg_path << "\n";
    }
}

void cmd_ablate(const RunConfig& cfg, const std::vector<std::size_t>& horizons,
                const AblationSwitches& switches, const std::string& out_path) {
    SeriesFrame frame = load_frame(cfg);
    const PeriodSpec period = make_period_spec(cfg.samples_per_hour);
    const int offset = resolve_offset(cfg, frame, period);
    const auto series = frame.column(static_cast<std::size_t>(cfg.var));
    const TrainConfig tc = train_config_from(cfg);

    std::vector<EvalReport> reports;
    for (std::size_t horizon : horizons) {
        Splits splits = chronological_split(series.size(), tc.split, cfg.input_len + horizon);
        auto [variant, base] = ablation_run(series, offset, splits, switches,
                                            model_config_from(cfg, cfg.input_len, horizon), tc,
                                            frame.name);
        reports.push_back(variant);
        reports.push_back(base);
    }
    std::cout << format_report_table(reports);
    if (!out_path.empty()) {
        write_report_csv(out_path, reports);
        std::cout << "wrote " << out_path << "\n";
    }
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Seasonal time-series forecasting toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic daily-periodic dataset");
    std::size_t synth_days = 200;
    int synth_i = 1;
    SynthComponents synth_components;
    std::uint64_t synth_seed = 42;
    std::string synth_out = "synth.csv";
    bool synth_ts = false;
    synth->add_option("--days", synth_days, "number of days");
    synth->add_option("--samples-per-hour,--i,-i", synth_i, "samples per hour");
    synth->add_option("--amplitude", synth_components.amplitude, "daily amplitude");
    synth->add_option("--trend", synth_components.trend_slope, "trend added per day");
    synth->add_option("--noise", synth_components.noise_std, "gaussian noise std");
    synth->add_option("--sharpness", synth_components.peak_sharpness, "midday bump exponent");
    synth->add_option("--seed", synth_seed, "random seed");
    synth->add_option("--out", synth_out, "output CSV path");
    synth->add_flag("--timestamps", synth_ts, "write a timestamp column");

    // decompose
    auto* dec = app.add_subcommand("decompose", "split a series into daily phases");
    ConfigBinding dec_cfg;
    dec_cfg.attach(dec);
    dec_cfg.alias_out_dir();

    // train
    auto* train = app.add_subcommand("train", "fit a model and write a checkpoint");
    ConfigBinding train_cfg;
    train_cfg.attach(train);
    std::string train_model_out = "model.ckpt";
    std::string train_log_out;
    train->add_option("--out", train_model_out, "checkpoint output path");
    train->add_option("--log", train_log_out, "training log output path");

    // predict
    auto* pred = app.add_subcommand("predict", "forecast from a checkpoint");
    ConfigBinding pred_cfg;
    pred_cfg.attach(pred);
    std::string pred_model = "model.ckpt";
    std::string pred_out = "forecast.csv";
    long long pred_at = -1;
    pred->add_option("--model", pred_model, "checkpoint path");
    pred->add_option("--out", pred_out, "forecast CSV path");
    pred->add_option("--at", pred_at, "window start index (-1: latest window)");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "train and report test metrics per horizon");
    ConfigBinding eval_cfg;
    eval_cfg.attach(eval);
    std::string eval_horizons = "24,48,96";
    std::string eval_out, eval_svg;
    bool eval_baselines = false;
    eval->add_option("--horizons", eval_horizons, "comma-separated horizons");
    eval->add_option("--out", eval_out, "report CSV path");
    eval->add_option("--svg", eval_svg, "error-vs-horizon plot path");
    eval->add_flag("--with-baselines", eval_baselines,
                   "add seasonal-naive and linear-map reference rows");

    // robustness
    auto* rob = app.add_subcommand("robustness", "retrain under training noise and report MAE");
    ConfigBinding rob_cfg;
    rob_cfg.attach(rob);
    std::string rob_ratios = "0,0.05,0.1,0.2";
    double rob_sigma = 1.0;
    std::string rob_out, rob_svg;
    rob->add_option("--ratios", rob_ratios, "comma-separated perturbation ratios");
    rob->add_option("--sigma-scale", rob_sigma, "noise std as a fraction of train std");
    rob->add_option("--out", rob_out, "report CSV path");
    rob->add_option("--svg", rob_svg, "MAE-vs-ratio plot path");

    // bench
    auto* bench = app.add_subcommand("bench", "time the conv branch against naive attention");
    std::string bench_lengths = "96,192,384,768,1536";
    std::uint64_t bench_seed = 42;
    std::string bench_out, bench_svg;
    bool bench_no_causal = false, bench_no_global = false, bench_no_attention = false;
    bench->add_option("--lengths", bench_lengths, "comma-separated input lengths");
    bench->add_option("--seed", bench_seed, "random seed");
    bench->add_option("--out", bench_out, "timing CSV path");
    bench->add_option("--svg", bench_svg, "runtime plot path");
    bench->add_flag("--no-causal-conv", bench_no_causal, "plain conv in the temporal stack");
    bench->add_flag("--no-global-block", bench_no_global, "skip the 2-D grid block");
    bench->add_flag("--no-attention", bench_no_attention, "skip the attention reference");

    // sweep-input
    auto* sweep = app.add_subcommand("sweep-input", "train per input length at a fixed horizon");
    ConfigBinding sweep_cfg;
    sweep_cfg.attach(sweep);
    std::string sweep_lens = "96,192,336";
    std::string sweep_out, sweep_svg;
    sweep->add_option("--input-lens", sweep_lens, "comma-separated input lengths");
    sweep->add_option("--out", sweep_out, "report CSV path");
    sweep->add_option("--svg", sweep_svg, "MSE-vs-input-length plot path");

    // ablate
    auto* ablate = app.add_subcommand("ablate", "paired run of a switched variant vs default");
    ConfigBinding ablate_cfg;
    ablate_cfg.attach(ablate);
    std::string ablate_horizons = "24,720";
    std::string ablate_out;
    bool ablate_no_causal = false, ablate_no_global = false;
    ablate->add_option("--horizons", ablate_horizons, "comma-separated horizons");
    ablate->add_option("--out", ablate_out, "report CSV path");
    ablate->add_flag("--no-causal-conv", ablate_no_causal, "plain conv in the temporal stack");
    ablate->add_flag("--no-global-block", ablate_no_global, "skip the 2-D grid block");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.push_back("mssd");
    for (const auto& a : args) argv_store.push_back(a);
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) {
            cmd_synth(synth_out, synth_days, synth_i, synth_components, synth_seed, synth_ts);
        } else if (dec->parsed()) {
            cmd_decompose(dec_cfg.resolve());
        } else if (train->parsed()) {
            cmd_train(train_cfg.resolve(), train_model_out, train_log_out);
        } else if (pred->parsed()) {
            cmd_predict(pred_cfg.resolve(), pred_model, pred_out, pred_at);
        } else if (eval->parsed()) {
            cmd_evaluate(eval_cfg.resolve(), parse_size_list(eval_horizons), eval_out, eval_svg,
                         eval_baselines);
        } else if (rob->parsed()) {
            cmd_robustness(rob_cfg.resolve(), parse_double_list(rob_ratios), rob_sigma, rob_out,
                           rob_svg);
        } else if (bench->parsed()) {
            AblationSwitches switches{!bench_no_causal, !bench_no_global, !bench_no_attention};
            cmd_bench(parse_size_list(bench_lengths), switches, bench_seed, bench_out,
                      bench_svg);
        } else if (sweep->parsed()) {
            cmd_sweep_input(sweep_cfg.resolve(), parse_size_list(sweep_lens), sweep_out,
                            sweep_svg);
        } else if (ablate->parsed()) {
            AblationSwitches switches{!ablate_no_causal, !ablate_no_global, true};
            cmd_ablate(ablate_cfg.resolve(), parse_size_list(ablate_horizons), switches,
                       ablate_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

} // namespace mssd::cli
