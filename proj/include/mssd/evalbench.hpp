#ifndef MSSD_EVALBENCH_HPP
#define MSSD_EVALBENCH_HPP

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mssd/data.hpp"
#include "mssd/training.hpp"

namespace mssd {

double mse(std::span<const double> pred, std::span<const double> target);
double mae(std::span<const double> pred, std::span<const double> target);

struct EvalReport {
    std::string dataset;
    std::string variant = "default";
    std::size_t input_len = 0;
    std::size_t horizon = 0;
    double mse = 0.0;
    double mae = 0.0;
    std::size_t n_windows = 0;
    double wall_ms = 0.0;
    std::size_t peak_mem_bytes = 0;
};

/// Aggregated normalized-scale metrics over every test window.
EvalReport evaluate(const MssdModel& model, std::span<const double> series, int base_offset,
                    const Range& test_range, const WindowSpec& spec,
                    const std::string& dataset);

/// Channel-independent protocol: one model per variable, metrics averaged
/// over variables and windows.
EvalReport evaluate_multivariate(const std::vector<MssdModel>& models, const SeriesFrame& frame,
                                 const Range& test_range, const WindowSpec& spec);

/// Repeats the most recent full period of the window across the horizon.
std::vector<double> seasonal_naive_forecast(std::span<const double> window, int period,
                                            std::size_t horizon);

/// Seasonal-naive reference under the same normalized-scale protocol.
EvalReport evaluate_seasonal_naive(std::span<const double> series, const NormStats& norm,
                                   int period, const Range& test_range, const WindowSpec& spec,
                                   const std::string& dataset);

/**
 * Reference baseline: one affine map from the whole input window to the
 * whole horizon, trained with the same protocol as the main model.
 */
class LinearWindowModel {
public:
    LinearWindowModel(std::size_t input_len, std::size_t horizon, std::uint64_t seed);

    TrainLog fit(std::span<const double> series, const Splits& splits,
                 const TrainConfig& config);
    std::vector<double> forward_values(std::span<const double> normalized_window) const;
    EvalReport evaluate(std::span<const double> series, const Range& test_range,
                        const std::string& dataset) const;

    NormStats norm;

private:
    std::size_t input_len_;
    std::size_t horizon_;
    Tensor weight_;
    Tensor bias_;
};

struct NoiseSpec {
    double ratio = 0.0;       // fraction of training positions perturbed
    double sigma_scale = 1.0; // noise std as a fraction of the train std
};

struct NoiseResult {
    std::vector<double> series;
    std::size_t noised_positions = 0;
};

/// Adds gaussian noise to a ratio of the training positions; everything
/// outside the training range is returned byte-identical.
NoiseResult apply_training_noise(std::span<const double> series, const Range& train_range,
                                 const NoiseSpec& noise, std::uint64_t seed);

using ModelFactory = std::function<MssdModel()>;

/// Retrains on noised training data per ratio and evaluates on the clean
/// test split.
std::vector<std::pair<double, EvalReport>> robustness_sweep(
    const ModelFactory& factory, std::span<const double> series, int base_offset,
    const Splits& splits, const TrainConfig& config, const WindowSpec& spec,
    const std::vector<double>& ratios, double sigma_scale, const std::string& dataset);

/// Trains and evaluates one model per input length at a fixed horizon.
std::vector<EvalReport> input_length_sweep(std::span<const double> series, int base_offset,
                                           const std::vector<std::size_t>& input_lens,
                                           std::size_t horizon, const MssdConfig& base_config,
                                           const TrainConfig& config,
                                           const std::string& dataset);

struct AblationSwitches {
    bool causal_conv = true;
    bool global_block = true;
    bool attention_reference = true;
};

struct BenchRow {
    std::size_t length = 0;
    std::string module;
    double wall_ms = 0.0;
    std::size_t bytes = 0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    double conv_slope = 0.0;      // fitted log-log runtime slope
    double attention_slope = 0.0;
};

/**
 * Times forward+backward of the convolutional peak branch and of a naive
 * quadratic self-attention layer of matched width over synthetic inputs
 * of each length, and fits log-log runtime slopes.
 */
BenchResult efficiency_bench(const std::vector<std::size_t>& lengths,
                             const AblationSwitches& switches, std::uint64_t seed);

/// Deterministic forward+backward of the attention reference; returns a
/// checksum over outputs and input gradients. bytes receives the buffer
/// footprint when non-null.
double attention_reference_pass(std::size_t length, std::size_t channels, std::uint64_t seed,
                                std::size_t* bytes = nullptr);

/// Trains the switched variant and the default with identical seeds and
/// data; returns (variant, default) reports.
std::pair<EvalReport, EvalReport> ablation_run(std::span<const double> series, int base_offset,
                                               const Splits& splits,
                                               const AblationSwitches& switches,
                                               const MssdConfig& base_config,
                                               const TrainConfig& config,
                                               const std::string& dataset);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_report_csv(const std::string& path, const std::vector<EvalReport>& reports);
std::string format_report_table(const std::vector<EvalReport>& reports);

} // namespace mssd

#endif // MSSD_EVALBENCH_HPP
