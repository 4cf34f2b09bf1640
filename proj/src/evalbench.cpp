#include "mssd/evalbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

namespace mssd {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(Clock::now() -
                                                                                 t0)
        .count();
}

} // namespace

double mse(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size())
        throw ShapeError("mse: length mismatch " + std::to_string(pred.size()) + " vs " +
                         std::to_string(target.size()));
    if (pred.empty()) throw ContractError("mse: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        sum += d * d;
    }
    return sum / static_cast<double>(pred.size());
}

double mae(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size())
        throw ShapeError("mae: length mismatch " + std::to_string(pred.size()) + " vs " +
                         std::to_string(target.size()));
    if (pred.empty()) throw ContractError("mae: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - target[i]);
    return sum / static_cast<double>(pred.size());
}

namespace {

struct MetricAccumulator {
    double se = 0.0;
    double ae = 0.0;
    std::size_t count = 0;

    void add(std::span<const double> pred, std::span<const double> target) {
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double d = pred[i] - target[i];
            se += d * d;
            ae += std::abs(d);
        }
        count += pred.size();
    }
};

std::vector<double> normalize_series(std::span<const double> series, const NormStats& norm) {
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i)
        out[i] = (series[i] - norm.mean) / norm.stddev;
    return out;
}

} // namespace

EvalReport evaluate(const MssdModel& model, std::span<const double> series, int base_offset,
                    const Range& test_range, const WindowSpec& spec,
                    const std::string& dataset) {
    if (!model.norm.fitted) throw ContractError("evaluate: model has no normalization statistics");
    auto windows = make_windows(test_range, spec, model.period(), base_offset);
    if (windows.empty())
        throw ConfigError("test range of " + std::to_string(test_range.len()) +
                          " points holds no window of " +
                          std::to_string(spec.input_len + spec.horizon));

    const auto normalized = normalize_series(series, model.norm);
    memstat::reset_peak();
    const std::size_t mem_before = memstat::live_bytes();
    const auto t0 = Clock::now();

    MetricAccumulator acc;
    for (const auto& w : windows) {
        std::span<const double> input(normalized.data() + w.start, spec.input_len);
        std::span<const double> target(normalized.data() + w.start + spec.input_len,
                                       spec.horizon);
        const auto forecast = model.forward_values(input, w.day_offset);
        acc.add(forecast, target);
    }

    EvalReport report;
    report.dataset = dataset;
    report.input_len = spec.input_len;
    report.horizon = spec.horizon;
    report.mse = acc.se / static_cast<double>(acc.count);
    report.mae = acc.ae / static_cast<double>(acc.count);
    report.n_windows = windows.size();
    report.wall_ms = elapsed_ms(t0);
    report.peak_mem_bytes = memstat::peak_bytes() - mem_before;
    return report;
}

EvalReport evaluate_multivariate(const std::vector<MssdModel>& models, const SeriesFrame& frame,
                                 const Range& test_range, const WindowSpec& spec) {
    if (models.size() != frame.n_vars)
        throw ContractError("evaluate_multivariate: " + std::to_string(models.size()) +
                            " models for " + std::to_string(frame.n_vars) + " variables");
    const PeriodSpec period = make_period_spec(frame.samples_per_hour);
    const int base_offset = frame.base_offset(period);
    const auto t0 = Clock::now();
    double mse_sum = 0.0, mae_sum = 0.0;
    std::size_t n_windows = 0, peak_mem = 0;
    for (std::size_t v = 0; v < models.size(); ++v) {
        const auto column = frame.column(v);
        EvalReport r = evaluate(models[v], column, base_offset, test_range, spec,
                                frame.name);
        mse_sum += r.mse;
        mae_sum += r.mae;
        n_windows = r.n_windows;
        peak_mem = std::max(peak_mem, r.peak_mem_bytes);
    }
    EvalReport report;
    report.dataset = frame.name;
    report.input_len = spec.input_len;
    report.horizon = spec.horizon;
    report.mse = mse_sum / static_cast<double>(models.size());
    report.mae = mae_sum / static_cast<double>(models.size());
    report.n_windows = n_windows;
    report.wall_ms = elapsed_ms(t0);
    report.peak_mem_bytes = peak_mem;
    return report;
}

std::vector<double> seasonal_naive_forecast(std::span<const double> window, int period,
                                            std::size_t horizon) {
    if (window.size() < static_cast<std::size_t>(period))
        throw ContractError("seasonal naive needs at least one full period of history");
    std::vector<double> out(horizon);
    const std::size_t p = static_cast<std::size_t>(period);
    for (std::size_t h = 0; h < horizon; ++h)
        out[h] = window[window.size() - p + (h % p)];
    return out;
}

EvalReport evaluate_seasonal_naive(std::span<const double> series, const NormStats& norm,
                                   int period, const Range& test_range, const WindowSpec& spec,
                                   const std::string& dataset) {
    const PeriodSpec pspec = make_period_spec(period / 24);
    auto windows = make_windows(test_range, spec, pspec, 0);
    if (windows.empty()) throw ConfigError("test range holds no window");
    const auto normalized = normalize_series(series, norm);
    const auto t0 = Clock::now();
    MetricAccumulator acc;
    for (const auto& w : windows) {
        std::span<const double> input(normalized.data() + w.start, spec.input_len);
        std::span<const double> target(normalized.data() + w.start + spec.input_len,
                                       spec.horizon);
        const auto forecast = seasonal_naive_forecast(input, period, spec.horizon);
        acc.add(forecast, target);
    }
    EvalReport report;
    report.dataset = dataset;
    report.variant = "seasonal-naive";
    report.input_len = spec.input_len;
    report.horizon = spec.horizon;
    report.mse = acc.se / static_cast<double>(acc.count);
    report.mae = acc.ae / static_cast<double>(acc.count);
    report.n_windows = windows.size();
    report.wall_ms = elapsed_ms(t0);
    return report;
}

LinearWindowModel::LinearWindowModel(std::size_t input_len, std::size_t horizon,
                                     std::uint64_t seed)
    : input_len_(input_len), horizon_(horizon) {
    std::mt19937_64 rng(seed);
    weight_ = Tensor::randn({horizon, input_len}, rng,
                            std::sqrt(1.0 / static_cast<double>(input_len)));
    bias_ = Tensor::zeros({horizon});
}

TrainLog LinearWindowModel::fit(std::span<const double> series, const Splits& splits,
                                const TrainConfig& config) {
    norm = compute_norm_stats(series, splits.train);
    std::vector<double> normalized(series.size(), 0.0);
    for (std::size_t i = 0; i < splits.val.end; ++i)
        normalized[i] = (series[i] - norm.mean) / norm.stddev;

    const WindowSpec spec{input_len_, horizon_, 1};
    const PeriodSpec period = make_period_spec(1);
    auto train_windows = make_windows(splits.train, spec, period, 0);
    auto val_windows = make_windows(splits.val, spec, period, 0);
    if (train_windows.empty() || val_windows.empty())
        throw ConfigError("linear baseline: ranges too short for windows");

    Adam optimizer(AdamConfig{config.lr, 0.9, 0.999, 1e-8});
    std::vector<Param> params{{"weight", &weight_}, {"bias", &bias_}};
    std::mt19937_64 shuffle_rng(config.seed);

    auto eval_val = [&]() {
        double se = 0.0;
        std::size_t count = 0;
        for (const auto& w : val_windows) {
            std::span<const double> input(normalized.data() + w.start, input_len_);
            const auto forecast = forward_values(input);
            for (std::size_t h = 0; h < horizon_; ++h) {
                const double d = forecast[h] - normalized[w.start + input_len_ + h];
                se += d * d;
                ++count;
            }
        }
        return se / static_cast<double>(count);
    };

    TrainLog log;
    log.best_val_mse = std::numeric_limits<double>::infinity();
    Tensor best_weight = weight_.detached();
    Tensor best_bias = bias_.detached();
    std::size_t since_best = 0;

    std::vector<std::size_t> order(train_windows.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto t0 = Clock::now();
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t pos = 0; pos < order.size(); pos += config.batch_size) {
            const std::size_t end = std::min(pos + config.batch_size, order.size());
            GradTape tape;
            tape.watch(weight_);
            tape.watch(bias_);
            Tensor batch_loss;
            for (std::size_t b = pos; b < end; ++b) {
                const Window& w = train_windows[order[b]];
                Tensor input = Tensor::from(
                    {input_len_},
                    std::vector<double>(normalized.begin() + static_cast<std::ptrdiff_t>(w.start),
                                        normalized.begin() + static_cast<std::ptrdiff_t>(w.start + input_len_)));
                Tensor target = Tensor::from(
                    {horizon_},
                    std::vector<double>(
                        normalized.begin() + static_cast<std::ptrdiff_t>(w.start + input_len_),
                        normalized.begin() + static_cast<std::ptrdiff_t>(w.start + input_len_ + horizon_)));
                Tensor loss = ops::mse_loss(&tape, ops::linear(&tape, input, weight_, bias_), target);
                batch_loss = batch_loss.empty() ? loss : ops::add(&tape, batch_loss, loss);
            }
            batch_loss = ops::scale(&tape, batch_loss, 1.0 / static_cast<double>(end - pos));
            const double loss_value = batch_loss.item();
            if (!std::isfinite(loss_value))
                throw ContractError("linear baseline: loss not finite");
            Gradients grads = tape.backward(batch_loss);
            optimizer.step(params, grads);
            loss_sum += loss_value;
            ++batches;
        }
        const double val_mse = eval_val();
        log.records.push_back({epoch, loss_sum / static_cast<double>(batches), val_mse,
                               elapsed_ms(t0)});
        if (val_mse < log.best_val_mse) {
            log.best_val_mse = val_mse;
            log.best_epoch = epoch;
            best_weight = weight_.detached();
            best_bias = bias_.detached();
            since_best = 0;
        } else if (++since_best > config.patience) {
            break;
        }
    }
    weight_ = best_weight;
    bias_ = best_bias;
    return log;
}

std::vector<double> LinearWindowModel::forward_values(
    std::span<const double> normalized_window) const {
    Tensor input = Tensor::from({input_len_}, std::vector<double>(normalized_window.begin(),
                                                                  normalized_window.end()));
    return ops::linear(nullptr, input, weight_, bias_).to_vector();
}

EvalReport LinearWindowModel::evaluate(std::span<const double> series, const Range& test_range,
                                       const std::string& dataset) const {
    if (!norm.fitted) throw ContractError("linear baseline: not fitted");
    const WindowSpec spec{input_len_, horizon_, 1};
    auto windows = make_windows(test_range, spec, make_period_spec(1), 0);
    if (windows.empty()) throw ConfigError("test range holds no window");
    const auto normalized = normalize_series(series, norm);
    const auto t0 = Clock::now();
    MetricAccumulator acc;
    for (const auto& w : windows) {
        std::span<const double> input(normalized.data() + w.start, input_len_);
        std::span<const double> target(normalized.data() + w.start + input_len_, horizon_);
        acc.add(forward_values(input), target);
    }
    EvalReport report;
    report.dataset = dataset;
    report.variant = "linear-window";
    report.input_len = input_len_;
    report.horizon = horizon_;
    report.mse = acc.se / static_cast<double>(acc.count);
    report.mae = acc.ae / static_cast<double>(acc.count);
    report.n_windows = windows.size();
    report.wall_ms = elapsed_ms(t0);
    return report;
}

NoiseResult apply_training_noise(std::span<const double> series, const Range& train_range,
                                 const NoiseSpec& noise, std::uint64_t seed) {
    if (noise.ratio < 0.0 || noise.ratio >= 1.0)
        throw ContractError("noise ratio must be in [0, 1)");
    NoiseResult result;
    result.series.assign(series.begin(), series.end());
    if (noise.ratio == 0.0) return result;

    const std::size_t n_train = train_range.len();
    const auto target = static_cast<std::size_t>(
        std::llround(noise.ratio * static_cast<double>(n_train)));
    if (target == 0) return result;

    double mean = 0.0;
    for (std::size_t i = train_range.begin; i < train_range.end; ++i) mean += series[i];
    mean /= static_cast<double>(n_train);
    double var = 0.0;
    for (std::size_t i = train_range.begin; i < train_range.end; ++i) {
        const double d = series[i] - mean;
        var += d * d;
    }
    const double sigma = std::sqrt(var / static_cast<double>(n_train)) * noise.sigma_scale;

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> positions(n_train);
    std::iota(positions.begin(), positions.end(), train_range.begin);
    std::shuffle(positions.begin(), positions.end(), rng);
    std::normal_distribution<double> dist(0.0, sigma);
    for (std::size_t i = 0; i < target; ++i) result.series[positions[i]] += dist(rng);
    result.noised_positions = target;
    return result;
}

std::vector<std::pair<double, EvalReport>> robustness_sweep(
    const ModelFactory& factory, std::span<const double> series, int base_offset,
    const Splits& splits, const TrainConfig& config, const WindowSpec& spec,
    const std::vector<double>& ratios, double sigma_scale, const std::string& dataset) {
    for (std::size_t i = 1; i < ratios.size(); ++i)
        if (ratios[i] < ratios[i - 1])
            throw ContractError("robustness ratios must be sorted ascending");

    std::vector<std::pair<double, EvalReport>> results;
    for (double ratio : ratios) {
        NoiseSpec noise{ratio, sigma_scale};
        NoiseResult noised = apply_training_noise(series, splits.train, noise, config.seed);
        MssdModel model = factory();
        fit(model, noised.series, base_offset, splits, config);
        EvalReport report = evaluate(model, noised.series, base_offset, splits.test, spec,
                                     dataset);
        report.variant = "noise=" + std::to_string(ratio);
        results.emplace_back(ratio, std::move(report));
    }
    return results;
}

std::vector<EvalReport> input_length_sweep(std::span<const double> series, int base_offset,
                                           const std::vector<std::size_t>& input_lens,
                                           std::size_t horizon, const MssdConfig& base_config,
                                           const TrainConfig& config,
                                           const std::string& dataset) {
    std::vector<EvalReport> reports;
    for (std::size_t input_len : input_lens) {
        MssdConfig mc = base_config;
        mc.input_len = input_len;
        mc.horizon = horizon;
        MssdModel model(mc);
        const WindowSpec spec{input_len, horizon, 1};
        Splits splits = chronological_split(series.size(), config.split,
                                            input_len + horizon);
        fit(model, series, base_offset, splits, config);
        EvalReport report = evaluate(model, series, base_offset, splits.test, spec, dataset);
        report.variant = "input_len=" + std::to_string(input_len);
        reports.push_back(std::move(report));
    }
    return reports;
}

double attention_reference_pass(std::size_t length, std::size_t channels, std::uint64_t seed,
                                std::size_t* bytes) {
    const std::size_t c = channels;
    const std::size_t n = length;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    auto fill = [&](std::vector<double>& v) {
        for (double& x : v) x = dist(rng);
    };

    std::vector<double> x(c * n), wq(c * c), wk(c * c), wv(c * c);
    fill(x);
    fill(wq);
    fill(wk);
    fill(wv);

    std::vector<double> q(c * n), k(c * n), v(c * n);
    auto project = [&](const std::vector<double>& w, std::vector<double>& out) {
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t t = 0; t < n; ++t) {
                double acc = 0.0;
                for (std::size_t j = 0; j < c; ++j) acc += w[i * c + j] * x[j * n + t];
                out[i * n + t] = acc;
            }
    };
    project(wq, q);
    project(wk, k);
    project(wv, v);

    const double inv_sqrt_c = 1.0 / std::sqrt(static_cast<double>(c));
    std::vector<double> scores(n * n), attn(n * n);
    for (std::size_t t = 0; t < n; ++t) {
        double max_score = -1e300;
        for (std::size_t s = 0; s < n; ++s) {
            double acc = 0.0;
            for (std::size_t ch = 0; ch < c; ++ch) acc += q[ch * n + t] * k[ch * n + s];
            scores[t * n + s] = acc * inv_sqrt_c;
            max_score = std::max(max_score, scores[t * n + s]);
        }
        double denom = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            attn[t * n + s] = std::exp(scores[t * n + s] - max_score);
            denom += attn[t * n + s];
        }
        for (std::size_t s = 0; s < n; ++s) attn[t * n + s] /= denom;
    }

    std::vector<double> out(c * n);
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t t = 0; t < n; ++t) {
            double acc = 0.0;
            for (std::size_t s = 0; s < n; ++s) acc += v[ch * n + s] * attn[t * n + s];
            out[ch * n + t] = acc;
        }

    // Backward from loss = mean(out).
    const double d_out = 1.0 / static_cast<double>(c * n);
    std::vector<double> d_v(c * n, 0.0), d_attn(n * n, 0.0);
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t t = 0; t < n; ++t) {
            for (std::size_t s = 0; s < n; ++s) {
                d_v[ch * n + s] += d_out * attn[t * n + s];
                d_attn[t * n + s] += d_out * v[ch * n + s];
            }
        }

    std::vector<double> d_scores(n * n);
    for (std::size_t t = 0; t < n; ++t) {
        double dot = 0.0;
        for (std::size_t s = 0; s < n; ++s) dot += d_attn[t * n + s] * attn[t * n + s];
        for (std::size_t s = 0; s < n; ++s)
            d_scores[t * n + s] = attn[t * n + s] * (d_attn[t * n + s] - dot);
    }

    std::vector<double> d_q(c * n, 0.0), d_k(c * n, 0.0);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t s = 0; s < n; ++s) {
            const double g = d_scores[t * n + s] * inv_sqrt_c;
            if (g == 0.0) continue;
            for (std::size_t ch = 0; ch < c; ++ch) {
                d_q[ch * n + t] += g * k[ch * n + s];
                d_k[ch * n + s] += g * q[ch * n + t];
            }
        }

    std::vector<double> d_x(c * n, 0.0);
    auto back_project = [&](const std::vector<double>& w, const std::vector<double>& d_proj) {
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t t = 0; t < n; ++t) {
                const double g = d_proj[i * n + t];
                if (g == 0.0) continue;
                for (std::size_t j = 0; j < c; ++j) d_x[j * n + t] += g * w[i * c + j];
            }
    };
    back_project(wq, d_q);
    back_project(wk, d_k);
    back_project(wv, d_v);

    if (bytes) {
        *bytes = sizeof(double) * (x.size() + wq.size() + wk.size() + wv.size() + q.size() +
                                   k.size() + v.size() + scores.size() + attn.size() +
                                   out.size() + d_v.size() + d_attn.size() + d_scores.size() +
                                   d_q.size() + d_k.size() + d_x.size());
    }

    double checksum = 0.0;
    for (double y : out) checksum += y;
    for (double g : d_x) checksum += g;
    return checksum;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ContractError("loglog_slope needs at least two points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

double time_conv_branch(std::size_t length, const AblationSwitches& switches,
                        std::uint64_t seed, std::size_t* bytes) {
    SDNetConfig config;
    config.num_heads = 1;
    config.kernel_scales = {2};
    config.causal_tcn = switches.causal_conv;
    config.global_block = switches.global_block;
    config.dropout = 0.0;
    std::mt19937_64 init_rng(seed);
    SDNet branch(config, length, 24, init_rng);

    std::mt19937_64 data_rng(seed ^ 0xabcdef);
    Tensor input = Tensor::randn({length}, data_rng, 1.0);

    const int repeats = 3;
    double best_ms = 1e300;
    std::size_t peak = 0;
    for (int r = 0; r < repeats; ++r) {
        memstat::reset_peak();
        const std::size_t before = memstat::live_bytes();
        const auto t0 = Clock::now();
        GradTape tape;
        std::vector<Param> params;
        branch.collect_parameters("branch", params);
        for (auto& p : params) tape.watch(*p.value);
        Tensor x = input.detached();
        tape.watch(x);
        Tensor out = branch.forward(&tape, x, nullptr);
        Tensor loss = ops::mean_all(&tape, out);
        Gradients grads = tape.backward(loss);
        (void)grads;
        best_ms = std::min(best_ms, elapsed_ms(t0));
        peak = std::max(peak, memstat::peak_bytes() - before);
        for (auto& p : params) *p.value = p.value->detached();
    }
    if (bytes) *bytes = peak;
    return best_ms;
}

double time_attention(std::size_t length, std::uint64_t seed, std::size_t* bytes) {
    const int repeats = 3;
    double best_ms = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = Clock::now();
        attention_reference_pass(length, 16, seed, bytes);
        best_ms = std::min(best_ms, elapsed_ms(t0));
    }
    return best_ms;
}

} // namespace

BenchResult efficiency_bench(const std::vector<std::size_t>& lengths,
                             const AblationSwitches& switches, std::uint64_t seed) {
    for (std::size_t i = 1; i < lengths.size(); ++i)
        if (lengths[i] <= lengths[i - 1])
            throw ContractError("bench lengths must be strictly ascending");

    BenchResult result;
    std::vector<double> ls, conv_ms, attn_ms;
    for (std::size_t length : lengths) {
        std::size_t conv_bytes = 0;
        const double c_ms = time_conv_branch(length, switches, seed, &conv_bytes);
        result.rows.push_back({length, "conv-branch", c_ms, conv_bytes});
        ls.push_back(static_cast<double>(length));
        conv_ms.push_back(std::max(c_ms, 1e-6));
        if (switches.attention_reference) {
            std::size_t attn_bytes = 0;
            const double a_ms = time_attention(length, seed, &attn_bytes);
            result.rows.push_back({length, "naive-attention", a_ms, attn_bytes});
            attn_ms.push_back(std::max(a_ms, 1e-6));
        }
    }
    if (ls.size() >= 2) {
        result.conv_slope = loglog_slope(ls, conv_ms);
        if (switches.attention_reference) result.attention_slope = loglog_slope(ls, attn_ms);
    }
    return result;
}

std::pair<EvalReport, EvalReport> ablation_run(std::span<const double> series, int base_offset,
                                               const Splits& splits,
                                               const AblationSwitches& switches,
                                               const MssdConfig& base_config,
                                               const TrainConfig& config,
                                               const std::string& dataset) {
    const WindowSpec spec{base_config.input_len, base_config.horizon, 1};

    MssdConfig default_config = base_config;
    default_config.sdnet.causal_tcn = true;
    default_config.sdnet.global_block = true;

    MssdConfig variant_config = base_config;
    variant_config.sdnet.causal_tcn = switches.causal_conv;
    variant_config.sdnet.global_block = switches.global_block;

    MssdModel variant(variant_config);
    fit(variant, series, base_offset, splits, config);
    EvalReport variant_report = evaluate(variant, series, base_offset, splits.test, spec,
                                         dataset);
    variant_report.variant = std::string("causal_conv=") +
                             (switches.causal_conv ? "on" : "off") + ",global_block=" +
                             (switches.global_block ? "on" : "off");

    MssdModel baseline(default_config);
    fit(baseline, series, base_offset, splits, config);
    EvalReport default_report = evaluate(baseline, series, base_offset, splits.test, spec,
                                         dataset);
    default_report.variant = "default";
    return {variant_report, default_report};
}

void write_report_csv(const std::string& path, const std::vector<EvalReport>& reports) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << "dataset,variant,input_len,horizon,mse,mae,n_windows,wall_ms,peak_mem_bytes\n";
    out.precision(10);
    for (const auto& r : reports)
        out << r.dataset << "," << r.variant << "," << r.input_len << "," << r.horizon << ","
            << r.mse << "," << r.mae << "," << r.n_windows << "," << r.wall_ms << ","
            << r.peak_mem_bytes << "\n";
    if (!out) throw DataError("failed writing " + path);
}

std::string format_report_table(const std::vector<EvalReport>& reports) {
    std::ostringstream os;
    os << std::left << std::setw(14) << "dataset" << std::setw(34) << "variant" << std::right
       << std::setw(6) << "I" << std::setw(6) << "O" << std::setw(12) << "mse" << std::setw(12)
       << "mae" << std::setw(10) << "windows" << std::setw(12) << "wall_ms" << "\n";
    for (const auto& r : reports) {
        os << std::left << std::setw(14) << r.dataset << std::setw(34) << r.variant
           << std::right << std::setw(6) << r.input_len << std::setw(6) << r.horizon
           << std::setw(12) << std::fixed << std::setprecision(4) << r.mse << std::setw(12)
           << r.mae << std::setw(10) << r.n_windows << std::setw(12) << std::setprecision(1)
           << r.wall_ms << "\n";
        os.unsetf(std::ios_base::floatfield);
    }
    return os.str();
}

} // namespace mssd
