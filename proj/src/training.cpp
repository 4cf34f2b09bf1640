#include "mssd/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mssd {

void validate_fractions(const SplitFractions& fractions) {
    if (fractions.train <= 0.0 || fractions.val <= 0.0 || fractions.test <= 0.0)
        throw ConfigError("split fractions must all be positive");
    const double sum = fractions.train + fractions.val + fractions.test;
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("split fractions must sum to 1, got " + std::to_string(sum));
}

Splits chronological_split(std::size_t n, const SplitFractions& fractions,
                           std::size_t min_window) {
    validate_fractions(fractions);
    const auto n_train = static_cast<std::size_t>(std::floor(fractions.train * static_cast<double>(n)));
    const auto n_val = static_cast<std::size_t>(std::floor(fractions.val * static_cast<double>(n)));
    if (n_train + n_val > n) throw ConfigError("series too short to split");
    Splits s;
    s.train = {0, n_train};
    s.val = {n_train, n_train + n_val};
    s.test = {n_train + n_val, n};
    for (const Range* r : {&s.train, &s.val, &s.test}) {
        if (r->len() < min_window)
            throw ConfigError("series too short: a split of " + std::to_string(r->len()) +
                              " points cannot hold a window of " + std::to_string(min_window));
    }
    return s;
}

std::vector<Window> make_windows(const Range& range, const WindowSpec& spec,
                                 const PeriodSpec& period, int base_offset) {
    if (spec.stride < 1) throw ConfigError("window stride must be >= 1");
    std::vector<Window> windows;
    const std::size_t need = spec.input_len + spec.horizon;
    if (range.len() < need) return windows;
    for (std::size_t start = range.begin; start + need <= range.end; start += spec.stride) {
        const int offset = static_cast<int>(
            (static_cast<std::size_t>(base_offset) + start) %
            static_cast<std::size_t>(period.period));
        windows.push_back({start, offset});
    }
    return windows;
}

std::string TrainLog::to_text() const {
    std::ostringstream os;
    os.precision(10);
    os << "epoch,train_mse,val_mse,wall_ms\n";
    for (const auto& r : records)
        os << r.epoch << "," << r.train_mse << "," << r.val_mse << "," << r.wall_ms << "\n";
    return os.str();
}

bool TrainLog::same_losses(const TrainLog& other) const {
    if (records.size() != other.records.size() || best_epoch != other.best_epoch)
        return false;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].epoch != other.records[i].epoch ||
            records[i].train_mse != other.records[i].train_mse ||
            records[i].val_mse != other.records[i].val_mse)
            return false;
    }
    return true;
}

NormStats compute_norm_stats(std::span<const double> series, const Range& train_range) {
    if (train_range.end > series.size() || train_range.len() < 2)
        throw ContractError("invalid training range for normalization");
    double mean = 0.0;
    for (std::size_t i = train_range.begin; i < train_range.end; ++i) mean += series[i];
    mean /= static_cast<double>(train_range.len());
    double var = 0.0;
    for (std::size_t i = train_range.begin; i < train_range.end; ++i) {
        const double d = series[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(train_range.len());
    NormStats stats;
    stats.mean = mean;
    stats.stddev = std::max(std::sqrt(var), 1e-8);
    stats.fitted = true;
    return stats;
}

namespace {

double eval_windows_mse(const MssdModel& model, const std::vector<double>& normalized,
                        const std::vector<Window>& windows, const WindowSpec& spec) {
    if (windows.empty()) return std::numeric_limits<double>::quiet_NaN();
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& w : windows) {
        Tensor input = Tensor::from({spec.input_len},
                                    std::vector<double>(normalized.begin() + static_cast<std::ptrdiff_t>(w.start),
                                                        normalized.begin() + static_cast<std::ptrdiff_t>(w.start + spec.input_len)));
        Tensor forecast = model.forward(nullptr, input, w.day_offset);
        const double* f = forecast.data();
        const double* target = normalized.data() + w.start + spec.input_len;
        for (std::size_t h = 0; h < spec.horizon; ++h) {
            const double d = f[h] - target[h];
            total += d * d;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

} // namespace

TrainLog fit(MssdModel& model, std::span<const double> series, int base_offset,
             const Splits& splits, const TrainConfig& config) {
    if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    const WindowSpec spec{model.config().input_len, model.config().horizon, 1};
    const PeriodSpec& period = model.period();

    model.norm = compute_norm_stats(series, splits.train);

    // Normalize up to the end of the validation range; the test segment is
    // never touched by training.
    std::vector<double> normalized(series.size(), 0.0);
    for (std::size_t i = 0; i < splits.val.end; ++i)
        normalized[i] = (series[i] - model.norm.mean) / model.norm.stddev;

    auto train_windows = make_windows(splits.train, spec, period, base_offset);
    auto val_windows = make_windows(splits.val, spec, period, base_offset);
    if (train_windows.empty())
        throw ConfigError("training range holds no window of " +
                          std::to_string(spec.input_len + spec.horizon) + " points");
    if (val_windows.empty())
        throw ConfigError("validation range holds no window of " +
                          std::to_string(spec.input_len + spec.horizon) + " points");

    Adam optimizer(AdamConfig{config.lr, 0.9, 0.999, 1e-8});
    auto params = model.parameters();
    std::mt19937_64 shuffle_rng(config.seed);
    std::mt19937_64 dropout_rng(config.seed ^ 0x9e3779b97f4a7c15ull);

    TrainLog log;
    log.best_val_mse = std::numeric_limits<double>::infinity();
    std::vector<Tensor> best_params = model.snapshot_parameters();
    std::size_t epochs_since_best = 0;

    std::vector<std::size_t> order(train_windows.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double train_loss_sum = 0.0;
        std::size_t batch_count = 0;
        for (std::size_t pos = 0; pos < order.size(); pos += config.batch_size) {
            const std::size_t batch_end = std::min(pos + config.batch_size, order.size());
            GradTape tape;
            for (auto& p : params) tape.watch(*p.value);

            Tensor batch_loss;
            for (std::size_t b = pos; b < batch_end; ++b) {
                const Window& w = train_windows[order[b]];
                Tensor input = Tensor::from(
                    {spec.input_len},
                    std::vector<double>(normalized.begin() + static_cast<std::ptrdiff_t>(w.start),
                                        normalized.begin() + static_cast<std::ptrdiff_t>(w.start + spec.input_len)));
                Tensor target = Tensor::from(
                    {spec.horizon},
                    std::vector<double>(
                        normalized.begin() + static_cast<std::ptrdiff_t>(w.start + spec.input_len),
                        normalized.begin() + static_cast<std::ptrdiff_t>(w.start + spec.input_len + spec.horizon)));
                Tensor forecast = model.forward(&tape, input, w.day_offset, &dropout_rng);
                Tensor loss = ops::mse_loss(&tape, forecast, target);
                batch_loss = batch_loss.empty() ? loss : ops::add(&tape, batch_loss, loss);
            }
            batch_loss = ops::scale(&tape, batch_loss, 1.0 / static_cast<double>(batch_end - pos));
            const double loss_value = batch_loss.item();
            if (!std::isfinite(loss_value))
                throw ContractError("training loss is not finite at epoch " +
                                    std::to_string(epoch) + ", batch " +
                                    std::to_string(batch_count));
            Gradients grads = tape.backward(batch_loss);
            optimizer.step(params, grads);
            train_loss_sum += loss_value;
            ++batch_count;
        }

        const double train_mse = train_loss_sum / static_cast<double>(batch_count);
        const double val_mse = eval_windows_mse(model, normalized, val_windows, spec);
        if (!std::isfinite(val_mse))
            throw ContractError("validation loss is not finite at epoch " + std::to_string(epoch));
        const auto t1 = std::chrono::steady_clock::now();
        const double wall_ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0).count();
        log.records.push_back({epoch, train_mse, val_mse, wall_ms});

        if (val_mse < log.best_val_mse) {
            log.best_val_mse = val_mse;
            log.best_epoch = epoch;
            best_params = model.snapshot_parameters();
            epochs_since_best = 0;
        } else {
            ++epochs_since_best;
            if (epochs_since_best > config.patience) break;
        }
    }

    model.restore_parameters(best_params);
    model.detach_parameters();
    return log;
}

std::vector<double> predict(const MssdModel& model, std::span<const double> raw_window,
                            int start_offset) {
    if (!model.norm.fitted)
        throw ContractError("predict: model has no normalization statistics; train or load first");
    if (raw_window.size() != model.config().input_len)
        throw ContractError("predict: window length " + std::to_string(raw_window.size()) +
                            " does not match model input length " +
                            std::to_string(model.config().input_len));
    std::vector<double> normalized(raw_window.size());
    for (std::size_t i = 0; i < raw_window.size(); ++i)
        normalized[i] = (raw_window[i] - model.norm.mean) / model.norm.stddev;
    std::vector<double> forecast = model.forward_values(normalized, start_offset);
    for (double& v : forecast) v = v * model.norm.stddev + model.norm.mean;
    return forecast;
}

} // namespace mssd
