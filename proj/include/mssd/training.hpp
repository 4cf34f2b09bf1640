#ifndef MSSD_TRAINING_HPP
#define MSSD_TRAINING_HPP

#include <span>
#include <string>
#include <vector>

#include "mssd/model.hpp"

namespace mssd {

struct WindowSpec {
    std::size_t input_len = 96;
    std::size_t horizon = 24;
    std::size_t stride = 1;
};

struct SplitFractions {
    double train = 0.7;
    double val = 0.1;
    double test = 0.2;
};

struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t len() const { return end - begin; }
};

struct Splits {
    Range train;
    Range val;
    Range test;
};

/// Contiguous, ordered, non-overlapping ranges; test is the most recent
/// segment. Every range must fit at least one window of min_window points.
Splits chronological_split(std::size_t n, const SplitFractions& fractions,
                           std::size_t min_window);

struct Window {
    std::size_t start = 0; // index of the first input position
    int day_offset = 0;    // in-day position of the window start
};

/// Sliding windows fully inside the range, each carrying the in-day
/// offset of its first input position.
std::vector<Window> make_windows(const Range& range, const WindowSpec& spec,
                                 const PeriodSpec& period, int base_offset);

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double lr = 1e-3;
    std::size_t patience = 10;
    std::uint64_t seed = 42;
    SplitFractions split;
};

void validate_fractions(const SplitFractions& fractions);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_mse = 0.0;
    double val_mse = 0.0;
    double wall_ms = 0.0;
};

struct TrainLog {
    std::vector<EpochRecord> records;
    std::size_t best_epoch = 0;
    double best_val_mse = 0.0;

    /// Newline-delimited records: epoch, train_mse, val_mse, wall_ms.
    std::string to_text() const;
    /// Equality over the deterministic fields (wall time excluded).
    bool same_losses(const TrainLog& other) const;
};

NormStats compute_norm_stats(std::span<const double> series, const Range& train_range);

/**
 * Trains the model on MSE over normalized train windows with Adam,
 * evaluating validation MSE after every epoch. Keeps the parameters of
 * the best validation epoch and restores them at the end; stops early
 * once the validation loss has not improved for more than `patience`
 * epochs. Test-range values are never read.
 */
TrainLog fit(MssdModel& model, std::span<const double> series, int base_offset,
             const Splits& splits, const TrainConfig& config);

/// Normalize with the stored stats, run the model, denormalize.
std::vector<double> predict(const MssdModel& model, std::span<const double> raw_window,
                            int start_offset);

} // namespace mssd

#endif // MSSD_TRAINING_HPP
