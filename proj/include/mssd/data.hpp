#ifndef MSSD_DATA_HPP
#define MSSD_DATA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mssd/decompose.hpp"
#include "mssd/errors.hpp"

namespace mssd {

/**
 * A loaded dataset: optional timestamps, a [length x variables] value
 * matrix in row-major order and the sampling rate.
 */
struct SeriesFrame {
    std::string name;
    std::vector<std::int64_t> timestamps; // epoch seconds; empty when absent
    std::vector<double> values;           // row-major [n_rows x n_vars]
    std::size_t n_rows = 0;
    std::size_t n_vars = 0;
    int samples_per_hour = 1;
    std::vector<std::string> variable_names;
    std::size_t filled_rows = 0; // rows synthesized or patched by forward fill

    double value(std::size_t row, std::size_t var) const { return values[row * n_vars + var]; }
    std::vector<double> column(std::size_t var) const;

    /// In-day position of the first row, from timestamps when present.
    int base_offset(const PeriodSpec& spec) const;
};

struct CsvOptions {
    char delimiter = ',';
    enum class Header { Auto, Yes, No } header = Header::Auto;
    int timestamp_column = -2; // -2 auto-detect, -1 none, >= 0 explicit index
    enum class Fill { Reject, ForwardFill } fill = Fill::ForwardFill;
    int samples_per_hour = 1;
    std::string name = "dataset";
};

/**
 * Loads a CSV of numeric columns with an optional header row and an
 * optional ISO-8601 timestamp column. Timestamps must advance by constant
 * steps of 1/samples_per_hour hours; gaps are forward-filled or rejected
 * per options, duplicates and irregular steps are rejected.
 */
SeriesFrame load_csv(const std::string& path, const CsvOptions& options = {});

void save_csv(const SeriesFrame& frame, const std::string& path, bool with_timestamps = false);

struct SynthComponents {
    double amplitude = 1.0;      // height of the daily pattern and its midday bump
    double trend_slope = 0.05;   // added per day
    double noise_std = 0.1;
    double peak_sharpness = 4.0; // exponent of the midday bump
};

/**
 * Deterministic synthetic daily-periodic series: a rising morning ramp,
 * a sharp midday bump, a falling evening ramp, plus linear trend and
 * gaussian noise.
 */
SeriesFrame synth_seasonal(std::size_t days, int samples_per_hour,
                           const SynthComponents& components, std::uint64_t seed);

/// FNV-1a over the frame contents, for ingestion determinism checks.
std::uint64_t frame_hash(const SeriesFrame& frame);

std::int64_t parse_timestamp(const std::string& text); // epoch seconds
std::string format_timestamp(std::int64_t epoch_seconds);

} // namespace mssd

#endif // MSSD_DATA_HPP
