#ifndef MSSD_DECOMPOSE_HPP
#define MSSD_DECOMPOSE_HPP

#include <span>
#include <vector>

#include "mssd/errors.hpp"

namespace mssd {

/// Thirds of the daily cycle.
enum class PhaseKind : int { Ascending = 0, Peak = 1, Descending = 2 };

const char* phase_name(PhaseKind phase);

/**
 * Daily-cycle geometry. With sampling rate i per hour the cycle spans
 * period = 24*i samples and splits into three equal phases of period/3.
 */
struct PeriodSpec {
    int samples_per_hour = 1;
    int period = 24;
    int phase_len = 8;
};

PeriodSpec make_period_spec(int samples_per_hour);

/// Phase label of an absolute position, given the offset of position 0
/// within the daily cycle.
PhaseKind phase_at(const PeriodSpec& spec, std::size_t position, int phase_offset);

/// Positions in [0, len) carrying the given label, in increasing order.
std::vector<std::size_t> phase_positions(const PeriodSpec& spec, std::size_t len,
                                         int phase_offset, PhaseKind phase);

/**
 * Full-length masked components of a series: each component equals the
 * input on its phase positions and is zero elsewhere, so that
 * ascending + peak + descending reproduces the input exactly.
 */
struct PhaseDecomposition {
    std::vector<double> ascending;
    std::vector<double> peak;
    std::vector<double> descending;
    std::vector<PhaseKind> labels;
    PeriodSpec spec;
    int phase_offset = 0;
};

PhaseDecomposition decompose(std::span<const double> series, const PeriodSpec& spec,
                             int phase_offset);

/// One contiguous run of phase-labeled values.
struct PhaseSegment {
    std::size_t start = 0;
    std::vector<double> values;
};

/// Contiguous per-period runs of a phase, in order. The concatenation of
/// the returned values equals the phase-labeled values of the series.
std::vector<PhaseSegment> extract_phase_windows(const PhaseDecomposition& decomposition,
                                                PhaseKind phase);

/**
 * Combines per-phase forecasts (each a full-horizon series masked to its
 * own phase) into the final forecast. start_offset is the position of the
 * first forecast step within the daily cycle.
 */
std::vector<double> reassemble(std::span<const double> ascending,
                               std::span<const double> peak,
                               std::span<const double> descending, std::size_t horizon,
                               const PeriodSpec& spec, int start_offset);

} // namespace mssd

#endif // MSSD_DECOMPOSE_HPP
