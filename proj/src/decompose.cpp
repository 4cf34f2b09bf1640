#include "mssd/decompose.hpp"

#include <string>

namespace mssd {

const char* phase_name(PhaseKind phase) {
    switch (phase) {
    case PhaseKind::Ascending: return "ascending";
    case PhaseKind::Peak: return "peak";
    case PhaseKind::Descending: return "descending";
    }
    return "?";
}

PeriodSpec make_period_spec(int samples_per_hour) {
    if (samples_per_hour < 1)
        throw ContractError("samples_per_hour must be >= 1, got " +
                            std::to_string(samples_per_hour));
    PeriodSpec spec;
    spec.samples_per_hour = samples_per_hour;
    spec.period = 24 * samples_per_hour;
    spec.phase_len = spec.period / 3;
    return spec;
}

namespace {
int normalize_offset(const PeriodSpec& spec, int phase_offset) {
    const int t = spec.period;
    int o = phase_offset % t;
    if (o < 0) o += t;
    return o;
}
} // namespace

PhaseKind phase_at(const PeriodSpec& spec, std::size_t position, int phase_offset) {
    const int o = normalize_offset(spec, phase_offset);
    const std::size_t in_day = (position + static_cast<std::size_t>(o)) %
                               static_cast<std::size_t>(spec.period);
    return static_cast<PhaseKind>(in_day / static_cast<std::size_t>(spec.phase_len));
}

std::vector<std::size_t> phase_positions(const PeriodSpec& spec, std::size_t len,
                                         int phase_offset, PhaseKind phase) {
    std::vector<std::size_t> positions;
    positions.reserve(len / 3 + 1);
    for (std::size_t t = 0; t < len; ++t)
        if (phase_at(spec, t, phase_offset) == phase) positions.push_back(t);
    return positions;
}

PhaseDecomposition decompose(std::span<const double> series, const PeriodSpec& spec,
                             int phase_offset) {
    if (series.empty()) throw ContractError("decompose: empty series");
    const std::size_t n = series.size();
    PhaseDecomposition d;
    d.spec = spec;
    d.phase_offset = normalize_offset(spec, phase_offset);
    d.ascending.assign(n, 0.0);
    d.peak.assign(n, 0.0);
    d.descending.assign(n, 0.0);
    d.labels.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const PhaseKind label = phase_at(spec, t, d.phase_offset);
        d.labels[t] = label;
        switch (label) {
        case PhaseKind::Ascending: d.ascending[t] = series[t]; break;
        case PhaseKind::Peak: d.peak[t] = series[t]; break;
        case PhaseKind::Descending: d.descending[t] = series[t]; break;
        }
    }
    return d;
}

std::vector<PhaseSegment> extract_phase_windows(const PhaseDecomposition& decomposition,
                                                PhaseKind phase) {
    const std::vector<double>* component = nullptr;
    switch (phase) {
    case PhaseKind::Ascending: component = &decomposition.ascending; break;
    case PhaseKind::Peak: component = &decomposition.peak; break;
    case PhaseKind::Descending: component = &decomposition.descending; break;
    }
    std::vector<PhaseSegment> segments;
    const std::size_t n = decomposition.labels.size();
    std::size_t t = 0;
    while (t < n) {
        if (decomposition.labels[t] != phase) {
            ++t;
            continue;
        }
        PhaseSegment seg;
        seg.start = t;
        while (t < n && decomposition.labels[t] == phase) {
            seg.values.push_back((*component)[t]);
            ++t;
        }
        segments.push_back(std::move(seg));
    }
    return segments;
}

std::vector<double> reassemble(std::span<const double> ascending, std::span<const double> peak,
                               std::span<const double> descending, std::size_t horizon,
                               const PeriodSpec& spec, int start_offset) {
    if (ascending.size() != horizon || peak.size() != horizon || descending.size() != horizon)
        throw ContractError("reassemble: phase prediction length does not match horizon " +
                            std::to_string(horizon));
    std::vector<double> out(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
        switch (phase_at(spec, t, start_offset)) {
        case PhaseKind::Ascending: out[t] = ascending[t]; break;
        case PhaseKind::Peak: out[t] = peak[t]; break;
        case PhaseKind::Descending: out[t] = descending[t]; break;
        }
    }
    return out;
}

} // namespace mssd
