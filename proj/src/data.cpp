#include "mssd/data.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace mssd {

std::vector<double> SeriesFrame::column(std::size_t var) const {
    if (var >= n_vars)
        throw ContractError("variable index " + std::to_string(var) + " out of range, frame has " +
                            std::to_string(n_vars));
    std::vector<double> out(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) out[r] = values[r * n_vars + var];
    return out;
}

int SeriesFrame::base_offset(const PeriodSpec& spec) const {
    if (timestamps.empty()) return 0;
    const std::int64_t day_seconds = 86400;
    std::int64_t sod = timestamps.front() % day_seconds;
    if (sod < 0) sod += day_seconds;
    const std::int64_t step_seconds = 3600 / spec.samples_per_hour;
    return static_cast<int>((sod / step_seconds) % spec.period);
}

namespace {

bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

std::int64_t days_from_civil(int year, int month, int day) {
    // Howard Hinnant's algorithm, days since 1970-01-01.
    year -= month <= 2;
    const int era = (year >= 0 ? year : year - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(year - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(month + (month > 2 ? -3 : 9)) + 2) / 5 +
                         static_cast<unsigned>(day) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    month = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    year = static_cast<int>(y + (month <= 2));
}

bool parse_int_field(const std::string& s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return res.ec == std::errc() && res.ptr == s.data() + pos + len;
}

} // namespace

std::int64_t parse_timestamp(const std::string& text) {
    // Accepts YYYY-MM-DD[ T]HH:MM[:SS].
    int year, month, day, hour, minute, second = 0;
    const bool ok = text.size() >= 16 && parse_int_field(text, 0, 4, year) && text[4] == '-' &&
                    parse_int_field(text, 5, 2, month) && text[7] == '-' &&
                    parse_int_field(text, 8, 2, day) && (text[10] == ' ' || text[10] == 'T') &&
                    parse_int_field(text, 11, 2, hour) && text[13] == ':' &&
                    parse_int_field(text, 14, 2, minute);
    if (!ok) throw DataError("unparseable timestamp: '" + text + "'");
    if (text.size() >= 19) {
        if (text[16] != ':' || !parse_int_field(text, 17, 2, second))
            throw DataError("unparseable timestamp: '" + text + "'");
    }
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
        throw DataError("timestamp out of range: '" + text + "'");
    return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_timestamp(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    int year, month, day;
    civil_from_days(days, year, month, day);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d", year, month, day,
                  static_cast<int>(rem / 3600), static_cast<int>((rem % 3600) / 60),
                  static_cast<int>(rem % 60));
    return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delimiter)) {
        // trim
        std::size_t b = field.find_first_not_of(" \t\r");
        std::size_t e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == delimiter) fields.push_back("");
    return fields;
}

bool try_parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

bool looks_like_timestamp(const std::string& s) {
    if (s.size() < 16) return false;
    try {
        parse_timestamp(s);
        return true;
    } catch (const DataError&) {
        return false;
    }
}

} // namespace

SeriesFrame load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    if (options.samples_per_hour < 1)
        throw ConfigError("samples_per_hour must be >= 1");

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw DataError(path + " is empty");

    auto first = split_line(lines[0], options.delimiter);
    if (first.empty()) throw DataError(path + ": first row has no fields");

    // Header detection: a row is data if every field is numeric or a timestamp.
    bool has_header;
    if (options.header == CsvOptions::Header::Yes) {
        has_header = true;
    } else if (options.header == CsvOptions::Header::No) {
        has_header = false;
    } else {
        has_header = false;
        for (const auto& f : first) {
            double unused;
            if (!try_parse_double(f, unused) && !looks_like_timestamp(f)) {
                has_header = true;
                break;
            }
        }
    }

    const std::size_t first_data = has_header ? 1 : 0;
    if (first_data >= lines.size()) throw DataError(path + ": no data rows");
    auto probe = split_line(lines[first_data], options.delimiter);

    int ts_col = options.timestamp_column;
    if (ts_col == -2) ts_col = (!probe.empty() && looks_like_timestamp(probe[0])) ? 0 : -1;
    if (ts_col >= static_cast<int>(probe.size()))
        throw DataError(path + ": timestamp column " + std::to_string(ts_col) + " out of range");

    SeriesFrame frame;
    frame.name = options.name;
    frame.samples_per_hour = options.samples_per_hour;
    frame.n_vars = probe.size() - (ts_col >= 0 ? 1 : 0);
    if (frame.n_vars < 1) throw DataError(path + ": no value columns");

    if (has_header) {
        auto header_fields = split_line(lines[0], options.delimiter);
        for (std::size_t c = 0; c < header_fields.size(); ++c)
            if (static_cast<int>(c) != ts_col) frame.variable_names.push_back(header_fields[c]);
    }
    while (frame.variable_names.size() < frame.n_vars)
        frame.variable_names.push_back("v" + std::to_string(frame.variable_names.size()));

    const std::int64_t step = 3600 / options.samples_per_hour;
    const bool with_ts = ts_col >= 0;
    std::vector<double> prev_row;

    for (std::size_t li = first_data; li < lines.size(); ++li) {
        auto fields = split_line(lines[li], options.delimiter);
        const std::size_t row_number = li + 1; // 1-based, as in the file
        if (fields.size() != probe.size())
            throw DataError(path + ": row " + std::to_string(row_number) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(probe.size()));

        std::int64_t ts = 0;
        if (with_ts) {
            try {
                ts = parse_timestamp(fields[static_cast<std::size_t>(ts_col)]);
            } catch (const DataError& e) {
                throw DataError(path + ": row " + std::to_string(row_number) + ": " + e.what());
            }
            if (!frame.timestamps.empty()) {
                const std::int64_t delta = ts - frame.timestamps.back();
                if (delta == 0)
                    throw DataError(path + ": duplicate timestamp at row " +
                                    std::to_string(row_number));
                if (delta < 0)
                    throw DataError(path + ": timestamps not increasing at row " +
                                    std::to_string(row_number));
                if (delta % step != 0)
                    throw DataError(path + ": irregular timestamp step at row " +
                                    std::to_string(row_number));
                if (delta != step) {
                    if (options.fill == CsvOptions::Fill::Reject)
                        throw DataError(path + ": gap of " + std::to_string(delta / step - 1) +
                                        " rows before row " + std::to_string(row_number));
                    for (std::int64_t t = frame.timestamps.back() + step; t < ts; t += step) {
                        frame.timestamps.push_back(t);
                        frame.values.insert(frame.values.end(), prev_row.begin(), prev_row.end());
                        ++frame.n_rows;
                        ++frame.filled_rows;
                    }
                }
            }
        }

        std::vector<double> row(frame.n_vars);
        std::size_t vi = 0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (static_cast<int>(c) == ts_col) continue;
            double v;
            if (!try_parse_double(fields[c], v) || !std::isfinite(v)) {
                if (fields[c].empty() && options.fill == CsvOptions::Fill::ForwardFill &&
                    !prev_row.empty()) {
                    v = prev_row[vi];
                    ++frame.filled_rows;
                } else {
                    throw DataError(path + ": unparseable value at row " +
                                    std::to_string(row_number) + ", column " + std::to_string(c + 1) +
                                    ": '" + fields[c] + "'");
                }
            }
            row[vi++] = v;
        }
        if (with_ts) frame.timestamps.push_back(ts);
        frame.values.insert(frame.values.end(), row.begin(), row.end());
        ++frame.n_rows;
        prev_row = std::move(row);
    }
    return frame;
}

void save_csv(const SeriesFrame& frame, const std::string& path, bool with_timestamps) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out.precision(17);
    if (with_timestamps && frame.timestamps.empty())
        throw ContractError("frame has no timestamps to write");
    if (with_timestamps) out << "timestamp,";
    for (std::size_t v = 0; v < frame.n_vars; ++v) {
        if (v) out << ",";
        out << (v < frame.variable_names.size() ? frame.variable_names[v]
                                                : "v" + std::to_string(v));
    }
    out << "\n";
    for (std::size_t r = 0; r < frame.n_rows; ++r) {
        if (with_timestamps) out << format_timestamp(frame.timestamps[r]) << ",";
        for (std::size_t v = 0; v < frame.n_vars; ++v) {
            if (v) out << ",";
            out << frame.value(r, v);
        }
        out << "\n";
    }
    if (!out) throw DataError("failed writing " + path);
}

SeriesFrame synth_seasonal(std::size_t days, int samples_per_hour,
                           const SynthComponents& components, std::uint64_t seed) {
    if (days < 2) throw ContractError("synth_seasonal: need at least 2 days");
    const PeriodSpec spec = make_period_spec(samples_per_hour);
    const auto period = static_cast<std::size_t>(spec.period);
    const std::size_t n = days * period;

    SeriesFrame frame;
    frame.name = "synth";
    frame.samples_per_hour = samples_per_hour;
    frame.n_rows = n;
    frame.n_vars = 1;
    frame.variable_names = {"y"};
    frame.values.resize(n);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double a = components.amplitude;
    constexpr double pi = 3.14159265358979323846;
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t in_day = t % period;
        const double u = static_cast<double>(in_day) / static_cast<double>(period);
        double profile;
        if (u < 1.0 / 3.0) {
            profile = a * (3.0 * u); // morning ramp up
        } else if (u < 2.0 / 3.0) {
            const double v = 3.0 * (u - 1.0 / 3.0);
            profile = a + a * std::pow(std::sin(pi * v), components.peak_sharpness);
        } else {
            profile = a * (1.0 - 3.0 * (u - 2.0 / 3.0)); // evening ramp down
        }
        double value = profile +
                       components.trend_slope * (static_cast<double>(t) /
                                                 static_cast<double>(period));
        if (components.noise_std > 0.0) value += components.noise_std * noise(rng);
        frame.values[t] = value;
    }
    return frame;
}

std::uint64_t frame_hash(const SeriesFrame& frame) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    mix(frame.values.data(), frame.values.size() * sizeof(double));
    mix(frame.timestamps.data(), frame.timestamps.size() * sizeof(std::int64_t));
    mix(&frame.n_rows, sizeof(frame.n_rows));
    mix(&frame.n_vars, sizeof(frame.n_vars));
    for (const auto& name : frame.variable_names) mix(name.data(), name.size());
    return h;
}

} // namespace mssd
