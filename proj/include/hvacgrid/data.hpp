#pragma once

// Weather and price time series: delimited-text ingestion, validation,
// resampling onto the control-slot grid, day slicing, and the bundled
// synthetic generator.
//
// File schema: a header row naming the columns, comma separated.
//   weather: timestamp,t_out_c,irradiance_kw_m2
//   prices:  timestamp,buy_price
// Column order is free; extra columns are ignored. Timestamps are ISO 8601
// with an explicit offset, e.g. 2023-05-01T00:00:00+05:30 or ...Z. Each row
// holds the value at its instant; the final row is held for one input
// interval so an hourly file of 24 rows covers a whole day.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hvacgrid/errors.hpp"
#include "hvacgrid/numfmt.hpp"

namespace hvacgrid::data {

inline constexpr std::size_t kSlotsPerDay = 48;

struct WeatherSeries {
    std::int64_t start_epoch_s = 0;
    double slot_hours = 0.5;
    std::vector<double> t_out_c;
    std::vector<double> irradiance_kw_m2;
    std::size_t clamped_irradiance = 0;  // negative readings set to zero during ingestion

    std::size_t size() const { return t_out_c.size(); }
};

struct PriceSeries {
    std::int64_t start_epoch_s = 0;
    double slot_hours = 0.5;
    std::vector<double> buy_price;

    std::size_t size() const { return buy_price.size(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(delim, pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

inline bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

}  // namespace detail

/// Parses YYYY-MM-DDTHH:MM:SS followed by Z or +HH:MM / -HH:MM into Unix seconds.
inline std::optional<std::int64_t> parse_timestamp(std::string_view s) {
    using namespace std::chrono;
    if (s.size() < 20 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
        s[16] != ':')
        return std::nullopt;
    int y, mo, d, h, mi, se;
    if (!detail::parse_int(s.substr(0, 4), y) || !detail::parse_int(s.substr(5, 2), mo) ||
        !detail::parse_int(s.substr(8, 2), d) || !detail::parse_int(s.substr(11, 2), h) ||
        !detail::parse_int(s.substr(14, 2), mi) || !detail::parse_int(s.substr(17, 2), se))
        return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || se > 60) return std::nullopt;
    std::string_view tz = s.substr(19);
    int offset_s = 0;
    if (tz == "Z") {
        offset_s = 0;
    } else if (tz.size() == 6 && (tz[0] == '+' || tz[0] == '-') && tz[3] == ':') {
        int oh, om;
        if (!detail::parse_int(tz.substr(1, 2), oh) || !detail::parse_int(tz.substr(4, 2), om)) return std::nullopt;
        offset_s = (oh * 3600 + om * 60) * (tz[0] == '-' ? -1 : 1);
    } else {
        return std::nullopt;  // offset is mandatory
    }
    const auto days_since = sys_days(ymd).time_since_epoch().count();
    return static_cast<std::int64_t>(days_since) * 86400 + h * 3600 + mi * 60 + se - offset_s;
}

/// Formats Unix seconds as YYYY-MM-DDTHH:MM:SS with the given fixed offset.
inline std::string format_timestamp(std::int64_t epoch_s, int offset_minutes = 0) {
    using namespace std::chrono;
    const std::int64_t local = epoch_s + offset_minutes * 60;
    std::int64_t days_count = local / 86400;
    std::int64_t rem = local % 86400;
    if (rem < 0) {
        rem += 86400;
        --days_count;
    }
    const year_month_day ymd{sys_days{days{days_count}}};
    char buf[40];
    const int om = std::abs(offset_minutes);
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d%s", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                  static_cast<int>((rem % 3600) / 60), static_cast<int>(rem % 60), "");
    std::string out(buf);
    if (offset_minutes == 0) {
        out += "Z";
    } else {
        std::snprintf(buf, sizeof(buf), "%c%02d:%02d", offset_minutes < 0 ? '-' : '+', om / 60, om % 60);
        out += buf;
    }
    return out;
}

/// Raw table: timestamps plus named numeric columns.
struct RawTable {
    std::vector<std::int64_t> times;
    std::map<std::string, std::vector<double>> columns;
};

inline RawTable read_table(std::istream& in, const std::vector<std::string>& required) {
    RawTable t;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tl = detail::trim(line);
        if (tl.empty() || tl.front() == '#') continue;
        for (auto f : detail::split(tl, ',')) header.emplace_back(f);
        break;
    }
    if (header.empty()) throw ParseError("missing header row", lineno);
    auto col_of = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ParseError("missing column '" + name + "'", lineno);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t ts_col = col_of("timestamp");
    std::vector<std::size_t> idx;
    for (const auto& r : required) {
        idx.push_back(col_of(r));
        t.columns[r];
    }
    while (std::getline(in, line)) {
        ++lineno;
        const auto tl = detail::trim(line);
        if (tl.empty() || tl.front() == '#') continue;
        const auto f = detail::split(tl, ',');
        if (f.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(f.size()),
                             lineno);
        const auto ts = parse_timestamp(f[ts_col]);
        if (!ts) throw ParseError("bad timestamp '" + std::string(f[ts_col]) + "'", lineno);
        t.times.push_back(*ts);
        for (std::size_t k = 0; k < required.size(); ++k) {
            const auto v = parse_double(f[idx[k]]);
            if (!v || !std::isfinite(*v))
                throw ParseError("bad number '" + std::string(f[idx[k]]) + "' in column " + required[k], lineno);
            t.columns[required[k]].push_back(*v);
        }
    }
    if (t.times.size() < 2) throw ValidationError("series needs at least two rows");
    for (std::size_t i = 1; i < t.times.size(); ++i)
        if (t.times[i] <= t.times[i - 1])
            throw ValidationError("timestamps must be strictly increasing (row " + std::to_string(i + 1) + ")");
    return t;
}

/// Linear interpolation of (times, values) onto a uniform grid starting at
/// times.front() with spacing slot_hours, covering up to one input interval
/// past the final row (that tail holds the last value).
inline std::vector<double> resample(const std::vector<std::int64_t>& times, const std::vector<double>& values,
                                    double slot_hours) {
    const double dt_s = slot_hours * 3600.0;
    const double last_gap = static_cast<double>(times.back() - times[times.size() - 2]);
    const double span = static_cast<double>(times.back() - times.front()) + last_gap;
    const auto n = static_cast<std::size_t>(std::floor(span / dt_s + 1e-9));
    std::vector<double> out(n);
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(times.front()) + static_cast<double>(k) * dt_s;
        while (j + 1 < times.size() && static_cast<double>(times[j + 1]) <= t) ++j;
        if (j + 1 >= times.size()) {
            out[k] = values.back();
        } else {
            const double t0 = static_cast<double>(times[j]);
            const double t1 = static_cast<double>(times[j + 1]);
            const double w = (t - t0) / (t1 - t0);
            out[k] = w == 0.0 ? values[j] : values[j] + w * (values[j + 1] - values[j]);
        }
    }
    return out;
}

inline WeatherSeries load_weather(std::istream& in, double slot_hours = 0.5) {
    const RawTable t = read_table(in, {"t_out_c", "irradiance_kw_m2"});
    WeatherSeries w;
    w.start_epoch_s = t.times.front();
    w.slot_hours = slot_hours;
    auto irr = t.columns.at("irradiance_kw_m2");
    for (double& v : irr)
        if (v < 0.0) {
            v = 0.0;
            ++w.clamped_irradiance;
        }
    w.t_out_c = resample(t.times, t.columns.at("t_out_c"), slot_hours);
    w.irradiance_kw_m2 = resample(t.times, irr, slot_hours);
    return w;
}

inline WeatherSeries load_weather(const std::string& path, double slot_hours = 0.5) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open weather file " + path);
    return load_weather(in, slot_hours);
}

inline PriceSeries load_prices(std::istream& in, double slot_hours = 0.5) {
    const RawTable t = read_table(in, {"buy_price"});
    for (std::size_t i = 0; i < t.times.size(); ++i)
        if (t.columns.at("buy_price")[i] < 0.0)
            throw ValidationError("negative buy price at row " + std::to_string(i + 1));
    PriceSeries p;
    p.start_epoch_s = t.times.front();
    p.slot_hours = slot_hours;
    p.buy_price = resample(t.times, t.columns.at("buy_price"), slot_hours);
    return p;
}

inline PriceSeries load_prices(const std::string& path, double slot_hours = 0.5) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open price file " + path);
    return load_prices(in, slot_hours);
}

inline std::size_t full_days(std::size_t slots) { return slots / kSlotsPerDay; }

/// Slots [48 d, 48 d + 48) of a per-slot vector.
inline std::vector<double> slice_day(const std::vector<double>& series, std::size_t day) {
    if ((day + 1) * kSlotsPerDay > series.size())
        throw InputError("slice_day: day " + std::to_string(day) + " is not fully covered by the series");
    return {series.begin() + static_cast<std::ptrdiff_t>(day * kSlotsPerDay),
            series.begin() + static_cast<std::ptrdiff_t>((day + 1) * kSlotsPerDay)};
}

/// Directory for bundled data: HVACGRID_DATA_DIR if set, else the given default.
inline std::string data_dir(const std::string& fallback) {
    if (const char* env = std::getenv("HVACGRID_DATA_DIR"); env && *env) return env;
    return fallback;
}

// --- synthetic series -------------------------------------------------------

struct SyntheticOptions {
    std::size_t days = 25;
    std::string start = "2023-05-01T00:00:00+05:30";
    int offset_minutes = 330;
    double t_min = 24.0;        // at 05:00
    double t_max = 36.0;        // at 14:00
    double irr_peak = 0.9;      // kW/m^2 at solar noon, daylight 06:00-18:00
    double price_offpeak = 0.10;
    double price_peak = 0.22;
    double peak_start_h = 17.0;
    double peak_end_h = 22.0;
    double day_variation = 2.0;  // +/- degC day-to-day swing of the daily curve
};

/// Diurnal outdoor temperature: cosine warming from the 05:00 minimum to the
/// 14:00 maximum and cooling back over the remaining 15 h.
inline double diurnal_temperature(double hour, double t_min, double t_max) {
    const double rise_start = 5.0, peak = 14.0;
    double h = hour;
    if (h < rise_start) h += 24.0;
    const double amp = t_max - t_min;
    if (h <= peak) {
        const double x = (h - rise_start) / (peak - rise_start);
        return t_min + amp * 0.5 * (1.0 - std::cos(std::numbers::pi * x));
    }
    const double x = (h - peak) / (24.0 + rise_start - peak);
    return t_min + amp * 0.5 * (1.0 + std::cos(std::numbers::pi * x));
}

inline double clipped_sine_irradiance(double hour, double peak) {
    if (hour <= 6.0 || hour >= 18.0) return 0.0;
    return peak * std::sin(std::numbers::pi * (hour - 6.0) / 12.0);
}

/// Deterministic per-day shift in [-1, 1] (no RNG so files are reproducible everywhere).
inline double day_shift(std::size_t d) {
    return std::sin(1.7 * static_cast<double>(d) + 0.3) * std::cos(0.45 * static_cast<double>(d));
}

inline void write_synthetic_weather(std::ostream& os, const SyntheticOptions& o) {
    const auto start = parse_timestamp(o.start);
    if (!start) throw InputError("synthetic: bad start timestamp");
    os << "timestamp,t_out_c,irradiance_kw_m2\n";
    for (std::size_t d = 0; d < o.days; ++d) {
        const double shift = o.day_variation * day_shift(d);
        const double cloud = 0.8 + 0.2 * (0.5 + 0.5 * day_shift(d + 101));
        for (std::size_t k = 0; k < kSlotsPerDay; ++k) {
            const double hour = 0.5 * static_cast<double>(k);
            const std::int64_t ts = *start + static_cast<std::int64_t>(d * 86400 + k * 1800);
            os << format_timestamp(ts, o.offset_minutes) << ','
               << fmt_double(std::round(1e3 * diurnal_temperature(hour, o.t_min + shift, o.t_max + shift)) / 1e3) << ','
               << fmt_double(std::round(1e4 * cloud * clipped_sine_irradiance(hour, o.irr_peak)) / 1e4) << '\n';
        }
    }
}

inline void write_synthetic_prices(std::ostream& os, const SyntheticOptions& o) {
    const auto start = parse_timestamp(o.start);
    if (!start) throw InputError("synthetic: bad start timestamp");
    os << "timestamp,buy_price\n";
    for (std::size_t d = 0; d < o.days; ++d) {
        for (std::size_t k = 0; k < kSlotsPerDay; ++k) {
            const double hour = 0.5 * static_cast<double>(k);
            const std::int64_t ts = *start + static_cast<std::int64_t>(d * 86400 + k * 1800);
            const bool peak = hour >= o.peak_start_h && hour < o.peak_end_h;
            os << format_timestamp(ts, o.offset_minutes) << ',' << fmt_double(peak ? o.price_peak : o.price_offpeak)
               << '\n';
        }
    }
}

}  // namespace hvacgrid::data
