#pragma once

// The trained locator: a prototype set of (delay -> position) pairs together
// with the pre-processing it was trained with.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>

#include "aeloc/grnn/database_io.hpp"
#include "aeloc/grnn/grnn.hpp"
#include "aeloc/signal/delay.hpp"

namespace aeloc::pipeline {

struct Locator {
    grnn::PrototypeSet prototypes;
    FilterSpec filter;
    double sample_rate = 1e6;
    int max_lag = 0;
    bool refine = true;
    std::optional<double> sensor_separation; ///< mm
};

struct LocationEstimate {
    double position = 0;   ///< mm
    double delay = 0;      ///< s
    double top_weight = 0;
    std::size_t effective_support = 0;
    double peak_sharpness = 0;
    bool extrapolated = false;
};

inline grnn::Database to_database(const Locator& loc) {
    grnn::Database db{loc.prototypes, {}};
    db.metadata = {{"filter_f_low_hz", io::format_double(loc.filter.f_low)},
                   {"filter_f_high_hz", io::format_double(loc.filter.f_high)},
                   {"filter_order", std::to_string(loc.filter.order)},
                   {"sample_rate_hz", io::format_double(loc.sample_rate)},
                   {"max_lag", std::to_string(loc.max_lag)},
                   {"refine", loc.refine ? "1" : "0"}};
    if (loc.sensor_separation) db.metadata.emplace_back("sensor_separation_mm", io::format_double(*loc.sensor_separation));
    return db;
}

inline Locator from_database(const grnn::Database& db, const std::string& origin = "<database>") {
    auto need = [&](const char* key) -> const std::string& {
        const auto* v = db.find(key);
        if (!v) throw IoError(origin + ": missing metadata '" + key + "'");
        return *v;
    };
    if (db.set.given_dim() != 1 || db.set.hidden_dim() != 1)
        throw IoError(origin + ": locator databases map one delay to one coordinate");
    Locator loc{db.set, {}, 0, 0, true, std::nullopt};
    loc.filter.f_low = io::parse_double(need("filter_f_low_hz"));
    loc.filter.f_high = io::parse_double(need("filter_f_high_hz"));
    loc.filter.order = static_cast<int>(io::parse_int(need("filter_order")));
    loc.sample_rate = io::parse_double(need("sample_rate_hz"));
    loc.max_lag = static_cast<int>(io::parse_int(need("max_lag")));
    loc.refine = need("refine") != "0";
    if (const auto* sep = db.find("sensor_separation_mm")) loc.sensor_separation = io::parse_double(*sep);
    return loc;
}

inline Locator read_locator(const std::filesystem::path& path) {
    return from_database(grnn::read_database(path), path.string());
}

/// A delay beyond the outermost prototype by more than half that prototype's
/// sigma counts as extrapolation, as does a kernel underflow.
inline bool outside_prototype_range(const grnn::PrototypeSet& set, double delay) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t n = 1; n < set.size(); ++n) {
        if (set[n].given[0] < set[lo].given[0]) lo = n;
        if (set[n].given[0] > set[hi].given[0]) hi = n;
    }
    return delay < set[lo].given[0] - 0.5 * set.sigmas()[lo] || delay > set[hi].given[0] + 0.5 * set.sigmas()[hi];
}

/// Application mode: filter, correlate, pick the delay and recall the position.
inline LocationEstimate locate(const Locator& loc, const WaveformPair& pair) {
    if (pair.ch1.sample_rate() != loc.sample_rate)
        throw InvalidArgument("signal sampled at " + std::to_string(pair.ch1.sample_rate()) +
                              " Hz but the locator was trained at " + std::to_string(loc.sample_rate) + " Hz");
    const auto filter = design_bandpass(loc.filter, loc.sample_rate);
    const auto delay = measure_delay(pair, filter, loc.max_lag, loc.refine);
    const double g[1] = {delay.delay};
    const auto est = grnn::estimate(loc.prototypes, g);
    LocationEstimate out;
    out.position = est.hidden[0];
    out.delay = delay.delay;
    out.top_weight = est.top_weight();
    out.effective_support = est.effective_support;
    out.peak_sharpness = delay.peak_sharpness;
    out.extrapolated = est.extrapolated || outside_prototype_range(loc.prototypes, delay.delay);
    return out;
}

} // namespace aeloc::pipeline
