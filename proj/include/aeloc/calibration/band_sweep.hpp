#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "aeloc/calibration/line_fit.hpp"
#include "aeloc/error.hpp"
#include "aeloc/signal/delay.hpp"

namespace aeloc::calibration {

/// Lattice of fixed-width bands: f_low = f_start + k * step for as long as
/// f_low + width <= f_stop, or exactly `count` bands when a count is given.
struct BandGrid {
    double width = 10e3;
    double step = 1e3;
    double f_start = 5e3;
    double f_stop = 75e3;
    std::optional<int> count;

    std::vector<FilterSpec> bands(int order) const {
        if (!(width > 0.0) || !(step > 0.0) || !(f_start > 0.0))
            throw InvalidArgument("BandGrid: width, step and start must be positive");
        std::vector<FilterSpec> out;
        if (count) {
            if (*count < 1) throw InvalidArgument("BandGrid: band count must be at least 1");
            for (int k = 0; k < *count; ++k) out.push_back({f_start + k * step, f_start + k * step + width, order});
            return out;
        }
        const double limit = f_stop * (1.0 + 1e-12);
        for (int k = 0;; ++k) {
            const double lo = f_start + k * step;
            if (lo + width > limit) break;
            out.push_back({lo, lo + width, order});
        }
        if (out.empty()) throw InvalidArgument("BandGrid: no band of the given width fits between start and stop");
        return out;
    }
};

/// A prototype source at a known position with its recorded signal pair.
struct CalibrationSource {
    double position = 0; ///< mm
    WaveformPair signals;
};

struct CalibrationRecord {
    FilterSpec band;
    std::vector<double> delays; ///< s, NaN where estimation failed
    double rmse = 0;            ///< mm; +inf when any delay failed
    double slope = 0;           ///< s/mm
    double intercept = 0;       ///< s
    std::string failure;        ///< first estimation error, empty on success

    bool ok() const noexcept { return failure.empty(); }
};

struct CalibrationResult {
    FilterSpec best_band;
    std::size_t best_index = 0;
    double velocity = 0; ///< km/s
    std::vector<CalibrationRecord> records;
    std::vector<std::size_t> outliers; ///< prototype indices excluded from the final fit
    LineFit fit;                       ///< final (outlier-rejected) fit of the best band
    bool flat_surface = false;
    std::vector<std::string> warnings;
};

/// v = 2 / |slope| for sensors bracketing the sources: dt(z) = (2z - x1 - x2) / v.
inline double estimate_velocity(double slope_s_per_mm, double sensor_separation_mm) {
    if (slope_s_per_mm == 0.0 || !std::isfinite(slope_s_per_mm))
        throw InvalidArgument("estimate_velocity: zero slope (degenerate geometry)");
    if (!(sensor_separation_mm > 0.0)) throw InvalidArgument("estimate_velocity: sensor separation must be positive");
    const double mm_per_s = 2.0 / std::abs(slope_s_per_mm);
    return mm_per_s * 1e-6;
}

struct SweepOptions {
    BandGrid grid;
    int order = 4;
    int max_lag = 0;
    bool refine = true;
    double sensor_separation = 2400; ///< mm
    unsigned threads = 0;            ///< 0 = hardware concurrency
};

inline CalibrationRecord evaluate_band(std::span<const CalibrationSource> sources, const FilterSpec& band,
                                       const SweepOptions& opt) {
    const double fs = sources.front().signals.ch1.sample_rate();
    CalibrationRecord rec;
    rec.band = band;
    const auto filter = design_bandpass(band, fs);
    std::vector<LinePoint> points;
    for (const auto& src : sources) {
        try {
            const double dt = measure_delay(src.signals, filter, opt.max_lag, opt.refine).delay;
            rec.delays.push_back(dt);
            points.push_back({src.position, dt});
        } catch (const Error& e) {
            rec.delays.push_back(std::numeric_limits<double>::quiet_NaN());
            if (rec.failure.empty()) rec.failure = e.what();
        }
    }
    if (!rec.ok()) {
        rec.rmse = std::numeric_limits<double>::infinity();
        return rec;
    }
    const auto fit = fit_line(points);
    rec.slope = fit.slope;
    rec.intercept = fit.intercept;
    rec.rmse = fit.rmse_position;
    return rec;
}

/// Band sweep: for every band, filter all prototype pairs, estimate delays, fit
/// a line through (z, dt) and record the positional RMSE. The band with the
/// smallest RMSE wins (ties to the lowest f_low); its fit is redone with one
/// pass of outlier rejection and the velocity follows from the slope.
inline CalibrationResult sweep_bands(std::span<const CalibrationSource> sources, const SweepOptions& opt) {
    if (sources.size() < 3) throw InvalidArgument("sweep_bands: need at least 3 prototypes, got " + std::to_string(sources.size()));
    const double fs = sources.front().signals.ch1.sample_rate();
    for (const auto& s : sources) {
        require_same_rate(s.signals.ch1, sources.front().signals.ch1, "sweep_bands");
        require_same_rate(s.signals.ch2, sources.front().signals.ch1, "sweep_bands");
    }

    CalibrationResult result;
    std::vector<FilterSpec> bands;
    for (const auto& b : opt.grid.bands(opt.order)) {
        try {
            validate(b, fs);
            bands.push_back(b);
        } catch (const InvalidArgument& e) {
            result.warnings.push_back("skipping band " + std::to_string(b.f_low) + "-" + std::to_string(b.f_high) +
                                      " Hz: " + e.what());
        }
    }
    if (bands.empty()) throw InvalidArgument("sweep_bands: every band in the grid is invalid for " + std::to_string(fs) + " Hz");

    result.records.resize(bands.size());
    unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(bands.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < bands.size(); ++i) result.records[i] = evaluate_band(sources, bands[i], opt);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < bands.size(); i += threads)
                    result.records[i] = evaluate_band(sources, bands[i], opt);
            });
        for (auto& th : pool) th.join();
    }

    std::size_t best = result.records.size();
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        const auto& r = result.records[i];
        if (!r.ok()) {
            result.warnings.push_back("band " + std::to_string(r.band.f_low) + "-" + std::to_string(r.band.f_high) +
                                      " Hz: " + r.failure);
            continue;
        }
        if (best == result.records.size() || r.rmse < result.records[best].rmse) best = i;
    }
    if (best == result.records.size()) throw Error("sweep_bands: delay estimation failed in every band");

    result.best_index = best;
    result.best_band = result.records[best].band;
    std::vector<LinePoint> points;
    for (std::size_t i = 0; i < sources.size(); ++i) points.push_back({sources[i].position, result.records[best].delays[i]});
    auto robust = fit_line_robust(points, 1.0 / fs);
    result.outliers = std::move(robust.outliers);
    result.fit = std::move(robust.fit);
    result.velocity = estimate_velocity(result.fit.slope, opt.sensor_separation);

    // Flat surface: every band within one band width of the winner stays within
    // 10x its RMSE (floored at 0.01 sample expressed in mm).
    const auto& winner = result.records[best];
    const double floor_mm = 0.01 / fs / std::abs(winner.slope);
    const double limit = 10.0 * std::max(winner.rmse, floor_mm);
    result.flat_surface = true;
    for (const auto& r : result.records)
        if (std::abs(r.band.f_low - winner.band.f_low) <= opt.grid.width * (1 + 1e-12) && !(r.rmse <= limit))
            result.flat_surface = false;
    if (result.flat_surface)
        result.warnings.push_back("rmse surface is flat around the best band; the specimen looks nondispersive "
                                  "and the band choice is weakly determined");
    return result;
}

} // namespace aeloc::calibration
