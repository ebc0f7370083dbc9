#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aeloc/error.hpp"

namespace aeloc::sim {

/// Piecewise-linear curve through (x, y) breakpoints, held constant beyond the ends.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    explicit PiecewiseLinear(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
        if (points_.empty()) throw InvalidArgument("PiecewiseLinear: no breakpoints");
        for (std::size_t i = 1; i < points_.size(); ++i)
            if (!(points_[i].first > points_[i - 1].first))
                throw InvalidArgument("PiecewiseLinear: breakpoints must be strictly increasing");
    }
    static PiecewiseLinear constant(double y) { return PiecewiseLinear({{0.0, y}}); }

    double operator()(double x) const {
        if (x <= points_.front().first) return points_.front().second;
        if (x >= points_.back().first) return points_.back().second;
        const auto hi = std::upper_bound(points_.begin(), points_.end(), x,
                                         [](double v, const auto& p) { return v < p.first; });
        const auto lo = hi - 1;
        const double t = (x - lo->first) / (hi->first - lo->first);
        return lo->second + t * (hi->second - lo->second);
    }

    double min_value() const {
        double m = points_.front().second;
        for (const auto& p : points_) m = std::min(m, p.second);
        return m;
    }
    double max_value() const {
        double m = points_.front().second;
        for (const auto& p : points_) m = std::max(m, p.second);
        return m;
    }
    const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }

    friend bool operator==(const PiecewiseLinear&, const PiecewiseLinear&) = default;

private:
    std::vector<std::pair<double, double>> points_;
};

/// One-dimensional band specimen with two point sensors.
struct SpecimenModel {
    double length = 4000;     ///< mm
    double sensor_1 = 800;    ///< mm
    double sensor_2 = 3200;   ///< mm
    PiecewiseLinear velocity; ///< Hz -> km/s (phase velocity)
    PiecewiseLinear attenuation = PiecewiseLinear::constant(5.0); ///< Hz -> dB/m
    std::optional<double> noise_snr_db = 20.0;                    ///< nullopt: noiseless
    double sample_rate = 1e6;                                     ///< Hz
    int record_length = 16384;                                    ///< samples
    double reflection_coefficient = 0.0; ///< first reflection off each band end

    double sensor_separation() const noexcept { return sensor_2 - sensor_1; }

    /// Lag window wide enough for any source between the sensors, plus two
    /// samples so a source at a sensor does not peak on the window edge.
    int default_max_lag() const {
        return static_cast<int>(std::ceil(sensor_separation() / (velocity.min_value() * 1e6) * sample_rate)) + 2;
    }

    void validate() const {
        if (!(length > 0.0)) throw InvalidArgument("specimen length must be positive");
        if (!(0.0 <= sensor_1 && sensor_1 < sensor_2 && sensor_2 <= length))
            throw InvalidArgument("sensor positions must satisfy 0 <= sensor_1 < sensor_2 <= length");
        if (velocity.points().empty() || !(velocity.min_value() > 0.0))
            throw InvalidArgument("velocity curve must be positive everywhere");
        if (attenuation.points().empty() || attenuation.min_value() < 0.0)
            throw InvalidArgument("attenuation must be nonnegative");
        if (!(sample_rate > 0.0)) throw InvalidArgument("sample rate must be positive");
        if (record_length < 2) throw InvalidArgument("record length must be at least 2 samples");
        const double max_delay = sensor_separation() / (velocity.min_value() * 1e6);
        if (!(record_length / sample_rate > max_delay))
            throw InvalidArgument("record of " + std::to_string(record_length) +
                                  " samples is too short for the maximum propagation delay of " +
                                  std::to_string(max_delay) + " s");
        if (noise_snr_db && !std::isfinite(*noise_snr_db)) throw InvalidArgument("noise SNR must be finite or absent");
    }
};

/// Dispersive default: 1.7 km/s over 35-45 kHz, falling linearly to 60% at
/// 5 kHz and rising linearly to 140% at 75 kHz, constant beyond.
inline PiecewiseLinear default_velocity_curve() {
    return PiecewiseLinear({{5e3, 1.7 * 0.6}, {35e3, 1.7}, {45e3, 1.7}, {75e3, 1.7 * 1.4}});
}

/// 4000 mm band, 23 holes 100 mm apart in the middle, sensors 100 mm outside
/// the terminal holes (2400 mm apart).
inline SpecimenModel default_specimen() {
    SpecimenModel m;
    m.velocity = default_velocity_curve();
    return m;
}

/// The 23 test holes of the default specimen.
inline std::vector<double> default_hole_positions(const SpecimenModel& m = default_specimen()) {
    std::vector<double> out;
    for (int i = 0; i < 23; ++i) out.push_back(m.sensor_1 + 100.0 + 100.0 * i);
    return out;
}

/// Every second hole: 12 prototype sites 200 mm apart.
inline std::vector<double> default_prototype_positions(const SpecimenModel& m = default_specimen()) {
    std::vector<double> out;
    for (int i = 0; i < 12; ++i) out.push_back(m.sensor_1 + 100.0 + 200.0 * i);
    return out;
}

/// Sites spaced `spacing` mm from `first` up to `last` inclusive.
inline std::vector<double> evenly_spaced_positions(double first, double last, double spacing) {
    std::vector<double> out;
    const int n = static_cast<int>(std::floor((last - first) / spacing + 1e-9));
    for (int i = 0; i <= n; ++i) out.push_back(first + spacing * i);
    return out;
}

} // namespace aeloc::sim
