#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "aeloc/signal/waveform.hpp"
#include "aeloc/simulator/fft.hpp"
#include "aeloc/simulator/source.hpp"
#include "aeloc/simulator/specimen.hpp"

namespace aeloc::sim {

/// Transfer function of a path of `distance` mm at frequency f:
/// exp(-j 2 pi f d / v(f)) * 10^(-alpha(f) d / 20).
inline std::complex<double> path_response(const SpecimenModel& m, double f, double distance_mm) {
    const double v_mm_per_s = m.velocity(f) * 1e6;
    const double phase = -2.0 * std::numbers::pi * f * distance_mm / v_mm_per_s;
    const double gain = std::pow(10.0, -m.attenuation(f) * (distance_mm * 1e-3) / 20.0);
    return std::polar(gain, phase);
}

/// Received signal at `sensor` (mm), without noise. Propagation is applied per
/// frequency bin, so it is circular over the record.
inline std::vector<double> propagate_to(const std::vector<std::complex<double>>& source_spectrum, double position,
                                        double sensor, const SpecimenModel& m) {
    const auto n = static_cast<std::size_t>(m.record_length);
    const double direct = std::abs(position - sensor);
    const double via_start = position + sensor;
    const double via_end = (m.length - position) + (m.length - sensor);
    std::vector<std::complex<double>> spec(source_spectrum.size());
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double f = static_cast<double>(k) * m.sample_rate / static_cast<double>(n);
        std::complex<double> h = path_response(m, f, direct);
        if (m.reflection_coefficient != 0.0)
            h += m.reflection_coefficient * (path_response(m, f, via_start) + path_response(m, f, via_end));
        spec[k] = source_spectrum[k] * h;
    }
    return irfft(spec, n);
}

inline double mean_power(const std::vector<double>& x) {
    double ss = 0.0;
    for (double v : x) ss += v * v;
    return ss / static_cast<double>(x.size());
}

/// Both sensor signals for one source, with white noise at the configured SNR
/// (relative to each channel's mean signal power over the record).
inline WaveformPair propagate(const std::vector<double>& excitation, const SourceSpec& spec, const SpecimenModel& m) {
    m.validate();
    if (excitation.size() != static_cast<std::size_t>(m.record_length))
        throw InvalidArgument("propagate: excitation length does not match the record length");
    const auto spectrum = rfft(excitation);
    auto y1 = propagate_to(spectrum, spec.position, m.sensor_1, m);
    auto y2 = propagate_to(spectrum, spec.position, m.sensor_2, m);
    if (m.noise_snr_db) {
        std::uint32_t stream = 1;
        for (auto* y : {&y1, &y2}) {
            const double sigma = std::sqrt(mean_power(*y) / std::pow(10.0, *m.noise_snr_db / 10.0));
            auto rng = make_engine(spec.seed, stream++);
            std::normal_distribution<double> gauss(0.0, sigma);
            for (double& v : *y) v += gauss(rng);
        }
    }
    return {Waveform(std::move(y1), m.sample_rate), Waveform(std::move(y2), m.sample_rate)};
}

/// Source synthesis followed by propagation.
inline WaveformPair simulate_source(const SourceSpec& spec, const SpecimenModel& m) {
    return propagate(synth_source(spec, m), spec, m);
}

/// Arrival-time difference t1 - t2 for a nondispersive specimen of velocity v (km/s).
inline double geometric_delay(double position, const SpecimenModel& m, double velocity_km_s) {
    const double d1 = std::abs(position - m.sensor_1);
    const double d2 = std::abs(position - m.sensor_2);
    return (d1 - d2) / (velocity_km_s * 1e6);
}

} // namespace aeloc::sim
