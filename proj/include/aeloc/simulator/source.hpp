#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "aeloc/error.hpp"
#include "aeloc/simulator/fft.hpp"
#include "aeloc/simulator/specimen.hpp"

namespace aeloc::sim {

enum class SourceKind { DiscreteBurst, ContinuousNoise };

inline std::string to_string(SourceKind k) { return k == SourceKind::DiscreteBurst ? "discrete" : "continuous"; }

inline SourceKind parse_source_kind(const std::string& s) {
    if (s == "discrete") return SourceKind::DiscreteBurst;
    if (s == "continuous") return SourceKind::ContinuousNoise;
    throw InvalidArgument("unknown source kind '" + s + "' (expected 'discrete' or 'continuous')");
}

struct SourceSpec {
    double position = 0; ///< mm
    SourceKind kind = SourceKind::DiscreteBurst;
    double amplitude = 1.0; ///< burst peak, or RMS of continuous noise
    // discrete burst
    double burst_center_hz = 40e3;
    double burst_cycles = 10;
    double burst_onset_s = 1e-3;
    // continuous noise
    double band_low_hz = 20e3;
    double band_high_hz = 80e3;
    std::uint64_t seed = 1;

    /// Sources outside the sensor span are allowed but flagged.
    bool outside_sensor_span(const SpecimenModel& m) const { return position < m.sensor_1 || position > m.sensor_2; }
};

/// Deterministic engine for (seed, stream) so separate channels never share draws.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream, 0x5eedu};
    return std::mt19937_64(seq);
}

/// Excitation at the source: a Hann-windowed tone burst normalized to peak
/// `amplitude`, or Gaussian noise band-limited to [band_low, band_high] with RMS
/// `amplitude` spanning the whole record.
inline std::vector<double> synth_source(const SourceSpec& spec, const SpecimenModel& model) {
    const double fs = model.sample_rate;
    const auto n = static_cast<std::size_t>(model.record_length);
    const double nyquist = 0.5 * fs;
    std::vector<double> x(n, 0.0);

    if (spec.kind == SourceKind::DiscreteBurst) {
        if (!(spec.burst_center_hz > 0.0 && spec.burst_center_hz < nyquist))
            throw InvalidArgument("burst center frequency must lie in (0, Nyquist)");
        if (!(spec.burst_cycles > 0.0)) throw InvalidArgument("burst must last at least a fraction of a cycle");
        const auto len = static_cast<std::size_t>(std::lround(spec.burst_cycles * fs / spec.burst_center_hz));
        const auto onset = static_cast<std::size_t>(std::lround(spec.burst_onset_s * fs));
        if (len < 3 || onset + len > n) throw InvalidArgument("burst does not fit inside the record");
        const double mid = 0.5 * static_cast<double>(len - 1);
        double peak = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * k / static_cast<double>(len - 1)));
            const double v = w * std::cos(2.0 * std::numbers::pi * spec.burst_center_hz * (k - mid) / fs);
            x[onset + k] = v;
            peak = std::max(peak, std::abs(v));
        }
        for (double& v : x) v *= spec.amplitude / peak;
        return x;
    }

    if (!(0.0 <= spec.band_low_hz && spec.band_low_hz < spec.band_high_hz && spec.band_high_hz <= nyquist))
        throw InvalidArgument("continuous source band must satisfy 0 <= low < high <= Nyquist");
    auto rng = make_engine(spec.seed, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& v : x) v = gauss(rng);
    auto spectrum = rfft(x);
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        const double f = static_cast<double>(k) * fs / static_cast<double>(n);
        if (f < spec.band_low_hz || f > spec.band_high_hz) spectrum[k] = 0.0;
    }
    x = irfft(spectrum, n);
    double ss = 0.0;
    for (double v : x) ss += v * v;
    const double rms = std::sqrt(ss / static_cast<double>(n));
    if (!(rms > 0.0)) throw InvalidArgument("continuous source band contains no frequency bins");
    for (double& v : x) v *= spec.amplitude / rms;
    return x;
}

} // namespace aeloc::sim
