#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "aeloc/error.hpp"
#include "aeloc/signal/waveform.hpp"

namespace aeloc {

/// Bandpass definition. `order` counts poles per band edge, so the digital
/// filter has 2*order poles arranged as `order` second-order sections.
struct FilterSpec {
    double f_low = 35e3;
    double f_high = 45e3;
    int order = 4;

    double center() const noexcept { return std::sqrt(f_low * f_high); }
    double width() const noexcept { return f_high - f_low; }

    friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

inline void validate(const FilterSpec& spec, double sample_rate) {
    const double nyquist = 0.5 * sample_rate;
    if (spec.order < 1) throw InvalidArgument("filter order must be positive, got " + std::to_string(spec.order));
    if (!(spec.f_low > 0.0)) throw InvalidArgument("filter low edge must be positive");
    if (!(spec.f_low < spec.f_high))
        throw InvalidArgument("filter band edges out of order: f_low=" + std::to_string(spec.f_low) +
                              " Hz >= f_high=" + std::to_string(spec.f_high) + " Hz");
    if (!(spec.f_high < nyquist))
        throw InvalidArgument("filter high edge " + std::to_string(spec.f_high) + " Hz is not below Nyquist (" +
                              std::to_string(nyquist) + " Hz)");
}

/// Second-order section, a0 normalized to 1.
struct Biquad {
    double b0 = 1, b1 = 0, b2 = 0;
    double a1 = 0, a2 = 0;

    std::complex<double> response(double omega) const {
        const std::complex<double> z1 = std::polar(1.0, -omega);
        const std::complex<double> z2 = z1 * z1;
        return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
    }
};

/// Causal IIR filter realized as a cascade of second-order sections.
struct DigitalFilter {
    FilterSpec spec;
    double sample_rate = 0;
    std::vector<Biquad> sections;

    /// Complex frequency response at `freq` Hz.
    std::complex<double> response(double freq) const {
        const double omega = 2.0 * std::numbers::pi * freq / sample_rate;
        std::complex<double> h = 1.0;
        for (const auto& s : sections) h *= s.response(omega);
        return h;
    }

    double gain(double freq) const { return std::abs(response(freq)); }
};

/// Butterworth bandpass via the analog lowpass prototype, the lowpass-to-bandpass
/// transform and the bilinear transform with both edges prewarped. Each section
/// is scaled to unit gain at the geometric band center.
inline DigitalFilter design_bandpass(const FilterSpec& spec, double sample_rate) {
    validate(spec, sample_rate);
    using cplx = std::complex<double>;
    constexpr double pi = std::numbers::pi;

    const double k = 2.0 * sample_rate;
    const double w1 = k * std::tan(pi * spec.f_low / sample_rate);
    const double w2 = k * std::tan(pi * spec.f_high / sample_rate);
    const double w0 = std::sqrt(w1 * w2);
    const double bw = w2 - w1;
    const int n = spec.order;

    std::vector<cplx> zpoles;
    zpoles.reserve(2 * n);
    for (int i = 0; i < n; ++i) {
        const cplx p = std::polar(1.0, pi * (2.0 * i + n + 1) / (2.0 * n));
        const cplx half = p * (bw / 2.0);
        const cplx root = std::sqrt(half * half - w0 * w0);
        for (const cplx s : {half + root, half - root}) zpoles.push_back((k + s) / (k - s));
    }

    // Conjugate pairs become one section each; leftover real poles are paired in order.
    constexpr double real_tol = 1e-12;
    std::vector<cplx> upper;
    std::vector<double> reals;
    for (const auto& z : zpoles) {
        if (z.imag() > real_tol)
            upper.push_back(z);
        else if (std::abs(z.imag()) <= real_tol)
            reals.push_back(z.real());
    }
    std::sort(reals.begin(), reals.end());

    DigitalFilter filter{spec, sample_rate, {}};
    for (const auto& z : upper)
        filter.sections.push_back({1.0, 0.0, -1.0, -2.0 * z.real(), std::norm(z)});
    for (std::size_t i = 0; i + 1 < reals.size(); i += 2)
        filter.sections.push_back({1.0, 0.0, -1.0, -(reals[i] + reals[i + 1]), reals[i] * reals[i + 1]});
    if (filter.sections.size() != static_cast<std::size_t>(n))
        throw Error("design_bandpass: unexpected pole layout for order " + std::to_string(n));

    const double omega0 = 2.0 * std::atan(w0 / k);
    for (auto& s : filter.sections) {
        const double g = 1.0 / std::abs(s.response(omega0));
        s.b0 *= g;
        s.b1 *= g;
        s.b2 *= g;
    }
    return filter;
}

/// Single forward pass (transposed direct form II per section), zero initial state.
inline Waveform apply_filter(const DigitalFilter& filter, const Waveform& w) {
    if (filter.sample_rate != w.sample_rate())
        throw InvalidArgument("apply_filter: filter designed for " + std::to_string(filter.sample_rate) +
                              " Hz applied to a " + std::to_string(w.sample_rate()) + " Hz waveform");
    std::vector<double> y(w.samples().begin(), w.samples().end());
    for (const auto& s : filter.sections) {
        double z1 = 0.0, z2 = 0.0;
        for (double& v : y) {
            const double x = v;
            const double out = s.b0 * x + z1;
            z1 = s.b1 * x - s.a1 * out + z2;
            z2 = s.b2 * x - s.a2 * out;
            v = out;
        }
    }
    return Waveform(std::move(y), w.sample_rate());
}

inline WaveformPair apply_filter(const DigitalFilter& filter, const WaveformPair& pair) {
    return {apply_filter(filter, pair.ch1), apply_filter(filter, pair.ch2)};
}

} // namespace aeloc
